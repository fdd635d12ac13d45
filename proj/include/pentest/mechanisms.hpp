#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pentest/auction.hpp"
#include "pentest/curves.hpp"
#include "pentest/distribution.hpp"
#include "pentest/feasibility.hpp"

namespace pentest {

using Distributions = std::vector<ValueDistribution>;
using Bundles = std::vector<CurveBundle>;

/// Ironed curves for each distribution.
Bundles ironed_bundles(const Distributions& dists, std::size_t resolution = kDefaultGridResolution);

/// ū(q) at the quantile of `value`: the ironed consumer-surplus virtual
/// value of an agent with that value.
double ironed_virtual_value(const CurveBundle& bundle, double value);

/// Distribution of ū(q) for q uniform: one atom per hull segment.
ValueDistribution virtual_distribution(const CurveBundle& bundle);

// ---------------------------------------------------------------------------
// Offline deferred-acceptance clocks

/// One ascending price shared by all active agents; stops at feasibility.
/// Simultaneous drops are resolved one agent at a time in index order.
MechanismPtr k_clock_da(const FeasibilityConstraint& constraint);
MechanismPtr k_clock_da(int k, int n);

/// Raises only agents that lie on some circuit of the active set, so the
/// weakest circuit member leaves first. Ends at the max-weight basis.
MechanismPtr matroid_da(const FeasibilityConstraint& matroid);

enum class KnapsackBranch { kBangPerBuck, kMax };
std::string to_string(KnapsackBranch branch);

struct KnapsackBranchEstimate {
  KnapsackBranch chosen = KnapsackBranch::kBangPerBuck;
  double bang_per_buck_mean = 0.0;
  double max_mean = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Surplus of "sort by value/size, take items until the next one does not
/// fit" (items larger than the capacity are skipped).
Selection knapsack_greedy_prefix(const FeasibilityConstraint& knapsack, const std::vector<double>& values);
/// The single most valuable item that fits.
Selection knapsack_max_item(const FeasibilityConstraint& knapsack, const std::vector<double>& values);

/// Two-branch knapsack mechanism. The branch with the larger Monte Carlo
/// mean surplus (ties: bang-per-buck) is fixed at construction, before any
/// value is seen; `trials` draws from `dists` with the given seed.
MechanismPtr knapsack_da(const FeasibilityConstraint& knapsack, const Distributions& dists, int trials = 10000,
                         std::uint64_t seed = 0);
/// Same, with the branch given explicitly.
MechanismPtr knapsack_da_branch(const FeasibilityConstraint& knapsack, KnapsackBranch branch);
KnapsackBranchEstimate estimate_knapsack_branch(const FeasibilityConstraint& knapsack, const Distributions& dists,
                                                int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Posted prices

/// Offers `prices[i]` to agents in `order` until `k` have accepted; the
/// rest are rejected. A price of kUnbounded rejects the agent outright.
MechanismPtr posted_price_mechanism(const FeasibilityConstraint& k_of_n, std::vector<double> prices,
                                    std::vector<int> order, MechanismMode mode, std::string name);

/// Smallest tau with prod_i F_i(tau) >= 1/2, snapped to an atom when the
/// product jumps across 1/2 there.
double prophet_threshold(const Distributions& dists);
/// Single item; threshold tau offered in index order.
MechanismPtr prophet_posted_price(const Distributions& dists);

/// Ex-ante optimal quantiles for k units: maximizes sum V_i(q_i) subject to
/// sum q_i <= k by a common threshold lambda (bisection to 1e-10 on sum q).
std::vector<double> water_filling(const Distributions& dists, int k);
double ear_value(const std::vector<double>& qvec, const Distributions& dists);
/// Offers v_i(q_i) in decreasing order of V_i(q_i)/q_i until k units sell.
MechanismPtr gsp_sequential(const FeasibilityConstraint& k_of_n, const Distributions& dists,
                            const std::vector<double>& qvec);
MechanismPtr gsp_sequential(const FeasibilityConstraint& k_of_n, const Distributions& dists);

struct IidPostedPrice {
  double quantile = 1.0;
  double price = 0.0;
  double objective = 0.0;  // g(q*) = (1 - (1-q*)^n)/q* * Ū(q*)
};
/// Grid maximizer of g over quantiles where Ū meets U; near-ties (1e-12
/// relative) go to the largest quantile.
IidPostedPrice iid_posted_price_choice(const CurveBundle& bundle, int n);
MechanismPtr iid_posted_price(const CurveBundle& bundle, int n);

// ---------------------------------------------------------------------------
// Virtual pricing

/// Runs `base` on ironed virtual values ū_i(q_i) and posts, for each
/// virtual price, the per-agent price that serves exactly the quantiles
/// whose ironed virtual value clears it. `base` should be built over
/// `virtual_distribution` of each bundle when it depends on priors.
MechanismPtr virtual_transform(MechanismPtr base, Bundles bundles);

/// Ironed virtual surplus of a max-weight feasible set under ū_i(q_i), with
/// ties broken uniformly at random. Knapsack throws UnsupportedError.
double opt_cs_benchmark(const FeasibilityConstraint& constraint, const Bundles& bundles,
                        const std::vector<double>& values, Rng& rng);

// ---------------------------------------------------------------------------
// Epsilon buffering

/// 0 on [0, eps], (q - eps)/(1 - 2 eps) on [eps, 1 - eps], 1 on [1 - eps, 1].
double buffered_quantile(double q, double eps);

/// Surplus-optimal allocation computed on v_i(buffered q_i); returns the
/// selected set with its true total value. Unbounded values at quantile 0
/// are replaced by a common large finite weight, so such agents tie.
Selection buffered_opt_surplus(const FeasibilityConstraint& constraint, const Distributions& dists,
                               const std::vector<double>& quantiles, double eps);

}  // namespace pentest
