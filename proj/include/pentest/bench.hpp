#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pentest/mechanisms.hpp"
#include "pentest/random.hpp"

namespace pentest {

// ---------------------------------------------------------------------------
// Paired Monte Carlo ratios

struct RatioEstimate {
  double numerator_mean = 0.0;    // benchmark
  double denominator_mean = 0.0;  // algorithm
  double ratio = 0.0;
  double confidence_halfwidth = 0.0;  // 95%, delta method on the paired samples
  long long trials = 0;
  std::uint64_t seed = 0;
};

struct PairedSample {
  double benchmark = 0.0;
  double algorithm = 0.0;
};

/// One trial: draws whatever it needs from the stream it is handed.
using TrialFn = std::function<PairedSample(Rng& rng)>;

/// Runs `trials` paired trials on streams trial_rng(seed, i), possibly on
/// `jobs` threads, and reduces the samples in trial order so the result
/// does not depend on `jobs`. Throws DomainError for trials < 1 and
/// DegenerateInstanceError when the algorithm mean is 0.
RatioEstimate estimate_ratio(const TrialFn& trial, long long trials, std::uint64_t seed, int jobs = 1);

/// Statistic of one realization; `rng` is private to the statistic.
using ValueStatistic = std::function<double(const std::vector<double>& values, Rng& rng)>;

/// Samples values from `dists` once per trial and evaluates both statistics
/// on them; each statistic gets an identical copy of the remaining stream.
RatioEstimate estimate_ratio(const ValueStatistic& algorithm, const ValueStatistic& benchmark,
                             const Distributions& dists, long long trials, std::uint64_t seed, int jobs = 1);

/// Ratio estimate from already collected paired samples.
RatioEstimate summarize(const std::vector<PairedSample>& samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed-form bounds

double harmonic(long long n);
/// H_{n/k}; when k does not divide n the quotient is floored.
double harmonic_lower_bound(long long n, long long k);

/// (1 - ln eps) / ((1 - eps/(1-eps)) (1 - eps) (1 - 2 n eps)), 0 < eps < 1/(2n).
double zeta_upper_general(long long n, double eps);

struct ZetaChoice {
  double value = 0.0;
  double eps = 0.0;
  bool numeric = false;  // true when the closed-form eps was out of range
};
/// eps = 1/(n ln n); for n < 8 that eps is not below 1/(2n) and the bound
/// is minimized numerically over eps instead.
ZetaChoice zeta_upper_general_auto(long long n);

/// (1/(1 - 1/sqrt(2 pi k))) (1 - ln eps)(1 + (n/k - 1) eps), 0 < eps <= 1.
double zeta_upper_kid(long long n, long long k, double eps);
/// The same bound without the leading 1/(1 - 1/sqrt(2 pi k)) factor, which
/// tends to 1 as k grows.
double zeta_upper_kid_normalized(long long n, long long k, double eps);
/// eps = 1/((n/k)(1 + ln(n/k))).
double zeta_kid_auto_eps(long long n, long long k);

/// Normalized k-of-n upper bound at k/n = x over the lower bound 0.577 + ln(1/x).
double kid_upper_over_lower(double x);
/// (2/ln 2)(ln 2 + ln(1/x)) over the normalized k-of-n upper bound at k/n = x.
double prior_bound_over_kid_upper(double x);

// ---------------------------------------------------------------------------
// Environments

/// Environment labels accepted by table1_report and measure_environment.
const std::vector<std::string>& supported_environments();

struct BoundReport {
  std::string environment;
  long long n = 0;
  long long k = 1;
  double gamma = 1.0;
  double zeta_upper = 0.0;
  double zeta_lower = 0.0;
  double pi_upper = 0.0;
  double epsilon = 0.0;
  std::string pi_source;  // "gamma*zeta" or "H_n+1"
  // Filled in when a measurement was run.
  bool measured = false;
  double measured_ratio = 0.0;
  double ci_halfwidth = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
};

/// One row per label. Throws DomainError listing the supported labels on an
/// unknown one.
std::vector<BoundReport> table1_report(const std::vector<std::string>& environments, long long n, long long k);

/// Omniscient surplus over the consumer surplus of the environment's
/// mechanism (the virtual-pricing transform of its surplus mechanism, or
/// the IID posted price), paired over `trials` realizations of `dists`.
RatioEstimate measure_environment(const std::string& environment, int n, int k, const Distributions& dists,
                                  long long trials, std::uint64_t seed, int jobs = 1,
                                  std::size_t resolution = kDefaultGridResolution);

/// Constraint used for an environment label: k-of-n for select-k, a
/// partition matroid with k blocks of capacity 1 (agent i in block i % k),
/// a knapsack with sizes 1, 1.5, 2 repeating and capacity 2k, and a single
/// item for the online rows.
FeasibilityConstraint environment_constraint(const std::string& environment, int n, int k);

// ---------------------------------------------------------------------------
// Lemma checks

/// Most negative raw second difference of q/(1-(1-q)^n) on a uniform grid
/// of [0,1] with `resolution` cells.
double verify_c_convexity(int n, std::size_t resolution = 10000);

/// |1 + a + int_0^1 t P(t) dt + a int_0^1 P(t) dt - (H_n + a n)| with
/// P(t) = sum_{j=0}^{n-2} (j+1)(1-t)^j, composite trapezoid on `points` cells.
double verify_integral_identity(int n, double a, std::size_t points = 100000);

struct IidWorstCase {
  int n = 0;
  double a = 0.0;
  double surplus = 0.0;           // H_n + a n, by quadrature
  double consumer_surplus = 0.0;  // max_q (sum_{j<n} (1-q)^j)(q + a)
  double best_quantile = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // H_n + 1
};
/// Linear consumer-surplus curve U(q) = q + a.
IidWorstCase verify_iid_worstcase(int n, double a, std::size_t grid = 10000);

}  // namespace pentest
