#include "pentest/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "pentest/errors.hpp"

namespace pentest {

namespace {

// Weight standing in for an unbounded value when a finite one is needed.
constexpr double kHugeWeight = 1e300;

// Levels of an event-driven ascending clock: each finite bid b and the next
// double above it. Raising to b never changes who is active; raising to
// next(b) removes exactly the agents bidding b. Non-positive levels are
// useless because every price starts at 0.
std::vector<double> clock_levels(const std::vector<double>& bids) {
  std::vector<double> levels;
  levels.reserve(2 * bids.size());
  for (double b : bids) {
    if (!std::isfinite(b)) continue;
    if (b > 0.0) levels.push_back(b);
    levels.push_back(std::nextafter(b, kUnbounded));
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

using Eligibility = std::function<std::vector<char>(const std::vector<char>& active)>;

// Ascending clock over a ladder of levels. At each level, eligible active
// agents are raised to level * scale[i] one at a time in index order.
// With `bids` and `keys` (keys[i] = bids[i] / scale[i]), the product is
// snapped so that agent i's price is at most bids[i] while the level is at
// most keys[i] and above bids[i] afterwards; rounding of the product alone
// could otherwise move an agent's drop to the wrong level.
class LadderSession final : public PricingSession {
 public:
  LadderSession(std::vector<double> levels, std::vector<double> scale, Eligibility eligible,
                std::vector<int> upfront_rejects, std::vector<double> bids = {}, std::vector<double> keys = {})
      : levels_(std::move(levels)),
        scale_(std::move(scale)),
        eligible_(std::move(eligible)),
        rejects_(std::move(upfront_rejects)),
        bids_(std::move(bids)),
        keys_(std::move(keys)),
        issued_(scale_.size(), 0.0) {}

  std::optional<Action> next(const std::vector<char>& active) override {
    while (!rejects_.empty()) {
      const int i = rejects_.back();
      rejects_.pop_back();
      if (active[i]) return Action::reject_agent(i);
    }
    const int n = static_cast<int>(scale_.size());
    // Eligibility depends only on the active set, which changes on drops.
    if (eligible_ && active != cached_active_) {
      cached_active_ = active;
      cached_ok_ = eligible_(active);
    }
    const std::vector<char>& ok = cached_ok_;
    while (level_ < levels_.size()) {
      for (; cursor_ < n; ++cursor_) {
        const int i = cursor_;
        if (!active[i] || (!ok.empty() && !ok[i])) continue;
        double target = levels_[level_] * scale_[i];
        if (!keys_.empty() && std::isfinite(bids_[i])) {
          target = levels_[level_] <= keys_[i] ? std::min(target, bids_[i])
                                               : std::max(target, std::nextafter(bids_[i], kUnbounded));
        }
        if (target <= issued_[i]) continue;
        issued_[i] = target;
        ++cursor_;
        return Action::raise(i, target);
      }
      cursor_ = 0;
      ++level_;
    }
    return std::nullopt;
  }

 private:
  std::vector<double> levels_;
  std::vector<double> scale_;
  Eligibility eligible_;
  std::vector<int> rejects_;
  std::vector<double> bids_;
  std::vector<double> keys_;
  std::vector<double> issued_;
  std::vector<char> cached_active_;
  std::vector<char> cached_ok_;
  std::size_t level_ = 0;
  int cursor_ = 0;
};

class ClockMechanism final : public DAMechanism {
 public:
  ClockMechanism(FeasibilityConstraint constraint, std::string name, bool circuits_only)
      : constraint_(std::move(constraint)), name_(std::move(name)), circuits_only_(circuits_only) {}

  std::string name() const override { return name_; }
  const FeasibilityConstraint& constraint() const override { return constraint_; }

  std::unique_ptr<PricingSession> start(const std::vector<double>& bids, Rng&) const override {
    Eligibility eligible;
    if (circuits_only_) {
      eligible = [this](const std::vector<char>& active) {
        Subset a;
        for (int i = 0; i < static_cast<int>(active.size()); ++i) {
          if (active[i]) a.push_back(i);
        }
        const int r = constraint_.rank(a);
        std::vector<char> ok(active.size(), 0);
        for (int i : a) {
          Subset rest;
          rest.reserve(a.size() - 1);
          for (int j : a) {
            if (j != i) rest.push_back(j);
          }
          ok[i] = constraint_.rank(rest) == r ? 1 : 0;
        }
        return ok;
      };
    }
    return std::make_unique<LadderSession>(clock_levels(bids), std::vector<double>(bids.size(), 1.0),
                                           std::move(eligible), std::vector<int>{});
  }

 private:
  FeasibilityConstraint constraint_;
  std::string name_;
  bool circuits_only_;
};

class KnapsackMechanism final : public DAMechanism {
 public:
  KnapsackMechanism(FeasibilityConstraint knapsack, KnapsackBranch branch, KnapsackBranchEstimate estimate)
      : constraint_(std::move(knapsack)), branch_(branch), estimate_(estimate) {}

  std::string name() const override { return "knapsack_da[" + to_string(branch_) + "]"; }
  const FeasibilityConstraint& constraint() const override { return constraint_; }

  std::unique_ptr<PricingSession> start(const std::vector<double>& bids, Rng&) const override {
    const int n = constraint_.n();
    const auto& sizes = constraint_.sizes();
    std::vector<int> rejects;
    for (int i = n - 1; i >= 0; --i) {
      if (sizes[i] > constraint_.capacity()) rejects.push_back(i);
    }
    if (branch_ == KnapsackBranch::kMax) {
      return std::make_unique<LadderSession>(clock_levels(bids), std::vector<double>(bids.size(), 1.0),
                                             Eligibility{}, std::move(rejects));
    }
    // Density clock: the price of agent i is level * size_i.
    std::vector<double> density(bids.size());
    for (int i = 0; i < n; ++i) density[i] = bids[i] / sizes[i];
    auto levels = clock_levels(density);
    return std::make_unique<LadderSession>(std::move(levels), sizes, Eligibility{}, std::move(rejects), bids,
                                           std::move(density));
  }

 private:
  FeasibilityConstraint constraint_;
  KnapsackBranch branch_;
  KnapsackBranchEstimate estimate_;
};

class PostedSession final : public PricingSession {
 public:
  PostedSession(const std::vector<double>& prices, const std::vector<int>& order, int units)
      : prices_(prices), order_(order), units_(units) {}

  std::optional<Action> next(const std::vector<char>& active) override {
    if (pending_ >= 0) {
      if (active[pending_]) ++sold_;
      pending_ = -1;
    }
    while (pos_ < order_.size()) {
      const int i = order_[pos_++];
      if (!active[i]) continue;
      if (sold_ >= units_ || prices_[i] == kUnbounded) return Action::reject_agent(i);
      pending_ = i;
      return Action::raise(i, prices_[i]);
    }
    return std::nullopt;
  }

 private:
  const std::vector<double>& prices_;
  const std::vector<int>& order_;
  int units_;
  std::size_t pos_ = 0;
  int sold_ = 0;
  int pending_ = -1;
};

class PostedPriceMechanism final : public DAMechanism {
 public:
  PostedPriceMechanism(FeasibilityConstraint constraint, std::vector<double> prices, std::vector<int> order,
                       MechanismMode mode, std::string name)
      : constraint_(std::move(constraint)),
        prices_(std::move(prices)),
        order_(std::move(order)),
        mode_(mode),
        name_(std::move(name)) {}

  std::string name() const override { return name_; }
  MechanismMode mode() const override { return mode_; }
  const FeasibilityConstraint& constraint() const override { return constraint_; }
  std::unique_ptr<PricingSession> start(const std::vector<double>&, Rng&) const override {
    return std::make_unique<PostedSession>(prices_, order_, constraint_.k());
  }

 private:
  FeasibilityConstraint constraint_;
  std::vector<double> prices_;
  std::vector<int> order_;
  MechanismMode mode_;
  std::string name_;
};

class TransformSession final : public PricingSession {
 public:
  TransformSession(std::unique_ptr<PricingSession> base, const Bundles& bundles)
      : base_(std::move(base)), bundles_(bundles) {}

  std::optional<Action> next(const std::vector<char>& active) override {
    auto action = base_->next(active);
    if (!action || action->reject) return action;
    const int i = action->agent;
    const double price = virtual_posted_price(bundles_[i], std::max(0.0, action->price));
    if (price == kUnbounded) return Action::reject_agent(i);
    return Action::raise(i, price);
  }

 private:
  std::unique_ptr<PricingSession> base_;
  const Bundles& bundles_;
};

class VirtualTransform final : public DAMechanism {
 public:
  VirtualTransform(MechanismPtr base, Bundles bundles) : base_(std::move(base)), bundles_(std::move(bundles)) {
    if (static_cast<int>(bundles_.size()) != base_->n()) throw DomainError("one curve bundle per agent expected");
    for (const auto& b : bundles_) {
      if (!b.ironed()) throw DomainError("virtual transform needs ironed curves");
    }
  }

  std::string name() const override { return "virtual(" + base_->name() + ")"; }
  MechanismMode mode() const override { return base_->mode(); }
  const FeasibilityConstraint& constraint() const override { return base_->constraint(); }

  std::unique_ptr<PricingSession> start(const std::vector<double>& bids, Rng& rng) const override {
    std::vector<double> virtual_bids(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) virtual_bids[i] = ironed_virtual_value(bundles_[i], bids[i]);
    return std::make_unique<TransformSession>(base_->start(virtual_bids, rng), bundles_);
  }

 private:
  MechanismPtr base_;
  Bundles bundles_;
};

std::vector<double> sample_values(const Distributions& dists, Rng& rng) {
  std::vector<double> values(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) values[i] = dists[i].sample(rng);
  return values;
}

// Stable evaluation of (1 - (1-q)^n) / q, which equals n at q = 0.
double sale_ratio(double q, int n) {
  if (q <= 0.0) return static_cast<double>(n);
  if (q >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-q)) / q;
}

}  // namespace

Bundles ironed_bundles(const Distributions& dists, std::size_t resolution) {
  Bundles out;
  out.reserve(dists.size());
  for (const auto& d : dists) out.push_back(ironed_curves(d, resolution));
  return out;
}

double ironed_virtual_value(const CurveBundle& bundle, double value) {
  return bundle.ironed_marginal(bundle.dist.upper_quantile(value));
}

ValueDistribution virtual_distribution(const CurveBundle& bundle) {
  if (!bundle.ironed()) throw DomainError("virtual distribution needs ironed curves");
  std::vector<double> values;
  std::vector<double> probs;
  for (std::size_t k = 0; k < bundle.hull_slope.size(); ++k) {
    values.push_back(std::max(0.0, bundle.hull_slope[k]));
    probs.push_back(bundle.hull_q[k + 1] - bundle.hull_q[k]);
  }
  return ValueDistribution::point_masses(std::move(values), std::move(probs));
}

MechanismPtr k_clock_da(const FeasibilityConstraint& constraint) {
  return std::make_shared<ClockMechanism>(constraint, "k_clock_da", false);
}

MechanismPtr k_clock_da(int k, int n) { return k_clock_da(FeasibilityConstraint::k_of_n(n, k)); }

MechanismPtr matroid_da(const FeasibilityConstraint& matroid) {
  if (!matroid.is_matroid()) throw UnsupportedError("matroid_da requires a matroid constraint");
  return std::make_shared<ClockMechanism>(matroid, "matroid_da", true);
}

std::string to_string(KnapsackBranch branch) {
  return branch == KnapsackBranch::kBangPerBuck ? "bang-per-buck" : "max";
}

Selection knapsack_greedy_prefix(const FeasibilityConstraint& knapsack, const std::vector<double>& values) {
  if (knapsack.kind() != ConstraintKind::kKnapsack) throw UnsupportedError("knapsack constraint expected");
  const auto& sizes = knapsack.sizes();
  std::vector<int> order;
  for (int i = 0; i < knapsack.n(); ++i) {
    if (sizes[i] <= knapsack.capacity()) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] / sizes[a] > values[b] / sizes[b]; });
  Selection sel;
  double used = 0.0;
  for (int i : order) {
    if (used + sizes[i] > knapsack.capacity()) break;
    used += sizes[i];
    sel.subset.push_back(i);
    sel.total += values[i];
  }
  std::sort(sel.subset.begin(), sel.subset.end());
  return sel;
}

Selection knapsack_max_item(const FeasibilityConstraint& knapsack, const std::vector<double>& values) {
  if (knapsack.kind() != ConstraintKind::kKnapsack) throw UnsupportedError("knapsack constraint expected");
  Selection sel;
  int best = -1;
  for (int i = 0; i < knapsack.n(); ++i) {
    if (knapsack.sizes()[i] > knapsack.capacity()) continue;
    if (best < 0 || values[i] > values[best]) best = i;
  }
  if (best >= 0) {
    sel.subset = {best};
    sel.total = values[best];
  }
  return sel;
}

KnapsackBranchEstimate estimate_knapsack_branch(const FeasibilityConstraint& knapsack, const Distributions& dists,
                                                int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("branch estimation needs at least one trial");
  if (static_cast<int>(dists.size()) != knapsack.n()) throw DomainError("one distribution per agent expected");
  KnapsackBranchEstimate est;
  est.trials = trials;
  est.seed = seed;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const auto values = sample_values(dists, rng);
    est.bang_per_buck_mean += knapsack_greedy_prefix(knapsack, values).total;
    est.max_mean += knapsack_max_item(knapsack, values).total;
  }
  est.bang_per_buck_mean /= trials;
  est.max_mean /= trials;
  est.chosen = est.max_mean > est.bang_per_buck_mean ? KnapsackBranch::kMax : KnapsackBranch::kBangPerBuck;
  return est;
}

MechanismPtr knapsack_da(const FeasibilityConstraint& knapsack, const Distributions& dists, int trials,
                         std::uint64_t seed) {
  const auto est = estimate_knapsack_branch(knapsack, dists, trials, seed);
  return std::make_shared<KnapsackMechanism>(knapsack, est.chosen, est);
}

MechanismPtr knapsack_da_branch(const FeasibilityConstraint& knapsack, KnapsackBranch branch) {
  if (knapsack.kind() != ConstraintKind::kKnapsack) throw UnsupportedError("knapsack constraint expected");
  return std::make_shared<KnapsackMechanism>(knapsack, branch, KnapsackBranchEstimate{.chosen = branch});
}

MechanismPtr posted_price_mechanism(const FeasibilityConstraint& k_of_n, std::vector<double> prices,
                                    std::vector<int> order, MechanismMode mode, std::string name) {
  if (k_of_n.kind() != ConstraintKind::kKofN) throw UnsupportedError("posted prices need a k-of-n constraint");
  const int n = k_of_n.n();
  if (static_cast<int>(prices.size()) != n) throw DomainError("one price per agent expected");
  std::vector<int> check(order);
  std::sort(check.begin(), check.end());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(check.size()) != n || check[i] != i) throw DomainError("order must be a permutation");
  }
  for (double p : prices) {
    if (!(p >= 0.0)) throw DomainError("posted prices must be non-negative");
  }
  return std::make_shared<PostedPriceMechanism>(k_of_n, std::move(prices), std::move(order), mode, std::move(name));
}

double prophet_threshold(const Distributions& dists) {
  if (dists.empty()) throw DomainError("prophet threshold needs at least one distribution");
  auto product = [&](double tau) {
    double p = 1.0;
    for (const auto& d : dists) p *= d.cdf(tau);
    return p;
  };
  double lo = 0.0;
  if (product(lo) >= 0.5) return lo;
  double hi = 1.0;
  while (product(hi) < 0.5) hi *= 2.0;
  // Bisect down to adjacent doubles; hi ends at the smallest tau with
  // product >= 1/2, which is the atom itself when the product jumps there.
  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (product(mid) >= 0.5) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

MechanismPtr prophet_posted_price(const Distributions& dists) {
  const int n = static_cast<int>(dists.size());
  const double tau = prophet_threshold(dists);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return posted_price_mechanism(FeasibilityConstraint::k_of_n(n, 1), std::vector<double>(static_cast<std::size_t>(n), tau),
                                std::move(order), MechanismMode::kOnlineOblivious, "prophet_posted_price");
}

std::vector<double> water_filling(const Distributions& dists, int k) {
  const int n = static_cast<int>(dists.size());
  if (k < 1 || k > n) throw DomainError("water filling needs 1 <= k <= n");
  auto quantiles_at = [&](double lambda) {
    std::vector<double> q(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) q[i] = dists[i].upper_quantile(lambda);
    return q;
  };
  auto total = [](const std::vector<double>& q) { return std::accumulate(q.begin(), q.end(), 0.0); };
  if (k == n) return std::vector<double>(dists.size(), 1.0);
  double lo = 0.0;
  double hi = 1.0;
  while (total(quantiles_at(hi)) > k) hi *= 2.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double s_lo = total(quantiles_at(lo));
    const double s_hi = total(quantiles_at(hi));
    if (s_lo - s_hi <= 1e-10) break;
    if (total(quantiles_at(mid)) > k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto q_lo = quantiles_at(lo);
  const auto q_hi = quantiles_at(hi);
  const double s_lo = total(q_lo);
  const double s_hi = total(q_hi);
  // Split any mass sitting between the brackets (atoms at lambda) so the
  // budget binds exactly.
  const double frac = (s_lo > s_hi) ? std::clamp((k - s_hi) / (s_lo - s_hi), 0.0, 1.0) : 0.0;
  std::vector<double> q(dists.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = q_hi[i] + frac * (q_lo[i] - q_hi[i]);
  return q;
}

double ear_value(const std::vector<double>& qvec, const Distributions& dists) {
  if (qvec.size() != dists.size()) throw DomainError("one quantile per distribution expected");
  double total = 0.0;
  for (std::size_t i = 0; i < qvec.size(); ++i) total += dists[i].surplus_curve(qvec[i]);
  return total;
}

MechanismPtr gsp_sequential(const FeasibilityConstraint& k_of_n, const Distributions& dists,
                            const std::vector<double>& qvec) {
  const int n = k_of_n.n();
  if (static_cast<int>(dists.size()) != n || static_cast<int>(qvec.size()) != n) {
    throw DomainError("one distribution and quantile per agent expected");
  }
  std::vector<double> prices(static_cast<std::size_t>(n));
  std::vector<double> per_sale(static_cast<std::size_t>(n), -1.0);
  for (int i = 0; i < n; ++i) {
    const double q = qvec[i];
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantiles must lie in [0,1]");
    prices[i] = (q == 0.0) ? kUnbounded : dists[i].inverse_demand(q);
    if (q > 0.0) per_sale[i] = dists[i].surplus_curve(q) / q;
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return per_sale[a] > per_sale[b]; });
  return posted_price_mechanism(k_of_n, std::move(prices), std::move(order), MechanismMode::kOnlineSequential,
                                "gsp_sequential");
}

MechanismPtr gsp_sequential(const FeasibilityConstraint& k_of_n, const Distributions& dists) {
  return gsp_sequential(k_of_n, dists, water_filling(dists, k_of_n.k()));
}

IidPostedPrice iid_posted_price_choice(const CurveBundle& bundle, int n) {
  if (n < 1) throw DomainError("iid posted price needs n >= 1");
  if (!bundle.ironed()) throw DomainError("iid posted price needs ironed curves");
  const double scale = std::max(1.0, std::abs(bundle.hull_U.back()));
  std::vector<double> candidates(bundle.hull_q.begin() + 1, bundle.hull_q.end());
  for (std::size_t i = 1; i < bundle.grid.size(); ++i) {
    const double q = bundle.grid[i];
    const double reach = std::max(bundle.U[i], bundle.dist.consumer_surplus_envelope(q));
    if (bundle.U_ironed[i] - reach <= 1e-12 * scale) candidates.push_back(q);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  IidPostedPrice best{.quantile = 1.0, .price = 0.0, .objective = -1.0};
  for (double q : candidates) {
    const double g = sale_ratio(q, n) * bundle.ironed_value(q);
    // Values within rounding of the best count as ties; ties go to the larger
    // quantile (the lower price).
    if (g >= best.objective - 1e-12 * std::max(1.0, std::abs(best.objective))) {
      best.quantile = q;
      best.objective = std::max(best.objective, g);
    }
  }
  best.price = (best.quantile >= 1.0) ? 0.0
                                      : std::nextafter(bundle.dist.inverse_demand_right(best.quantile), kUnbounded);
  return best;
}

MechanismPtr iid_posted_price(const CurveBundle& bundle, int n) {
  const auto choice = iid_posted_price_choice(bundle, n);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> prices(order.size(), choice.price);
  return posted_price_mechanism(FeasibilityConstraint::k_of_n(n, 1), std::move(prices), std::move(order),
                                MechanismMode::kOnlineOblivious, "iid_posted_price");
}

MechanismPtr virtual_transform(MechanismPtr base, Bundles bundles) {
  if (!base) throw DomainError("virtual transform needs a base mechanism");
  return std::make_shared<VirtualTransform>(std::move(base), std::move(bundles));
}

double opt_cs_benchmark(const FeasibilityConstraint& constraint, const Bundles& bundles,
                        const std::vector<double>& values, Rng& rng) {
  if (constraint.kind() == ConstraintKind::kKnapsack) {
    throw UnsupportedError("the consumer-surplus benchmark is not defined for knapsack constraints");
  }
  const int n = constraint.n();
  if (static_cast<int>(bundles.size()) != n || static_cast<int>(values.size()) != n) {
    throw DomainError("one curve bundle and value per agent expected");
  }
  std::vector<double> weights(static_cast<std::size_t>(n));
  std::vector<double> priority(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    weights[i] = ironed_virtual_value(bundles[i], values[i]);
    priority[i] = uniform01(rng);
  }
  return constraint.max_weight_feasible(weights, priority).total;
}

double buffered_quantile(double q, double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw DomainError("buffering epsilon must lie in [0, 1/2)");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0,1]");
  if (q <= eps) return 0.0;
  if (q >= 1.0 - eps) return 1.0;
  return (q - eps) / (1.0 - 2.0 * eps);
}

Selection buffered_opt_surplus(const FeasibilityConstraint& constraint, const Distributions& dists,
                               const std::vector<double>& quantiles, double eps) {
  const int n = constraint.n();
  if (static_cast<int>(dists.size()) != n || static_cast<int>(quantiles.size()) != n) {
    throw DomainError("one distribution and quantile per agent expected");
  }
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double w = dists[i].inverse_demand(buffered_quantile(quantiles[i], eps));
    weights[i] = std::isfinite(w) ? w : kHugeWeight;
  }
  Selection sel = constraint.max_weight_feasible(weights);
  sel.total = 0.0;
  for (int i : sel.subset) sel.total += dists[i].inverse_demand(quantiles[i]);
  return sel;
}

}  // namespace pentest
