#include "pentest/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pentest/errors.hpp"
#include "pentest/parallel.hpp"
#include "pentest/pensim.hpp"

namespace pentest {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kEulerApprox = 0.577;

// Polynomial P(t) = sum_{j=0}^{n-2} (j+1) s^j with s = 1 - t, by Horner.
double poly_p(int n, double t) {
  const double s = 1.0 - t;
  double acc = 0.0;
  for (int j = n - 2; j >= 0; --j) acc = acc * s + (j + 1);
  return acc;
}

// sum_{j<n} (1-q)^j = (1 - (1-q)^n)/q, which is n at q = 0.
double geometric_sum(int n, double q) {
  if (q <= 0.0) return n;
  if (q >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-q)) / q;
}

const double kGammaSequential = std::numbers::e / (std::numbers::e - 1.0);

}  // namespace

RatioEstimate summarize(const std::vector<PairedSample>& samples, std::uint64_t seed) {
  const auto n = static_cast<long long>(samples.size());
  if (n < 1) throw DomainError("ratio estimation needs at least one trial");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& s : samples) {
    sx += s.benchmark;
    sy += s.algorithm;
  }
  RatioEstimate est;
  est.trials = n;
  est.seed = seed;
  est.numerator_mean = sx / n;
  est.denominator_mean = sy / n;
  if (!(est.denominator_mean > 0.0)) {
    throw DegenerateInstanceError("algorithm has zero mean over all trials");
  }
  est.ratio = est.numerator_mean / est.denominator_mean;
  // Delta method: Var(Xbar/Ybar) ~ Var(X - R Y) / (N Ybar^2).
  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = s.benchmark - est.ratio * s.algorithm;
    ss += r * r;
  }
  const double var = ss / static_cast<double>(std::max<long long>(n - 1, 1));
  est.confidence_halfwidth = kZ95 * std::sqrt(var / n) / est.denominator_mean;
  return est;
}

RatioEstimate estimate_ratio(const TrialFn& trial, long long trials, std::uint64_t seed, int jobs) {
  if (trials < 1) throw DomainError("ratio estimation needs at least one trial");
  std::vector<PairedSample> samples(static_cast<std::size_t>(trials));
  for_each_trial(trials, jobs, [&](long long i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i));
    samples[static_cast<std::size_t>(i)] = trial(rng);
  });
  return summarize(samples, seed);
}

RatioEstimate estimate_ratio(const ValueStatistic& algorithm, const ValueStatistic& benchmark,
                             const Distributions& dists, long long trials, std::uint64_t seed, int jobs) {
  return estimate_ratio(
      [&](Rng& rng) {
        std::vector<double> values(dists.size());
        for (std::size_t i = 0; i < dists.size(); ++i) values[i] = dists[i].sample(rng);
        Rng for_benchmark = rng;
        Rng for_algorithm = rng;
        return PairedSample{benchmark(values, for_benchmark), algorithm(values, for_algorithm)};
      },
      trials, seed, jobs);
}

double harmonic(long long n) {
  double h = 0.0;
  for (long long j = n; j >= 1; --j) h += 1.0 / static_cast<double>(j);
  return h;
}

double harmonic_lower_bound(long long n, long long k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("harmonic lower bound needs 1 <= k <= n");
  return harmonic(n / k);
}

double zeta_upper_general(long long n, double eps) {
  if (n < 1) throw DomainError("n must be positive");
  if (!(eps > 0.0 && eps < 1.0 / (2.0 * static_cast<double>(n)))) {
    throw DomainError("epsilon must lie in (0, 1/(2n))");
  }
  const double denom = (1.0 - eps / (1.0 - eps)) * (1.0 - eps) * (1.0 - 2.0 * static_cast<double>(n) * eps);
  return (1.0 - std::log(eps)) / denom;
}

ZetaChoice zeta_upper_general_auto(long long n) {
  if (n < 1) throw DomainError("n must be positive");
  const double nd = static_cast<double>(n);
  if (n >= 2) {
    const double eps = 1.0 / (nd * std::log(nd));
    if (eps < 1.0 / (2.0 * nd)) return {zeta_upper_general(n, eps), eps, false};
  }
  // Golden-section search over log eps.
  double lo = std::log(1e-12);
  double hi = std::log(1.0 / (2.0 * nd)) - 1e-9;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double t) { return zeta_upper_general(n, std::exp(t)); };
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  for (int iter = 0; iter < 200; ++iter) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = f(b);
    }
  }
  const double eps = std::exp(0.5 * (lo + hi));
  return {zeta_upper_general(n, eps), eps, true};
}

double zeta_upper_kid_normalized(long long n, long long k, double eps) {
  if (n < 1 || k < 1 || k > n) throw DomainError("k-of-n bound needs 1 <= k <= n");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
  const double r = static_cast<double>(n) / static_cast<double>(k);
  return (1.0 - std::log(eps)) * (1.0 + (r - 1.0) * eps);
}

double zeta_upper_kid(long long n, long long k, double eps) {
  const double lead = 1.0 / (1.0 - 1.0 / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(k)));
  return lead * zeta_upper_kid_normalized(n, k, eps);
}

double zeta_kid_auto_eps(long long n, long long k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("k-of-n bound needs 1 <= k <= n");
  const double r = static_cast<double>(n) / static_cast<double>(k);
  return 1.0 / (r * (1.0 + std::log(r)));
}

double kid_upper_over_lower(double x) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("k/n must lie in (0, 1]");
  const double l = 1.0 - std::log(x);
  const double upper = (1.0 + (1.0 - x) / l) * (l + std::log(l));
  return upper / (kEulerApprox - std::log(x));
}

double prior_bound_over_kid_upper(double x) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("k/n must lie in (0, 1]");
  const double l = 1.0 - std::log(x);
  const double upper = (1.0 + (1.0 - x) / l) * (l + std::log(l));
  return (2.0 / std::numbers::ln2) * (std::numbers::ln2 - std::log(x)) / upper;
}

const std::vector<std::string>& supported_environments() {
  static const std::vector<std::string> labels{"select-k", "matroid", "knapsack",
                                               "online-oblivious", "online-sequential", "online-iid"};
  return labels;
}

namespace {

void require_environment(const std::string& env) {
  const auto& labels = supported_environments();
  if (std::find(labels.begin(), labels.end(), env) != labels.end()) return;
  std::string list;
  for (const auto& l : labels) list += (list.empty() ? "" : ", ") + l;
  throw DomainError("unsupported environment '" + env + "'; supported: " + list);
}

}  // namespace

std::vector<BoundReport> table1_report(const std::vector<std::string>& environments, long long n, long long k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("table needs 1 <= k <= n");
  std::vector<BoundReport> rows;
  for (const auto& env : environments) {
    require_environment(env);
    BoundReport row;
    row.environment = env;
    row.n = n;
    // Online rows sell a single item; the offline rows build their
    // environment from k (see environment_constraint).
    row.k = env.rfind("online-", 0) == 0 ? 1 : k;
    row.pi_source = "gamma*zeta";
    if (env == "select-k") {
      row.gamma = 1.0;
      row.epsilon = zeta_kid_auto_eps(n, k);
      row.zeta_upper = zeta_upper_kid(n, k, row.epsilon);
      row.zeta_lower = harmonic_lower_bound(n, k);
    } else {
      const auto z = zeta_upper_general_auto(n);
      row.epsilon = z.eps;
      row.zeta_upper = z.value;
      row.zeta_lower = harmonic(n);
      if (env == "matroid") {
        row.gamma = 1.0;
      } else if (env == "knapsack" || env == "online-oblivious") {
        row.gamma = 2.0;
      } else {
        row.gamma = kGammaSequential;
      }
    }
    row.pi_upper = row.gamma * row.zeta_upper;
    if (env == "online-iid") {
      row.pi_upper = harmonic(n) + 1.0;
      row.pi_source = "H_n+1";
    }
    rows.push_back(row);
  }
  return rows;
}

FeasibilityConstraint environment_constraint(const std::string& environment, int n, int k) {
  require_environment(environment);
  if (environment == "select-k") return FeasibilityConstraint::k_of_n(n, k);
  if (environment == "matroid") {
    std::vector<int> block_of(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) block_of[i] = i % k;
    return FeasibilityConstraint::partition_matroid(std::move(block_of), std::vector<int>(static_cast<std::size_t>(k), 1));
  }
  if (environment == "knapsack") {
    std::vector<double> sizes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sizes[i] = 1.0 + 0.5 * (i % 3);
    return FeasibilityConstraint::knapsack(std::move(sizes), 2.0 * k);
  }
  return FeasibilityConstraint::k_of_n(n, 1);
}

RatioEstimate measure_environment(const std::string& environment, int n, int k, const Distributions& dists,
                                  long long trials, std::uint64_t seed, int jobs, std::size_t resolution) {
  require_environment(environment);
  if (static_cast<int>(dists.size()) != n) throw DomainError("one distribution per agent expected");
  const auto constraint = environment_constraint(environment, n, k);
  const Bundles bundles = ironed_bundles(dists, resolution);
  Distributions virtual_dists;
  for (const auto& b : bundles) virtual_dists.push_back(virtual_distribution(b));

  MechanismPtr mech;
  if (environment == "select-k") {
    mech = virtual_transform(k_clock_da(constraint), bundles);
  } else if (environment == "matroid") {
    mech = virtual_transform(matroid_da(constraint), bundles);
  } else if (environment == "knapsack") {
    mech = virtual_transform(knapsack_da(constraint, virtual_dists, 10000, seed), bundles);
  } else if (environment == "online-oblivious") {
    mech = virtual_transform(prophet_posted_price(virtual_dists), bundles);
  } else if (environment == "online-sequential") {
    mech = virtual_transform(gsp_sequential(constraint, virtual_dists), bundles);
  } else {
    mech = iid_posted_price(bundles.front(), n);
  }
  return estimate_ratio([&](const std::vector<double>& values,
                            Rng& rng) { return run_da(*mech, values, rng).consumer_surplus; },
                        [&](const std::vector<double>& values, Rng&) { return omniscient_value(values, constraint); },
                        dists, trials, seed, jobs);
}

double verify_c_convexity(int n, std::size_t resolution) {
  if (n < 1) throw DomainError("n must be positive");
  if (resolution < 2) throw DomainError("grid resolution must be at least 2");
  auto c = [n](double q) { return 1.0 / geometric_sum(n, q); };
  double worst = 0.0;
  const double h = 1.0 / static_cast<double>(resolution);
  for (std::size_t i = 1; i < resolution; ++i) {
    const double q = static_cast<double>(i) * h;
    const double d2 = c(q - h) - 2.0 * c(q) + c(q + h);
    worst = std::min(worst, d2);
  }
  return worst;
}

namespace {

// (int_0^1 t P(t) dt, int_0^1 P(t) dt) by composite trapezoid.
std::pair<double, double> p_integrals(int n, std::size_t points) {
  const double h = 1.0 / static_cast<double>(points);
  double tp = 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i <= points; ++i) {
    const double t = (i == points) ? 1.0 : static_cast<double>(i) * h;
    const double w = (i == 0 || i == points) ? 0.5 : 1.0;
    const double pt = poly_p(n, t);
    tp += w * t * pt;
    p += w * pt;
  }
  return {tp * h, p * h};
}

}  // namespace

double verify_integral_identity(int n, double a, std::size_t points) {
  if (n < 1 || !(a >= 0.0)) throw DomainError("identity check needs n >= 1 and a >= 0");
  const auto [tp, p] = p_integrals(n, points);
  const double lhs = 1.0 + a + tp + a * p;
  return std::abs(lhs - (harmonic(n) + a * n));
}

IidWorstCase verify_iid_worstcase(int n, double a, std::size_t grid) {
  if (n < 1 || !(a >= 0.0)) throw DomainError("worst-case check needs n >= 1 and a >= 0");
  IidWorstCase r;
  r.n = n;
  r.a = a;
  const auto [tp, p] = p_integrals(n, 100000);
  r.surplus = 1.0 + a + tp + a * p;
  r.consumer_surplus = -1.0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double q = (i == grid) ? 1.0 : static_cast<double>(i) / static_cast<double>(grid);
    const double cs = geometric_sum(n, q) * (q + a);
    if (cs > r.consumer_surplus) {
      r.consumer_surplus = cs;
      r.best_quantile = q;
    }
  }
  r.ratio = r.surplus / r.consumer_surplus;
  r.bound = harmonic(n) + 1.0;
  return r;
}

}  // namespace pentest
