// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "pentest/bench.hpp"
#include "pentest/curves.hpp"
#include "pentest/feasibility.hpp"
#include "pentest/mechanisms.hpp"
#include "pentest/pensim.hpp"

using namespace pentest;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s [%s] (%.2fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Distributions mixed_suite(int n) {
  const std::vector<ValueDistribution> pool{
      ValueDistribution::exponential(1.0),
      ValueDistribution::uniform(0.0, 2.0),
      ValueDistribution::point_masses({3.0, 1.0, 0.5}, {0.2, 0.3, 0.5}),
      ValueDistribution::truncated_normal_approx(1.0, 0.5, 0.0, 3.0, 64),
      ValueDistribution::lognormal_approx(0.0, 0.75, 64),
      ValueDistribution::exponential(0.5),
  };
  Distributions out;
  for (int i = 0; i < n; ++i) out.push_back(pool[static_cast<std::size_t>(i) % pool.size()]);
  return out;
}

std::vector<double> sample_all(const Distributions& dists, Rng& rng) {
  std::vector<double> v(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) v[i] = dists[i].sample(rng);
  return v;
}

// 1 ------------------------------------------------------------------------
Verdict single_agent_tightness() {
  const auto expo = ironed_curves(ValueDistribution::exponential(1.0), 10000);
  double worst_exp = 0.0;
  for (std::size_t i = 1; i < expo.grid.size(); ++i) {
    const double q = expo.grid[i];
    worst_exp = std::max(worst_exp, std::abs(expo.V[i] / expo.U_ironed[i] - (1.0 - std::log(q))));
  }
  const std::vector<ValueDistribution> others{
      ValueDistribution::uniform(0.0, 1.0),
      ValueDistribution::truncated_normal_approx(1.0, 0.5, 0.0, 3.0, 200),
      ValueDistribution::truncated_normal_approx(0.0, 1.0, 0.0, 4.0, 200),
      ValueDistribution::lognormal_approx(0.0, 1.0, 200),
      ValueDistribution::lognormal_approx(0.5, 0.5, 200),
  };
  double worst_excess = -1e300;
  for (const auto& d : others) {
    const auto b = ironed_curves(d, 10000);
    for (std::size_t i = 1; i < b.grid.size(); ++i) {
      worst_excess = std::max(worst_excess, b.V[i] / b.U_ironed[i] - (1.0 - std::log(b.grid[i])));
    }
  }
  return {worst_exp <= 1e-9 && worst_excess <= 1e-6,
          fmt("exp max|V/Ubar-(1-ln q)|=%.3g; others max excess=%.3g", worst_exp, worst_excess)};
}

// 2 ------------------------------------------------------------------------
Verdict exponential_iid_single_item() {
  const int n = 10;
  const Distributions dists(n, ValueDistribution::exponential(1.0));
  const auto bundle = ironed_curves(dists[0]);
  const auto mech = iid_posted_price(bundle, n);
  const auto single = FeasibilityConstraint::k_of_n(n, 1);
  const auto est = estimate_ratio(
      [&](const std::vector<double>& v, Rng& rng) { return run_da(*mech, v, rng).consumer_surplus; },
      [&](const std::vector<double>& v, Rng&) { return omniscient_value(v, single); }, dists, 100000, 2024);
  const Bundles bundles(n, bundle);
  const auto cs = estimate_ratio([&](const std::vector<double>& v, Rng& rng) { return opt_cs_benchmark(single, bundles, v, rng); },
                                 [](const std::vector<double>&, Rng&) { return 1.0; }, dists, 100000, 2025);
  const double h10 = oracle::harmonic(10);
  const double rel = std::abs(est.ratio / h10 - 1.0);
  const double cs_rel = std::abs(cs.denominator_mean - 1.0);
  return {rel <= 0.03 && cs_rel <= 0.02,
          fmt("ratio=%.5f (H_10=%.5f, rel err %.4f); opt_cs mean=%.5f", est.ratio, h10, rel, cs.denominator_mean)};
}

// 3 ------------------------------------------------------------------------
Verdict batching_lower_bound() {
  const int n = 12;
  const int k = 3;
  std::vector<int> block_of(n);
  for (int i = 0; i < n; ++i) block_of[i] = i / (n / k);
  const auto batches = FeasibilityConstraint::partition_matroid(block_of, std::vector<int>(k, 1));
  const auto mech = matroid_da(batches);
  const Distributions dists(n, ValueDistribution::exponential(1.0));
  const Bundles bundles(n, ironed_curves(dists[0]));
  const auto k_of_n = FeasibilityConstraint::k_of_n(n, k);
  const auto est = estimate_ratio([&](const std::vector<double>& v, Rng& rng) { return opt_cs_benchmark(k_of_n, bundles, v, rng); },
                                  [&](const std::vector<double>& v, Rng& rng) { return run_da(*mech, v, rng).surplus; },
                                  dists, 100000, 33);
  const double target = k * oracle::harmonic(n / k);
  const double surplus = est.numerator_mean;
  const double cs = est.denominator_mean;
  return {std::abs(surplus / target - 1.0) <= 0.03 && std::abs(cs / k - 1.0) <= 0.02,
          fmt("batch surplus=%.4f (k*H_4=%.4f); opt_cs=%.4f (k=%d)", surplus, target, cs, k)};
}

// 4 ------------------------------------------------------------------------
Verdict knapsack_two_branch() {
  Rng rng(404);
  std::uniform_real_distribution<double> size_dist(0.2, 2.0);
  std::uniform_real_distribution<double> mean_dist(0.3, 3.0);
  std::uniform_int_distribution<int> n_dist(2, 12);
  int violations = 0;
  double worst_ratio = 0.0;
  double worst_ci = 0.0;
  bool expected_ok = true;
  for (int inst = 0; inst < 1000; ++inst) {
    const int n = n_dist(rng);
    std::vector<double> sizes(n);
    double total = 0.0;
    for (auto& s : sizes) total += (s = size_dist(rng));
    // At least one item fits, otherwise every allocation is empty.
    const double smallest = *std::min_element(sizes.begin(), sizes.end());
    const double capacity = std::uniform_real_distribution<double>(smallest, total)(rng);
    const auto knap = FeasibilityConstraint::knapsack(sizes, capacity);
    Distributions dists;
    for (int i = 0; i < n; ++i) dists.push_back(ValueDistribution::exponential(mean_dist(rng)));
    for (int r = 0; r < 20; ++r) {
      const auto values = sample_all(dists, rng);
      const double opt = oracle::brute_force_knapsack(sizes, capacity, values);
      const double two = knapsack_greedy_prefix(knap, values).total + knapsack_max_item(knap, values).total;
      if (two < opt) ++violations;
    }
    if (inst % 50 == 0) {
      const auto mech = knapsack_da(knap, dists, 2000, 7 + inst);
      const auto est = estimate_ratio([&](const std::vector<double>& v, Rng& g) { return run_da(*mech, v, g).surplus; },
                                      [&](const std::vector<double>& v, Rng&) { return oracle::brute_force_knapsack(sizes, capacity, v); },
                                      dists, 4000, 900 + inst);
      if (est.ratio > worst_ratio) {
        worst_ratio = est.ratio;
        worst_ci = est.confidence_halfwidth;
      }
      if (est.ratio > 2.0 + est.confidence_halfwidth) expected_ok = false;
    }
  }
  return {violations == 0 && expected_ok,
          fmt("pointwise violations=%d over 20000 realizations; worst E[OPT]/E[mech]=%.4f (ci %.4f) over 20 instances",
              violations, worst_ratio, worst_ci)};
}

// 5 ------------------------------------------------------------------------
Verdict transform_exactness() {
  Rng rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  double worst_uv = 0.0;
  int instances = 0;
  for (int inst = 0; inst < 40; ++inst) {
    std::vector<std::vector<double>> vals(3);
    std::vector<std::vector<double>> probs(3);
    Distributions dists;
    for (int a = 0; a < 3; ++a) {
      std::vector<double> raw(4);
      for (auto& x : raw) x = 10.0 * u01(rng);
      if (inst % 4 == 0) raw[3] = 0.0;
      std::sort(raw.rbegin(), raw.rend());
      std::vector<double> p(4);
      double s = 0.0;
      for (auto& x : p) s += (x = 0.05 + u01(rng));
      for (auto& x : p) x /= s;
      vals[a] = raw;
      probs[a] = p;
      dists.push_back(ValueDistribution::point_masses(raw, p));
    }
    const Bundles bundles = ironed_bundles(dists);
    std::vector<std::vector<double>> uv(3);
    for (int a = 0; a < 3; ++a) {
      uv[a] = oracle::discrete_ironed_virtual_values(vals[a], probs[a]);
      for (int j = 0; j < 4; ++j) {
        worst_uv = std::max(worst_uv, std::abs(uv[a][j] - ironed_virtual_value(bundles[a], vals[a][j])));
      }
    }
    const auto base = k_clock_da(1, 3);
    const auto transformed = virtual_transform(base, bundles);
    double cs = 0.0;
    double virtual_surplus = 0.0;
    for (int x = 0; x < 64; ++x) {
      const int j[3] = {x & 3, (x >> 2) & 3, (x >> 4) & 3};
      const double p = probs[0][j[0]] * probs[1][j[1]] * probs[2][j[2]];
      const std::vector<double> values{vals[0][j[0]], vals[1][j[1]], vals[2][j[2]]};
      const std::vector<double> virt{uv[0][j[0]], uv[1][j[1]], uv[2][j[2]]};
      Rng r1(1);
      Rng r2(1);
      cs += p * run_da(*transformed, values, r1).consumer_surplus;
      for (int w : run_da(*base, virt, r2).winners) virtual_surplus += p * virt[w];
    }
    worst = std::max(worst, std::abs(cs - virtual_surplus));
    ++instances;
  }
  return {worst <= 1e-12 && worst_uv <= 1e-9,
          fmt("%d instances x 64 profiles: max |E[CS] - E[virtual surplus]|=%.3g; max |ubar - oracle|=%.3g", instances,
              worst, worst_uv)};
}

// 6 ------------------------------------------------------------------------
Verdict pen_equivalence() {
  const int n = 6;
  const auto dists = mixed_suite(n);
  const auto knap = environment_constraint("knapsack", n, 1);
  const auto graph = FeasibilityConstraint::graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto k_of_n = FeasibilityConstraint::k_of_n(n, 2);
  struct Case {
    const char* label;
    FeasibilityConstraint constraint;
    MechanismPtr mech;
  };
  const std::vector<Case> cases{
      {"k-of-n", k_of_n, k_clock_da(k_of_n)},
      {"k-of-n transformed", k_of_n, virtual_transform(k_clock_da(k_of_n), ironed_bundles(dists, 2000))},
      {"graphic matroid", graph, matroid_da(graph)},
      {"knapsack", knap, knapsack_da(knap, dists, 2000, 11)},
  };
  long long checked = 0;
  long long mismatches = 0;
  for (const auto& c : cases) {
    for (long long t = 0; t < 10000; ++t) {
      Rng draw = trial_rng(66, static_cast<std::uint64_t>(t));
      const auto values = sample_all(dists, draw);
      Rng r1 = draw;
      Rng r2 = draw;
      const Outcome da = run_da(*c.mech, values, r1);
      const PenRun pen = run_pen_algorithm(*c.mech, values, c.constraint, r2, true);
      ++checked;
      if (pen.chosen_before_padding != da.winners || pen.total_residual_before_padding != da.consumer_surplus ||
          pen.total_residual < pen.total_residual_before_padding) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%lld paired runs over 4 mechanisms, %lld mismatches", checked, mismatches)};
}

// 7 ------------------------------------------------------------------------
Verdict ironing_correctness() {
  const std::vector<ValueDistribution> suite{
      ValueDistribution::uniform(0.0, 1.0),
      ValueDistribution::exponential(1.0),
      ValueDistribution::point_masses({10.0, 1.0, 0.9, 0.0}, {0.05, 0.45, 0.3, 0.2}),
      ValueDistribution::piecewise_linear({0.0, 0.1, 0.2, 1.0}, {5.0, 4.9, 1.0, 0.0}),
      ValueDistribution::truncated_normal_approx(1.0, 0.5, 0.0, 3.0, 64),
      ValueDistribution::lognormal_approx(0.0, 1.0, 64),
  };
  double worst_d2 = -1e300;
  double worst_below = 0.0;
  for (const auto& d : suite) {
    const auto b = ironed_curves(d, 10000);
    for (std::size_t i = 1; i + 1 < b.grid.size(); ++i) {
      worst_d2 = std::max(worst_d2, b.U_ironed[i - 1] - 2.0 * b.U_ironed[i] + b.U_ironed[i + 1]);
    }
    for (std::size_t i = 0; i < b.grid.size(); ++i) worst_below = std::max(worst_below, b.U[i] - b.U_ironed[i]);
  }
  const auto uni = ironed_curves(ValueDistribution::uniform(0.0, 1.0), 10000);
  double chord = 0.0;
  for (std::size_t i = 0; i < uni.grid.size(); ++i) chord = std::max(chord, std::abs(uni.U_ironed[i] - uni.grid[i] / 2.0));
  return {worst_d2 <= 1e-12 && worst_below <= 0.0 && chord <= 1e-9,
          fmt("max second difference=%.3g; max(U-Ubar)=%.3g; uniform |Ubar-q/2|=%.3g", worst_d2, worst_below, chord)};
}

// 8 ------------------------------------------------------------------------
Verdict buffering_inequality() {
  bool ok = true;
  std::string detail;
  for (int n : {3, 5}) {
    const auto dists = mixed_suite(n);
    const auto single = FeasibilityConstraint::k_of_n(n, 1);
    for (double eps : {0.01, 0.03}) {
      const double factor = (1.0 - eps / (1.0 - eps)) * (1.0 - eps) * (1.0 - 2.0 * n * eps);
      const auto est = estimate_ratio(
          [&](Rng& rng) {
            std::vector<double> q(static_cast<std::size_t>(n));
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
              q[i] = uniform01_open(rng);
              v[i] = dists[i].inverse_demand(q[i]);
            }
            return PairedSample{single.max_weight_feasible(v).total, buffered_opt_surplus(single, dists, q, eps).total};
          },
          100000, 800 + n);
      // surplus(M) >= factor * OPT  <=>  OPT/M <= 1/factor.
      const bool pass = est.ratio <= 1.0 / factor + est.confidence_halfwidth;
      ok = ok && pass;
      detail += fmt("n=%d eps=%.2f: OPT/M=%.4f<=%.4f; ", n, eps, est.ratio, 1.0 / factor);
    }
  }
  return {ok, detail};
}

// 9 ------------------------------------------------------------------------
Verdict gsp_versus_ear() {
  bool ok = true;
  std::string detail;
  const int n = 6;
  const auto dists = mixed_suite(n);
  for (int k : {1, 2}) {
    const auto k_of_n = FeasibilityConstraint::k_of_n(n, k);
    const auto q = water_filling(dists, k);
    const double ear = ear_value(q, dists);
    const auto mech = gsp_sequential(k_of_n, dists, q);
    const auto est = estimate_ratio([&](const std::vector<double>& v, Rng& rng) { return run_da(*mech, v, rng).surplus; },
                                    [&](const std::vector<double>&, Rng&) { return ear; }, dists, 100000, 900 + k);
    const double need = 1.0 - 1.0 / std::sqrt(2.0 * std::numbers::pi * k);
    const double ci_mean = est.confidence_halfwidth * est.denominator_mean * est.denominator_mean / ear;
    const bool pass = est.denominator_mean >= need * ear - ci_mean;
    ok = ok && pass;
    detail += fmt("k=%d: GSP=%.4f, (1-1/sqrt(2 pi k)) EAR=%.4f; ", k, est.denominator_mean, need * ear);
  }
  return {ok, detail};
}

// 10 -----------------------------------------------------------------------
Verdict prophet_rule() {
  bool ok = true;
  double worst = 0.0;
  const std::vector<std::function<ValueDistribution(int)>> suites{
      [](int) { return ValueDistribution::uniform(0.0, 1.0); },
      [](int i) { return ValueDistribution::exponential(0.5 + 0.25 * (i % 4)); },
      [](int i) {
        return i % 2 ? ValueDistribution::point_masses({8.0, 0.5}, {0.05, 0.95})
                     : ValueDistribution::lognormal_approx(0.0, 0.8, 64);
      },
  };
  int label = 0;
  for (const auto& make : suites) {
    ++label;
    for (int n : {2, 5, 20}) {
      Distributions dists;
      for (int i = 0; i < n; ++i) dists.push_back(make(i));
      const auto single = FeasibilityConstraint::k_of_n(n, 1);
      const auto mech = prophet_posted_price(dists);
      const auto est = estimate_ratio([&](const std::vector<double>& v, Rng& rng) { return run_da(*mech, v, rng).surplus; },
                                      [&](const std::vector<double>& v, Rng&) { return single.max_weight_feasible(v).total; },
                                      dists, 100000, 1000 + 10 * label + n);
      worst = std::max(worst, est.ratio);
      ok = ok && est.ratio <= 2.0 + est.confidence_halfwidth;
    }
  }
  return {ok, fmt("worst E[max]/E[prophet surplus]=%.4f over 3 suites x n in {2,5,20}", worst)};
}

// 11 -----------------------------------------------------------------------
Verdict bound_calculators() {
  std::vector<double> ratios;
  for (long long n : {100LL, 1000LL, 10000LL, 100000LL, 1000000LL}) {
    const double eps = 1.0 / (static_cast<double>(n) * std::log(static_cast<double>(n)));
    ratios.push_back(zeta_upper_general(n, eps) / std::log(static_cast<double>(n)));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) decreasing = decreasing && ratios[i] < ratios[i - 1];
  decreasing = decreasing && ratios.back() > 1.0;
  // k/n on a 100-point grid; k = j, n = 100 with the normalized bound.
  double upper_over_lower = 0.0;
  double prior_over_ours = 1e300;
  for (int j = 1; j <= 100; ++j) {
    const long long n = 100;
    const long long k = j;
    const double r = static_cast<double>(n) / static_cast<double>(k);
    const double ours = zeta_upper_kid_normalized(n, k, zeta_kid_auto_eps(n, k));
    upper_over_lower = std::max(upper_over_lower, ours / (0.577 + std::log(r)));
    prior_over_ours = std::min(prior_over_ours, (2.0 / std::numbers::ln2) * (std::numbers::ln2 + std::log(r)) / ours);
  }
  return {decreasing && upper_over_lower <= 2.27 && prior_over_ours >= 1.36,
          fmt("zeta/ln n: %.4f %.4f %.4f %.4f %.4f; max upper/lower=%.5f; min prior/ours=%.5f", ratios[0], ratios[1],
              ratios[2], ratios[3], ratios[4], upper_over_lower, prior_over_ours)};
}

// 12 -----------------------------------------------------------------------
Verdict supporting_lemmas() {
  double worst_convexity = 0.0;
  for (int n : {1, 2, 10, 100}) worst_convexity = std::min(worst_convexity, verify_c_convexity(n, 10000));
  double worst_identity = 0.0;
  for (int n : {1, 5, 10}) {
    for (double a : {0.0, 0.05, 1.0 / n}) worst_identity = std::max(worst_identity, verify_integral_identity(n, a));
  }
  return {worst_convexity >= -1e-9 && worst_identity < 1e-6,
          fmt("min second difference=%.3g; max identity error=%.3g", worst_convexity, worst_identity)};
}

// 13 -----------------------------------------------------------------------
Verdict iid_direct_bound() {
  double worst_margin = -1e300;
  int points = 0;
  for (int n : {2, 5, 10, 50}) {
    std::vector<double> as;
    for (int i = 0; i <= 200; ++i) as.push_back(0.01 * i);
    for (double f : {0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 2.0}) as.push_back(f / n);
    for (double a : as) {
      const auto r = verify_iid_worstcase(n, a);
      worst_margin = std::max(worst_margin, r.ratio - (oracle::harmonic(n) + 1.0));
      ++points;
    }
  }
  return {worst_margin <= 1e-6, fmt("%d (n, a) points; max ratio - (H_n + 1)=%.4g", points, worst_margin)};
}

}  // namespace

int main() {
  report(1, "single-agent surplus over ironed consumer surplus", single_agent_tightness);
  report(2, "exponential IID single item ratio", exponential_iid_single_item);
  report(3, "k identical goods batching lower bound", batching_lower_bound);
  report(4, "knapsack two-branch approximation", knapsack_two_branch);
  report(5, "virtual pricing transform exactness", transform_exactness);
  report(6, "pen simulation and DA equivalence", pen_equivalence);
  report(7, "ironing correctness", ironing_correctness);
  report(8, "epsilon buffering inequality", buffering_inequality);
  report(9, "sequential posted prices versus ex-ante relaxation", gsp_versus_ear);
  report(10, "median threshold prophet rule", prophet_rule);
  report(11, "bound calculators", bound_calculators);
  report(12, "convexity and integral identity lemmas", supporting_lemmas);
  report(13, "IID direct bound on linear curves", iid_direct_bound);
  return failures == 0 ? 0 : 1;
}
