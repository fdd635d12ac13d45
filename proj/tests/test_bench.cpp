#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pentest/bench.hpp"
#include "pentest/errors.hpp"
#include "pentest/pensim.hpp"

using namespace pentest;

namespace {

double max_of(const std::vector<double>& v, Rng&) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST(EstimateRatio, IdenticalStatisticsGiveOne) {
  const Distributions dists(3, ValueDistribution::exponential(1.0));
  const auto r = estimate_ratio(max_of, max_of, dists, 5000, 1);
  EXPECT_EQ(r.ratio, 1.0);
  EXPECT_EQ(r.confidence_halfwidth, 0.0);
  EXPECT_EQ(r.trials, 5000);
  EXPECT_EQ(r.seed, 1u);
}

TEST(EstimateRatio, OmniscientMeanOfTwoUniforms) {
  const Distributions dists(2, ValueDistribution::uniform(0.0, 1.0));
  const auto c = FeasibilityConstraint::k_of_n(2, 1);
  const auto omni = [&](const std::vector<double>& v, Rng&) { return omniscient_value(v, c); };
  const auto one = [](const std::vector<double>&, Rng&) { return 1.0; };
  const auto r = estimate_ratio(one, omni, dists, 200000, 3);
  EXPECT_NEAR(r.numerator_mean, 2.0 / 3.0, 0.01 * 2.0 / 3.0);
}

TEST(EstimateRatio, Errors) {
  const Distributions dists(2, ValueDistribution::uniform(0.0, 1.0));
  const auto zero = [](const std::vector<double>&, Rng&) { return 0.0; };
  EXPECT_THROW(estimate_ratio(zero, max_of, dists, 100, 1), DegenerateInstanceError);
  EXPECT_THROW(estimate_ratio(max_of, max_of, dists, 0, 1), DomainError);
}

TEST(EstimateRatio, IndependentOfJobs) {
  const Distributions dists{ValueDistribution::exponential(1.0), ValueDistribution::uniform(0.0, 2.0),
                            ValueDistribution::exponential(0.5)};
  const auto second = [](const std::vector<double>& v, Rng& rng) {
    auto s = v;
    std::sort(s.begin(), s.end());
    return s[1] + 0.01 * uniform01(rng);
  };
  const auto a = estimate_ratio(second, max_of, dists, 3001, 11, 1);
  const auto b = estimate_ratio(second, max_of, dists, 3001, 11, 4);
  EXPECT_EQ(a.ratio, b.ratio);
  EXPECT_EQ(a.confidence_halfwidth, b.confidence_halfwidth);
  EXPECT_EQ(a.numerator_mean, b.numerator_mean);
}

TEST(EstimateRatio, SummarizeDeltaMethod) {
  const std::vector<PairedSample> s{{2.0, 1.0}, {4.0, 1.0}, {3.0, 2.0}};
  const auto r = summarize(s, 0);
  EXPECT_DOUBLE_EQ(r.ratio, 9.0 / 4.0);
  // Residuals x - R y: 2 - 2.25, 4 - 2.25, 3 - 4.5.
  const double ss = 0.0625 + 3.0625 + 2.25;
  const double expect = 1.959963984540054 * std::sqrt(ss / 2.0 / 3.0) / (4.0 / 3.0);
  EXPECT_NEAR(r.confidence_halfwidth, expect, 1e-12);
}

TEST(Harmonic, Examples) {
  EXPECT_NEAR(harmonic_lower_bound(3, 1), 11.0 / 6.0, 1e-15);
  EXPECT_EQ(harmonic_lower_bound(7, 7), 1.0);
  EXPECT_EQ(harmonic_lower_bound(7, 2), harmonic(3));
  EXPECT_NEAR(harmonic(10), oracle::harmonic(10), 1e-15);
}

TEST(Harmonic, EulerInequality) {
  double h = 0.0;
  for (long long m = 1; m <= 1000000; ++m) {
    h += 1.0 / static_cast<double>(m);
    ASSERT_GE(h, 0.577 + std::log(static_cast<double>(m))) << m;
  }
  EXPECT_NEAR(harmonic(1000000), h, 1e-9);
}

TEST(Zeta, GeneralExamples) {
  const double eps = 1.0 / (10.0 * std::log(10.0));
  const double expect = (1 - std::log(eps)) / ((1 - eps / (1 - eps)) * (1 - eps) * (1 - 20 * eps));
  EXPECT_NEAR(zeta_upper_general(10, eps), expect, 1e-12);
  EXPECT_GT(zeta_upper_general(10, 0.05 - 1e-12), 1e9);
  EXPECT_THROW(zeta_upper_general(10, 0.05), DomainError);
  EXPECT_THROW(zeta_upper_general(10, 0.0), DomainError);
}

TEST(Zeta, GeneralOverLogDecreasesTowardOne) {
  double prev = kUnbounded;
  for (long long n : {100LL, 1000LL, 10000LL, 100000LL, 1000000LL}) {
    const auto z = zeta_upper_general_auto(n);
    EXPECT_FALSE(z.numeric);
    const double r = z.value / std::log(static_cast<double>(n));
    EXPECT_LT(r, prev);
    EXPECT_GT(r, 1.0);
    prev = r;
  }
  EXPECT_LT(prev, 1.5);
}

TEST(Zeta, SmallNUsesNumericEpsilon) {
  for (long long n = 2; n < 8; ++n) {
    const auto z = zeta_upper_general_auto(n);
    EXPECT_TRUE(z.numeric);
    EXPECT_LT(z.eps, 1.0 / (2.0 * n));
    // A local optimum: nearby eps do no better.
    EXPECT_LE(z.value, zeta_upper_general(n, z.eps * 1.01) + 1e-9);
    EXPECT_LE(z.value, zeta_upper_general(n, z.eps * 0.99) + 1e-9);
  }
}

TEST(Zeta, KidExamples) {
  for (long long n : {1LL, 4LL, 20LL}) {
    const double eps = zeta_kid_auto_eps(n, n);
    EXPECT_EQ(eps, 1.0);
    EXPECT_NEAR(zeta_upper_kid(n, n, eps), 1.0 / (1.0 - 1.0 / std::sqrt(2 * std::numbers::pi * n)), 1e-12);
  }
  double prev = kUnbounded;
  for (long long r : {100LL, 10000LL, 1000000LL, 1000000000000LL}) {
    const double v = zeta_upper_kid_normalized(r, 1, zeta_kid_auto_eps(r, 1)) / std::log(static_cast<double>(r));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1.25);
}

TEST(Zeta, FigureConstants) {
  double worst = 0.0;
  double least = kUnbounded;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    worst = std::max(worst, kid_upper_over_lower(x));
    least = std::min(least, prior_bound_over_kid_upper(x));
  }
  EXPECT_LT(worst, 2.27);
  EXPECT_GT(least, 1.36);
}

TEST(Table1, Rows) {
  const auto rows = table1_report(supported_environments(), 100, 1);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    if (r.pi_source == "gamma*zeta") EXPECT_NEAR(r.pi_upper, r.gamma * r.zeta_upper, 1e-12);
    EXPECT_GE(r.zeta_upper, r.zeta_lower);
    if (r.environment == "knapsack") {
      EXPECT_EQ(r.gamma, 2.0);
    } else if (r.environment == "online-sequential") {
      EXPECT_NEAR(r.gamma, std::numbers::e / (std::numbers::e - 1.0), 1e-15);
    } else if (r.environment == "online-iid") {
      EXPECT_EQ(r.pi_source, "H_n+1");
      EXPECT_NEAR(r.pi_upper, harmonic(100) + 1.0, 1e-12);
    }
  }
  EXPECT_THROW(table1_report({"bogus"}, 10, 1), DomainError);
}

TEST(Lemmas, Convexity) {
  EXPECT_NEAR(verify_c_convexity(1), 0.0, 1e-15);
  EXPECT_GE(verify_c_convexity(2), -1e-12);
  EXPECT_GE(verify_c_convexity(100, 10000), -1e-9);
}

TEST(Lemmas, IntegralIdentity) {
  EXPECT_EQ(verify_integral_identity(1, 0.0), 0.0);
  EXPECT_LT(verify_integral_identity(5, 0.1), 1e-6);
  EXPECT_LT(verify_integral_identity(10, 0.1), 1e-6);
}

TEST(Lemmas, IidWorstCase) {
  for (int n : {2, 5, 10}) {
    const auto zero = verify_iid_worstcase(n, 0.0);
    EXPECT_NEAR(zero.surplus, harmonic(n), 1e-6);
    for (double a : {0.5 / n, 2.0 / n}) {
      const auto w = verify_iid_worstcase(n, a);
      EXPECT_NEAR(w.surplus, harmonic(n) + a * n, 1e-6);
      EXPECT_LE(w.ratio, w.bound);
      if (a < 1.0 / n) EXPECT_GE(w.consumer_surplus, 1.0 - 1e-12);
      if (a >= 1.0 / n) EXPECT_GE(w.consumer_surplus, n * a - 1e-9);
    }
  }
}

TEST(Measure, IidExponentialMatchesHarmonic) {
  for (int n : {5, 10, 50}) {
    const Distributions dists(n, ValueDistribution::exponential(1.0));
    const auto r = measure_environment("online-iid", n, 1, dists, 100000, 2024);
    EXPECT_GE(r.ratio, 0.97 * harmonic(n)) << n;
    EXPECT_LE(r.ratio, 1.03 * harmonic(n)) << n;
  }
}

TEST(Measure, WithinUpperBounds) {
  const int n = 6;
  const int k = 2;
  const Distributions mixed{ValueDistribution::exponential(1.0),
                            ValueDistribution::uniform(0.0, 2.0),
                            ValueDistribution::point_masses({3.0, 1.0, 0.5}, {0.2, 0.3, 0.5}),
                            ValueDistribution::truncated_normal_approx(1.0, 0.5, 0.0, 3.0, 64),
                            ValueDistribution::lognormal_approx(0.0, 0.75, 64),
                            ValueDistribution::exponential(0.5)};
  const Distributions iid(n, ValueDistribution::uniform(0.0, 1.0));
  for (const auto& env : supported_environments()) {
    const auto& dists = env == "online-iid" ? iid : mixed;
    const int kk = env == "select-k" || env == "matroid" || env == "knapsack" ? k : 1;
    const auto bound = table1_report({env}, n, kk).front();
    const auto r = measure_environment(env, n, kk, dists, 4000, 77, 1, 2000);
    EXPECT_LE(r.ratio, bound.pi_upper + r.confidence_halfwidth) << env;
    EXPECT_GE(r.ratio, 1.0 - r.confidence_halfwidth) << env;
  }
  EXPECT_THROW(measure_environment("bogus", n, 1, mixed, 10, 1), DomainError);
}
