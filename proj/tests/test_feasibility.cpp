#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "pentest/errors.hpp"
#include "pentest/feasibility.hpp"

using namespace pentest;

namespace {

std::uint32_t mask_of(const Subset& s) {
  std::uint32_t m = 0;
  for (int i : s) m |= 1u << i;
  return m;
}

Subset subset_of(std::uint32_t mask, int n) {
  Subset s;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) s.push_back(i);
  }
  return s;
}

FeasibilityConstraint triangle() { return FeasibilityConstraint::graphic_matroid(3, {{0, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST(IsFeasible, Examples) {
  const auto k2 = FeasibilityConstraint::k_of_n(3, 2);
  EXPECT_TRUE(k2.is_feasible({0, 2}));
  EXPECT_FALSE(k2.is_feasible({0, 1, 2}));
  const auto ks = FeasibilityConstraint::knapsack({3, 4, 5}, 7);
  EXPECT_TRUE(ks.is_feasible({0, 1}));
  EXPECT_FALSE(ks.is_feasible({1, 2}));
  EXPECT_TRUE(FeasibilityConstraint::uniform_matroid(4, 2).is_feasible({1, 3}));
  EXPECT_TRUE(k2.is_feasible({}));
  EXPECT_THROW(k2.is_feasible({5}), DomainError);
}

TEST(IsFeasible, ExplicitFamily) {
  const auto closed = FeasibilityConstraint::explicit_family(3, {{0, 1}, {2}}, true);
  EXPECT_TRUE(closed.is_feasible({0}));
  EXPECT_FALSE(closed.is_feasible({0, 2}));
  const auto open = FeasibilityConstraint::explicit_family(3, {{0, 1}, {2}}, false);
  EXPECT_FALSE(open.is_feasible({0}));
  EXPECT_TRUE(open.in_downward_closure({0}));
  EXPECT_TRUE(open.is_feasible({0, 1}));
}

TEST(Construction, Invariants) {
  EXPECT_THROW(FeasibilityConstraint::k_of_n(3, 0), DomainError);
  EXPECT_THROW(FeasibilityConstraint::k_of_n(3, 4), DomainError);
  EXPECT_THROW(FeasibilityConstraint::knapsack({1.0, -1.0}, 2.0), DomainError);
  EXPECT_THROW(FeasibilityConstraint::knapsack({1.0}, 0.0), DomainError);
  EXPECT_THROW(FeasibilityConstraint::explicit_family(3, {}, true), DomainError);
  EXPECT_THROW(FeasibilityConstraint::explicit_family(21, {{0}}, true), DomainError);
  // Custom oracles are taken as given.
  const auto custom = FeasibilityConstraint::matroid(
      3, [](const Subset& s) { return std::min<int>(static_cast<int>(s.size()), 2); }, "custom");
  EXPECT_TRUE(custom.is_feasible({0, 2}));
  EXPECT_FALSE(custom.is_feasible({0, 1, 2}));
  EXPECT_EQ(custom.k(), 2);
}

TEST(FindCircuit, Examples) {
  const auto u1 = FeasibilityConstraint::uniform_matroid(3, 1);
  EXPECT_EQ(u1.find_circuit({0, 1}), (Subset{0, 1}));
  EXPECT_FALSE(u1.find_circuit({2}).has_value());
  EXPECT_EQ(triangle().find_circuit({0, 1, 2}), (Subset{0, 1, 2}));
  EXPECT_FALSE(triangle().find_circuit({0, 1}).has_value());
  EXPECT_THROW(FeasibilityConstraint::knapsack({1, 1}, 1).find_circuit({0, 1}), UnsupportedError);
}

TEST(FindCircuit, IsMinimalDependent) {
  // K4: 6 edges.
  const auto k4 = FeasibilityConstraint::graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    const Subset s = subset_of(mask, 6);
    const auto c = k4.find_circuit(s);
    ASSERT_EQ(c.has_value(), !k4.is_feasible(s));
    if (!c) continue;
    ASSERT_FALSE(k4.is_feasible(*c));
    ASSERT_EQ(mask_of(*c) & ~mask, 0u);
    for (std::size_t drop = 0; drop < c->size(); ++drop) {
      Subset smaller = *c;
      smaller.erase(smaller.begin() + static_cast<long>(drop));
      ASSERT_TRUE(k4.is_feasible(smaller));
    }
  }
}

TEST(MaxWeightFeasible, Examples) {
  auto s = FeasibilityConstraint::k_of_n(3, 2).max_weight_feasible({5, 1, 3});
  EXPECT_EQ(s.subset, (Subset{0, 2}));
  EXPECT_EQ(s.total, 8.0);
  s = FeasibilityConstraint::knapsack({3, 4, 5}, 7).max_weight_feasible({4, 5, 7});
  EXPECT_EQ(s.subset, (Subset{0, 1}));
  EXPECT_EQ(s.total, 9.0);
  s = triangle().max_weight_feasible({3, 2, 1});
  EXPECT_EQ(s.subset, (Subset{0, 1}));
  EXPECT_EQ(s.total, 5.0);
}

TEST(MaxWeightFeasible, TiesGoToLowestIndex) {
  const auto s = FeasibilityConstraint::k_of_n(4, 2).max_weight_feasible({1, 2, 2, 2});
  EXPECT_EQ(s.subset, (Subset{1, 2}));
}

TEST(MaxWeightFeasible, KnapsackMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> size(0.1, 3.0);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  std::uniform_int_distribution<int> count(1, 12);
  for (int inst = 0; inst < 1000; ++inst) {
    const int n = count(rng);
    std::vector<double> sizes(n);
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      sizes[i] = size(rng);
      w[i] = weight(rng);
      total += sizes[i];
    }
    const double cap = std::uniform_real_distribution<double>(0.2, total)(rng);
    const auto ks = FeasibilityConstraint::knapsack(sizes, cap);
    const auto sel = ks.max_weight_feasible(w);
    ASSERT_TRUE(ks.is_feasible(sel.subset));
    ASSERT_NEAR(sel.total, oracle::brute_force_knapsack(sizes, cap, w), 1e-9) << "instance " << inst;
  }
}

TEST(MaxWeightFeasible, MatroidGreedyMatchesEnumeration) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 1 + inst % 10;
    std::vector<FeasibilityConstraint> family;
    family.push_back(FeasibilityConstraint::uniform_matroid(n, 1 + inst % n));
    std::vector<int> block(n);
    for (int i = 0; i < n; ++i) block[i] = i % 3;
    family.push_back(FeasibilityConstraint::partition_matroid(block, {1, 2, 1}));
    std::vector<std::pair<int, int>> edges;
    std::uniform_int_distribution<int> vertex(0, 4);
    for (int i = 0; i < n; ++i) edges.emplace_back(vertex(rng), vertex(rng));
    family.push_back(FeasibilityConstraint::graphic_matroid(5, edges));
    std::vector<double> w(n);
    for (auto& x : w) x = weight(rng);
    for (const auto& c : family) {
      const auto sel = c.max_weight_feasible(w);
      const double best =
          oracle::brute_force_best(n, w, [&](std::uint32_t mask) { return c.is_feasible(subset_of(mask, n)); });
      ASSERT_NEAR(sel.total, best, 1e-9) << c.describe();
      ASSERT_TRUE(c.is_feasible(sel.subset));
    }
  }
}

TEST(MaxWeightFeasible, ExplicitFamilyEnumerates) {
  const auto c = FeasibilityConstraint::explicit_family(4, {{0, 1}, {2, 3}, {1, 2}}, false);
  const auto sel = c.max_weight_feasible({1, 4, 4, 2});
  EXPECT_EQ(sel.subset, (Subset{1, 2}));
  EXPECT_EQ(sel.total, 8.0);
}

TEST(MaxWeightFeasible, Errors) {
  EXPECT_THROW(FeasibilityConstraint::knapsack(std::vector<double>(31, 1.0), 5).max_weight_feasible(
                   std::vector<double>(31, 1.0)),
               SizeError);
  EXPECT_THROW(FeasibilityConstraint::k_of_n(3, 1).max_weight_feasible({1, 2}), DomainError);
}

TEST(PadToMaximal, Examples) {
  EXPECT_EQ(FeasibilityConstraint::k_of_n(5, 3).pad_to_maximal({1}), (Subset{0, 1, 2}));
  EXPECT_EQ(FeasibilityConstraint::k_of_n(5, 2).pad_to_maximal({3, 4}), (Subset{3, 4}));
  const auto fam = FeasibilityConstraint::explicit_family(3, {{0, 1}, {2}}, false);
  EXPECT_EQ(fam.pad_to_maximal({0}), (Subset{0, 1}));
  EXPECT_THROW(fam.pad_to_maximal({0, 2}), InfeasibleError);
}

TEST(PadToMaximal, NeverDecreasesWeightAndIsMaximal) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<FeasibilityConstraint> family{
      FeasibilityConstraint::k_of_n(8, 3),
      FeasibilityConstraint::knapsack({1, 2, 1.5, 0.5, 3, 1, 2, 1}, 4),
      FeasibilityConstraint::graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {0, 1}, {2, 3}}),
  };
  for (const auto& c : family) {
    const int n = c.n();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const Subset s = subset_of(mask, n);
      if (!c.is_feasible(s)) continue;
      const Subset padded = c.pad_to_maximal(s);
      ASSERT_TRUE(c.is_feasible(padded));
      ASSERT_EQ(mask_of(s) & ~mask_of(padded), 0u);
      for (int i = 0; i < n; ++i) {
        if (mask_of(padded) & (1u << i)) continue;
        Subset bigger = padded;
        bigger.push_back(i);
        std::sort(bigger.begin(), bigger.end());
        ASSERT_FALSE(c.is_feasible(bigger)) << c.describe();
      }
      std::vector<double> w(n);
      for (auto& x : w) x = unit(rng);
      double before = 0.0;
      double after = 0.0;
      for (int i : s) before += w[i];
      for (int i : padded) after += w[i];
      ASSERT_GE(after, before);
    }
  }
}

TEST(FeasibleCount, Formulas) {
  EXPECT_EQ(FeasibilityConstraint::k_of_n(5, 2).feasible_count(), 1u + 5u + 10u);
  EXPECT_EQ(FeasibilityConstraint::k_of_n(40, 1).feasible_count(), 41u);
  EXPECT_EQ(triangle().feasible_count(), 7u);
  EXPECT_EQ(FeasibilityConstraint::explicit_family(3, {{0, 1}, {2}}, false).feasible_count(), 2u);
  EXPECT_EQ(FeasibilityConstraint::explicit_family(3, {{0, 1}, {2}}, true).feasible_count(), 5u);
  EXPECT_THROW(FeasibilityConstraint::knapsack(std::vector<double>(25, 1.0), 3).feasible_count(), SizeError);
}

TEST(Loaders, GraphicCsvAndJsonFamily) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = dir / "pentest_edges.csv";
  {
    std::ofstream(csv) << "u,v\n0,1\n1,2\n0,2\n";
  }
  const auto g = FeasibilityConstraint::graphic_matroid_from_csv(csv);
  EXPECT_EQ(g.n(), 3);
  EXPECT_FALSE(g.is_feasible({0, 1, 2}));
  {
    std::ofstream(csv) << "0,1\nx,2\n";
  }
  EXPECT_THROW(FeasibilityConstraint::graphic_matroid_from_csv(csv), DomainError);
  std::filesystem::remove(csv);

  const auto json = dir / "pentest_family.json";
  {
    std::ofstream(json) << "[[0,1],[2]]";
  }
  const auto f = FeasibilityConstraint::explicit_family_from_json(json, true);
  EXPECT_EQ(f.n(), 3);
  EXPECT_TRUE(f.is_feasible({1}));
  {
    std::ofstream(json) << "{\"a\": 1}";
  }
  EXPECT_THROW(FeasibilityConstraint::explicit_family_from_json(json, true), DomainError);
  std::filesystem::remove(json);
}
