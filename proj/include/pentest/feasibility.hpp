#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pentest {

/// Sorted, duplicate-free agent indices (0-based).
using Subset = std::vector<int>;

/// Matroid rank function. Must be a pure function of its argument.
using RankOracle = std::function<int(const Subset&)>;

enum class ConstraintKind { kKofN, kMatroid, kKnapsack, kExplicitFamily };

struct Selection {
  Subset subset;
  double total = 0.0;
};

/// A family of feasible agent subsets over agents 0..n-1.
class FeasibilityConstraint {
 public:
  static FeasibilityConstraint k_of_n(int n, int k);
  /// Matroid from an arbitrary rank oracle. No axiom checks are run.
  static FeasibilityConstraint matroid(int n, RankOracle rank, std::string label = "matroid");
  static FeasibilityConstraint uniform_matroid(int n, int rank);
  /// `block_of[i]` is the block of agent i; at most `capacity[b]` agents of
  /// block b may be selected together.
  static FeasibilityConstraint partition_matroid(std::vector<int> block_of, std::vector<int> capacity);
  /// Agents are the edges of a multigraph on `vertices` nodes; a set is
  /// independent iff it is a forest.
  static FeasibilityConstraint graphic_matroid(int vertices, std::vector<std::pair<int, int>> edges);
  /// Edge list CSV `u,v` (0-based vertices); a non-numeric first line is a header.
  static FeasibilityConstraint graphic_matroid_from_csv(const std::filesystem::path& path);
  static FeasibilityConstraint knapsack(std::vector<double> sizes, double capacity);
  /// Listed subsets, n <= 20. With `downward_closed`, every subset of a
  /// listed set is feasible too.
  static FeasibilityConstraint explicit_family(int n, std::vector<Subset> sets, bool downward_closed);
  /// JSON array of index arrays. n defaults to 1 + the largest index.
  static FeasibilityConstraint explicit_family_from_json(const std::filesystem::path& path, bool downward_closed,
                                                         int n = 0);

  ConstraintKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  /// Cardinality bound for k-of-n, matroid rank of the ground set otherwise
  /// (matroids only).
  int k() const noexcept { return k_; }
  const std::vector<double>& sizes() const noexcept { return sizes_; }
  double capacity() const noexcept { return capacity_; }
  bool downward_closed() const noexcept { return downward_closed_; }
  bool is_matroid() const noexcept { return kind_ == ConstraintKind::kKofN || kind_ == ConstraintKind::kMatroid; }
  const std::string& label() const noexcept { return label_; }
  std::string describe() const;

  /// Matroid rank (k-of-n and matroids only).
  int rank(const Subset& s) const;

  bool is_feasible(const Subset& s) const;
  /// Membership in the downward closure of the family.
  bool in_downward_closure(const Subset& s) const;

  /// A minimal dependent subset of `s`, or nullopt when `s` is independent.
  /// Throws UnsupportedError for non-matroid constraints.
  std::optional<Subset> find_circuit(const Subset& s) const;

  /// Feasible subset of maximum total weight. Agents with weight <= 0 are
  /// never selected. Ties prefer smaller `priority` values, then lower
  /// index; an empty `priority` means index order. Knapsack instances with
  /// n > 30 throw SizeError.
  Selection max_weight_feasible(const std::vector<double>& weights, const std::vector<double>& priority = {}) const;

  /// Number of feasible subsets (including the empty set). Exact for
  /// k-of-n and for n <= 20; SizeError otherwise.
  std::uint64_t feasible_count() const;

  /// Lowest-index augmentation of `s` to a maximal feasible set. Throws
  /// InfeasibleError when `s` is outside the downward closure.
  Subset pad_to_maximal(const Subset& s) const;

 private:
  FeasibilityConstraint() = default;
  Subset normalize(const Subset& s) const;
  std::uint32_t mask_of(const Subset& s) const;
  void spot_check_matroid_axioms() const;

  ConstraintKind kind_ = ConstraintKind::kKofN;
  int n_ = 0;
  int k_ = 0;
  std::string label_;
  RankOracle rank_;
  std::vector<double> sizes_;
  double capacity_ = 0.0;
  std::vector<std::uint32_t> family_;
  bool downward_closed_ = true;
};

}  // namespace pentest
