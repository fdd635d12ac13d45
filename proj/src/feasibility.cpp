#include "pentest/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pentest/errors.hpp"
#include "pentest/random.hpp"

namespace pentest {

namespace {

constexpr int kMaxExplicitAgents = 20;
constexpr int kMaxKnapsackAgents = 30;

struct UnionFind {
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<int> parent;
};

Subset with_element(Subset s, int e) {
  s.insert(std::lower_bound(s.begin(), s.end(), e), e);
  return s;
}

Subset without_element(const Subset& s, int e) {
  Subset out;
  out.reserve(s.size());
  for (int x : s) {
    if (x != e) out.push_back(x);
  }
  return out;
}

// Agents ordered by weight descending, then priority ascending, then index.
std::vector<int> weight_order(const std::vector<double>& weights, const std::vector<double>& priority) {
  std::vector<int> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    if (!priority.empty() && priority[a] != priority[b]) return priority[a] < priority[b];
    return a < b;
  });
  return order;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return r;
}

Subset subset_of_mask(std::uint32_t mask) {
  Subset s;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) s.push_back(i);
  }
  return s;
}

}  // namespace

FeasibilityConstraint FeasibilityConstraint::k_of_n(int n, int k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("k-of-n requires 1 <= k <= n");
  FeasibilityConstraint c;
  c.kind_ = ConstraintKind::kKofN;
  c.n_ = n;
  c.k_ = k;
  c.label_ = "k_of_n";
  return c;
}

FeasibilityConstraint FeasibilityConstraint::matroid(int n, RankOracle rank, std::string label) {
  if (n < 1 || !rank) throw DomainError("matroid needs n >= 1 and a rank oracle");
  FeasibilityConstraint c;
  c.kind_ = ConstraintKind::kMatroid;
  c.n_ = n;
  c.rank_ = std::move(rank);
  c.label_ = std::move(label);
  Subset all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  c.k_ = c.rank_(all);
  return c;
}

FeasibilityConstraint FeasibilityConstraint::uniform_matroid(int n, int rank) {
  if (rank < 0 || rank > n) throw DomainError("uniform matroid rank must lie in [0, n]");
  auto c = matroid(n, [rank](const Subset& s) { return std::min<int>(rank, static_cast<int>(s.size())); },
                   "uniform_matroid");
  c.spot_check_matroid_axioms();
  return c;
}

FeasibilityConstraint FeasibilityConstraint::partition_matroid(std::vector<int> block_of, std::vector<int> capacity) {
  const int n = static_cast<int>(block_of.size());
  for (int b : block_of) {
    if (b < 0 || b >= static_cast<int>(capacity.size())) throw DomainError("partition block index out of range");
  }
  for (int cap : capacity) {
    if (cap < 0) throw DomainError("partition capacities must be non-negative");
  }
  auto c = matroid(
      n,
      [block_of, capacity](const Subset& s) {
        std::vector<int> count(capacity.size(), 0);
        for (int i : s) ++count[block_of[i]];
        int r = 0;
        for (std::size_t b = 0; b < capacity.size(); ++b) r += std::min(count[b], capacity[b]);
        return r;
      },
      "partition_matroid");
  c.spot_check_matroid_axioms();
  return c;
}

FeasibilityConstraint FeasibilityConstraint::graphic_matroid(int vertices, std::vector<std::pair<int, int>> edges) {
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices) throw DomainError("edge endpoint out of range");
  }
  auto c = matroid(
      static_cast<int>(edges.size()),
      [vertices, edges](const Subset& s) {
        UnionFind uf(vertices);
        int r = 0;
        for (int e : s) r += uf.unite(edges[e].first, edges[e].second) ? 1 : 0;
        return r;
      },
      "graphic_matroid");
  c.spot_check_matroid_axioms();
  return c;
}

FeasibilityConstraint FeasibilityConstraint::graphic_matroid_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::pair<int, int>> edges;
  std::string line;
  bool first = true;
  int vertices = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("expected 'u,v' in " + path.string() + ": '" + line + "'");
    try {
      const int a = std::stoi(line.substr(0, comma));
      const int b = std::stoi(line.substr(comma + 1));
      edges.emplace_back(a, b);
      vertices = std::max({vertices, a + 1, b + 1});
    } catch (const std::invalid_argument&) {
      if (!first) throw DomainError("non-numeric edge in " + path.string() + ": '" + line + "'");
    }
    first = false;
  }
  return graphic_matroid(vertices, std::move(edges));
}

FeasibilityConstraint FeasibilityConstraint::knapsack(std::vector<double> sizes, double capacity) {
  if (sizes.empty()) throw DomainError("knapsack needs at least one agent");
  if (!(capacity > 0.0) || !std::isfinite(capacity)) throw DomainError("knapsack capacity must be positive");
  for (double s : sizes) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("knapsack sizes must be positive");
  }
  FeasibilityConstraint c;
  c.kind_ = ConstraintKind::kKnapsack;
  c.n_ = static_cast<int>(sizes.size());
  c.sizes_ = std::move(sizes);
  c.capacity_ = capacity;
  c.label_ = "knapsack";
  return c;
}

FeasibilityConstraint FeasibilityConstraint::explicit_family(int n, std::vector<Subset> sets, bool downward_closed) {
  if (n < 1 || n > kMaxExplicitAgents) throw DomainError("explicit families support 1 <= n <= 20");
  if (sets.empty()) throw DomainError("explicit family must be nonempty");
  FeasibilityConstraint c;
  c.kind_ = ConstraintKind::kExplicitFamily;
  c.n_ = n;
  c.downward_closed_ = downward_closed;
  c.label_ = "explicit_family";
  for (const auto& s : sets) c.family_.push_back(c.mask_of(s));
  std::sort(c.family_.begin(), c.family_.end());
  c.family_.erase(std::unique(c.family_.begin(), c.family_.end()), c.family_.end());
  return c;
}

FeasibilityConstraint FeasibilityConstraint::explicit_family_from_json(const std::filesystem::path& path,
                                                                       bool downward_closed, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw DomainError(path.string() + ": expected an array of index arrays");
  std::vector<Subset> sets;
  int largest = -1;
  for (const auto& entry : doc) {
    if (!entry.is_array()) throw DomainError(path.string() + ": expected an array of index arrays");
    Subset s;
    for (const auto& x : entry) {
      if (!x.is_number_integer()) throw DomainError(path.string() + ": indices must be integers");
      s.push_back(x.get<int>());
      largest = std::max(largest, s.back());
    }
    sets.push_back(std::move(s));
  }
  return explicit_family(n > 0 ? n : largest + 1, std::move(sets), downward_closed);
}

std::string FeasibilityConstraint::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ConstraintKind::kKofN:
      os << "k_of_n(n=" << n_ << ",k=" << k_ << ")";
      break;
    case ConstraintKind::kMatroid:
      os << label_ << "(n=" << n_ << ",rank=" << k_ << ")";
      break;
    case ConstraintKind::kKnapsack:
      os << "knapsack(n=" << n_ << ",capacity=" << capacity_ << ")";
      break;
    case ConstraintKind::kExplicitFamily:
      os << "explicit_family(n=" << n_ << ",sets=" << family_.size()
         << (downward_closed_ ? ",downward_closed" : "") << ")";
      break;
  }
  return os.str();
}

Subset FeasibilityConstraint::normalize(const Subset& s) const {
  Subset out(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && (out.front() < 0 || out.back() >= n_)) {
    throw DomainError("subset index outside [0, " + std::to_string(n_) + ")");
  }
  return out;
}

std::uint32_t FeasibilityConstraint::mask_of(const Subset& s) const {
  std::uint32_t mask = 0;
  for (int i : normalize(s)) mask |= 1u << i;
  return mask;
}

void FeasibilityConstraint::spot_check_matroid_axioms() const {
  Rng rng(0x5EEDF00DULL);
  auto random_subset = [&] {
    Subset s;
    for (int i = 0; i < n_; ++i) {
      if (rng() & 1u) s.push_back(i);
    }
    return s;
  };
  if (rank_({}) != 0) throw DomainError(label_ + ": rank of the empty set is not 0");
  for (int trial = 0; trial < 32; ++trial) {
    const Subset a = random_subset();
    const Subset b = random_subset();
    Subset uni;
    Subset inter;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    const int ra = rank_(a);
    const int rb = rank_(b);
    const int ru = rank_(uni);
    const int ri = rank_(inter);
    if (ra < 0 || ra > static_cast<int>(a.size())) throw DomainError(label_ + ": rank outside [0, |S|]");
    if (ra > ru || rb > ru) throw DomainError(label_ + ": rank is not monotone");
    if (ru + ri > ra + rb) throw DomainError(label_ + ": rank is not submodular");
    for (int e = 0; e < n_; ++e) {
      if (std::binary_search(a.begin(), a.end(), e)) continue;
      const int step = rank_(with_element(a, e)) - ra;
      if (step != 0 && step != 1) throw DomainError(label_ + ": rank increments are not unit");
      break;
    }
  }
}

int FeasibilityConstraint::rank(const Subset& s) const {
  switch (kind_) {
    case ConstraintKind::kKofN:
      return std::min<int>(k_, static_cast<int>(normalize(s).size()));
    case ConstraintKind::kMatroid:
      return rank_(normalize(s));
    default:
      throw UnsupportedError("rank is only defined for matroid constraints");
  }
}

bool FeasibilityConstraint::is_feasible(const Subset& s) const {
  const Subset t = normalize(s);
  switch (kind_) {
    case ConstraintKind::kKofN:
      return static_cast<int>(t.size()) <= k_;
    case ConstraintKind::kMatroid:
      return rank_(t) == static_cast<int>(t.size());
    case ConstraintKind::kKnapsack: {
      double total = 0.0;
      for (int i : t) total += sizes_[i];
      return total <= capacity_;
    }
    case ConstraintKind::kExplicitFamily: {
      const std::uint32_t m = mask_of(t);
      if (!downward_closed_) return std::binary_search(family_.begin(), family_.end(), m);
      return std::any_of(family_.begin(), family_.end(), [m](std::uint32_t f) { return (f & m) == m; });
    }
  }
  return false;
}

bool FeasibilityConstraint::in_downward_closure(const Subset& s) const {
  if (kind_ != ConstraintKind::kExplicitFamily) return is_feasible(s);
  const std::uint32_t m = mask_of(s);
  return std::any_of(family_.begin(), family_.end(), [m](std::uint32_t f) { return (f & m) == m; });
}

std::optional<Subset> FeasibilityConstraint::find_circuit(const Subset& s) const {
  if (!is_matroid()) throw UnsupportedError("find_circuit requires a matroid constraint");
  Subset c = normalize(s);
  if (rank(c) == static_cast<int>(c.size())) return std::nullopt;
  // Drop every element whose removal keeps the set dependent.
  for (int e : Subset(c)) {
    Subset smaller = without_element(c, e);
    if (rank(smaller) < static_cast<int>(smaller.size())) c = std::move(smaller);
  }
  return c;
}

Selection FeasibilityConstraint::max_weight_feasible(const std::vector<double>& weights,
                                                     const std::vector<double>& priority) const {
  if (static_cast<int>(weights.size()) != n_) throw DomainError("one weight per agent expected");
  if (!priority.empty() && priority.size() != weights.size()) throw DomainError("one priority per agent expected");
  Selection best;
  const auto order = weight_order(weights, priority);
  switch (kind_) {
    case ConstraintKind::kKofN:
      for (int i : order) {
        if (static_cast<int>(best.subset.size()) == k_ || !(weights[i] > 0.0)) break;
        best.subset.push_back(i);
      }
      break;
    case ConstraintKind::kMatroid:
      for (int i : order) {
        if (!(weights[i] > 0.0)) break;
        Subset grown = with_element(best.subset, i);
        if (rank_(grown) == static_cast<int>(grown.size())) best.subset = std::move(grown);
      }
      break;
    case ConstraintKind::kKnapsack: {
      if (n_ > kMaxKnapsackAgents) throw SizeError("exact knapsack is limited to 30 agents");
      std::vector<int> items;
      for (int i = 0; i < n_; ++i) {
        if (weights[i] > 0.0 && sizes_[i] <= capacity_) items.push_back(i);
      }
      std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
        const double da = weights[a] / sizes_[a];
        const double db = weights[b] / sizes_[b];
        if (da != db) return da > db;
        if (!priority.empty() && priority[a] != priority[b]) return priority[a] < priority[b];
        return a < b;
      });
      double best_value = 0.0;
      Subset best_set;
      Subset current;
      // Depth-first branch and bound; the fractional relaxation of the
      // remaining items bounds each subtree.
      auto search = [&](auto&& self, std::size_t pos, double room, double value) -> void {
        if (value > best_value) {
          best_value = value;
          best_set = current;
        }
        if (pos == items.size()) return;
        double bound = value;
        double left = room;
        for (std::size_t j = pos; j < items.size(); ++j) {
          const int it = items[j];
          if (sizes_[it] <= left) {
            left -= sizes_[it];
            bound += weights[it];
          } else {
            bound += weights[it] * (left / sizes_[it]);
            break;
          }
        }
        if (bound + 1e-12 * std::max(1.0, bound) <= best_value) return;
        const int it = items[pos];
        if (sizes_[it] <= room) {
          current.push_back(it);
          self(self, pos + 1, room - sizes_[it], value + weights[it]);
          current.pop_back();
        }
        self(self, pos + 1, room, value);
      };
      search(search, 0, capacity_, 0.0);
      best.subset = std::move(best_set);
      std::sort(best.subset.begin(), best.subset.end());
      break;
    }
    case ConstraintKind::kExplicitFamily: {
      double best_value = -1.0;
      for (std::uint32_t f : family_) {
        Subset s;
        double total = 0.0;
        for (int i : subset_of_mask(f)) {
          if (downward_closed_ && !(weights[i] > 0.0)) continue;
          s.push_back(i);
          total += weights[i];
        }
        if (total > best_value) {
          best_value = total;
          best.subset = std::move(s);
        }
      }
      break;
    }
  }
  std::sort(best.subset.begin(), best.subset.end());
  best.total = 0.0;
  for (int i : best.subset) best.total += weights[i];
  return best;
}

std::uint64_t FeasibilityConstraint::feasible_count() const {
  if (kind_ == ConstraintKind::kKofN) {
    std::uint64_t total = 0;
    for (int j = 0; j <= k_; ++j) total += binomial(n_, j);
    return total;
  }
  if (n_ > kMaxExplicitAgents) throw SizeError("feasible_count enumerates subsets; limited to n <= 20");
  std::uint64_t total = 0;
  for (std::uint32_t m = 0; m < (1u << n_); ++m) {
    if (is_feasible(subset_of_mask(m))) ++total;
  }
  return total;
}

Subset FeasibilityConstraint::pad_to_maximal(const Subset& s) const {
  Subset out = normalize(s);
  if (!in_downward_closure(out)) throw InfeasibleError("subset is not contained in any feasible set");
  // The closure is downward closed, so one pass in index order suffices.
  for (int i = 0; i < n_; ++i) {
    if (std::binary_search(out.begin(), out.end(), i)) continue;
    Subset grown = with_element(out, i);
    if (in_downward_closure(grown)) out = std::move(grown);
  }
  if (!is_feasible(out)) throw InfeasibleError("no feasible superset exists");
  return out;
}

}  // namespace pentest
