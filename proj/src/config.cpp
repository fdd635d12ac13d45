#include "pentest/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pentest/bench.hpp"
#include "pentest/errors.hpp"

namespace pentest {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
}

void allow_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) {
  require_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      std::string list;
      for (const char* k : keys) list += (list.empty() ? "" : ", ") + std::string(k);
      throw ConfigError(join(path, key), "unknown key (allowed: " + list + ")");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
  }
}

double get_double(const YAML::Node& node, const std::string& path) { return scalar<double>(node, path, "a number"); }
long long get_int(const YAML::Node& node, const std::string& path) { return scalar<long long>(node, path, "an integer"); }
bool get_bool(const YAML::Node& node, const std::string& path) { return scalar<bool>(node, path, "true or false"); }
std::string get_string(const YAML::Node& node, const std::string& path) {
  return scalar<std::string>(node, path, "a string");
}

template <typename T>
std::vector<T> get_list(const YAML::Node& node, const std::string& path, T (*one)(const YAML::Node&, const std::string&)) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(one(node[i], index_path(path, i)));
  return out;
}

YAML::Node required(const YAML::Node& parent, const std::string& path, const char* key) {
  const YAML::Node child = parent[key];
  if (!child) throw ConfigError(join(path, key), "missing required key");
  return child;
}

// Runs a library factory and turns its argument errors into config errors.
template <typename Fn>
auto guarded(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  } catch (const UnsupportedError& e) {
    throw ConfigError(path, e.what());
  } catch (const SizeError& e) {
    throw ConfigError(path, e.what());
  } catch (const std::ios_base::failure& e) {
    throw ConfigError(path, e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ValueDistribution build_distribution(const YAML::Node& node, const std::string& path,
                                     const std::filesystem::path& base) {
  require_map(node, path);
  const std::string kind = get_string(required(node, path, "kind"), join(path, "kind"));
  auto num = [&](const char* key) { return get_double(required(node, path, key), join(path, key)); };
  auto list = [&](const char* key) { return get_list<double>(required(node, path, key), join(path, key), get_double); };
  return guarded(path, [&]() -> ValueDistribution {
    if (kind == "exponential") {
      allow_keys(node, path, {"kind", "mean"});
      return ValueDistribution::exponential(num("mean"));
    }
    if (kind == "uniform") {
      allow_keys(node, path, {"kind", "lo", "hi"});
      return ValueDistribution::uniform(num("lo"), num("hi"));
    }
    if (kind == "point_masses") {
      allow_keys(node, path, {"kind", "values", "probabilities"});
      return ValueDistribution::point_masses(list("values"), list("probabilities"));
    }
    if (kind == "piecewise_linear") {
      allow_keys(node, path, {"kind", "quantiles", "values", "csv"});
      if (node["csv"]) {
        if (node["quantiles"] || node["values"]) throw ConfigError(join(path, "csv"), "give either csv or knots, not both");
        return ValueDistribution::piecewise_linear_from_csv(resolve(base, get_string(node["csv"], join(path, "csv"))));
      }
      return ValueDistribution::piecewise_linear(list("quantiles"), list("values"));
    }
    if (kind == "truncated_normal") {
      allow_keys(node, path, {"kind", "mean", "sd", "lo", "hi", "knots"});
      const int knots = node["knots"] ? static_cast<int>(get_int(node["knots"], join(path, "knots"))) : 200;
      return ValueDistribution::truncated_normal_approx(num("mean"), num("sd"), num("lo"), num("hi"), knots);
    }
    if (kind == "lognormal") {
      allow_keys(node, path, {"kind", "mu", "sigma", "knots", "top_mass"});
      const int knots = node["knots"] ? static_cast<int>(get_int(node["knots"], join(path, "knots"))) : 200;
      const double top = node["top_mass"] ? get_double(node["top_mass"], join(path, "top_mass")) : 1e-6;
      return ValueDistribution::lognormal_approx(num("mu"), num("sigma"), knots, top);
    }
    throw ConfigError(join(path, "kind"), "unknown distribution kind '" + kind +
                                              "' (expected exponential, uniform, point_masses, piecewise_linear, "
                                              "truncated_normal or lognormal)");
  });
}

int get_count(const YAML::Node& node, const std::string& path) {
  const long long v = get_int(node, path);
  if (v < 0 || v > 1'000'000) throw ConfigError(path, "out of range");
  return static_cast<int>(v);
}

Subset get_subset(const YAML::Node& node, const std::string& path) {
  std::vector<long long> raw = get_list<long long>(node, path, get_int);
  Subset s;
  for (long long x : raw) s.push_back(static_cast<int>(x));
  return s;
}

FeasibilityConstraint build_constraint(const YAML::Node& node, const std::string& path,
                                       const std::filesystem::path& base) {
  require_map(node, path);
  const std::string kind = get_string(required(node, path, "kind"), join(path, "kind"));
  auto count = [&](const char* key) { return get_count(required(node, path, key), join(path, key)); };
  return guarded(path, [&]() -> FeasibilityConstraint {
    if (kind == "k_of_n") {
      allow_keys(node, path, {"kind", "n", "k"});
      return FeasibilityConstraint::k_of_n(count("n"), count("k"));
    }
    if (kind == "uniform_matroid") {
      allow_keys(node, path, {"kind", "n", "rank"});
      return FeasibilityConstraint::uniform_matroid(count("n"), count("rank"));
    }
    if (kind == "partition") {
      allow_keys(node, path, {"kind", "blocks", "capacities"});
      std::vector<int> blocks;
      std::vector<int> caps;
      for (long long b : get_list<long long>(required(node, path, "blocks"), join(path, "blocks"), get_int)) {
        blocks.push_back(static_cast<int>(b));
      }
      for (long long c : get_list<long long>(required(node, path, "capacities"), join(path, "capacities"), get_int)) {
        caps.push_back(static_cast<int>(c));
      }
      return FeasibilityConstraint::partition_matroid(std::move(blocks), std::move(caps));
    }
    if (kind == "graphic") {
      allow_keys(node, path, {"kind", "vertices", "edges", "edges_csv"});
      if (node["edges_csv"]) {
        return FeasibilityConstraint::graphic_matroid_from_csv(
            resolve(base, get_string(node["edges_csv"], join(path, "edges_csv"))));
      }
      const YAML::Node edges = required(node, path, "edges");
      if (!edges.IsSequence()) throw ConfigError(join(path, "edges"), "expected a list of [u, v] pairs");
      std::vector<std::pair<int, int>> list;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto e = get_subset(edges[i], index_path(join(path, "edges"), i));
        if (e.size() != 2) throw ConfigError(index_path(join(path, "edges"), i), "an edge has two endpoints");
        list.emplace_back(e[0], e[1]);
      }
      return FeasibilityConstraint::graphic_matroid(count("vertices"), std::move(list));
    }
    if (kind == "knapsack") {
      allow_keys(node, path, {"kind", "sizes", "capacity"});
      return FeasibilityConstraint::knapsack(
          get_list<double>(required(node, path, "sizes"), join(path, "sizes"), get_double),
          get_double(required(node, path, "capacity"), join(path, "capacity")));
    }
    if (kind == "explicit") {
      allow_keys(node, path, {"kind", "n", "sets", "sets_json", "downward_closed"});
      const bool closed = node["downward_closed"] ? get_bool(node["downward_closed"], join(path, "downward_closed")) : true;
      const int n = node["n"] ? count("n") : 0;
      if (node["sets_json"]) {
        return FeasibilityConstraint::explicit_family_from_json(
            resolve(base, get_string(node["sets_json"], join(path, "sets_json"))), closed, n);
      }
      const YAML::Node sets = required(node, path, "sets");
      if (!sets.IsSequence()) throw ConfigError(join(path, "sets"), "expected a list of index lists");
      std::vector<Subset> family;
      int largest = -1;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        family.push_back(get_subset(sets[i], index_path(join(path, "sets"), i)));
        for (int x : family.back()) largest = std::max(largest, x);
      }
      return FeasibilityConstraint::explicit_family(n > 0 ? n : largest + 1, std::move(family), closed);
    }
    throw ConfigError(join(path, "kind"), "unknown environment kind '" + kind +
                                              "' (expected k_of_n, uniform_matroid, partition, graphic, knapsack "
                                              "or explicit)");
  });
}

const std::vector<std::string> kMechanismKinds{"k_clock", "matroid_da", "knapsack_da",
                                                "prophet", "gsp", "iid_posted_price"};

// Cheap compatibility checks shared by parsing and construction.
void validate_mechanism(const ExperimentConfig& c) {
  const std::string path = "mechanism.kind";
  const auto& kind = c.mechanism.kind;
  if (std::find(kMechanismKinds.begin(), kMechanismKinds.end(), kind) == kMechanismKinds.end()) {
    std::string list;
    for (const auto& k : kMechanismKinds) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(path, "unknown mechanism '" + kind + "' (expected " + list + ")");
  }
  if (!c.constraint) throw ConfigError("environment", "a mechanism needs an environment");
  const auto& con = *c.constraint;
  const bool single = con.kind() == ConstraintKind::kKofN && con.k() == 1;
  if (kind == "matroid_da" && !con.is_matroid()) throw ConfigError(path, "matroid_da needs a matroid environment");
  if (kind == "knapsack_da" && con.kind() != ConstraintKind::kKnapsack) {
    throw ConfigError(path, "knapsack_da needs a knapsack environment");
  }
  if ((kind == "prophet" || kind == "iid_posted_price") && !single) {
    throw ConfigError(path, kind + " needs a k_of_n environment with k = 1");
  }
  if (kind == "gsp" && con.kind() != ConstraintKind::kKofN) throw ConfigError(path, "gsp needs a k_of_n environment");
  if (kind == "iid_posted_price") {
    if (c.mechanism.virtual_pricing) {
      throw ConfigError("mechanism.virtual_pricing", "iid_posted_price already prices consumer surplus");
    }
    for (const auto& d : c.distributions) {
      if (d.describe() != c.distributions.front().describe()) {
        throw ConfigError("distributions", "iid_posted_price needs identical distributions");
      }
    }
  }
  if (c.mechanism.branch_trials < 1) throw ConfigError("mechanism.branch_trials", "must be at least 1");
}

}  // namespace

std::set<std::string> parse_formats(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item != "csv" && item != "json" && item != "svg") {
      throw ConfigError("output.formats", "unknown format '" + item + "' (expected csv, json or svg)");
    }
    out.insert(item);
  }
  if (out.empty()) throw ConfigError("output.formats", "at least one format is required");
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("", "empty document");
  allow_keys(root, "", {"seed", "trials", "grid_resolution", "jobs", "environment", "distributions", "mechanism",
                        "bench", "output"});

  ExperimentConfig c;
  if (root["seed"]) {
    const long long s = get_int(root["seed"], "seed");
    if (s < 0) throw ConfigError("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (root["trials"]) {
    c.trials = get_int(root["trials"], "trials");
    if (c.trials < 1) throw ConfigError("trials", "must be at least 1");
  }
  if (root["grid_resolution"]) {
    const long long g = get_int(root["grid_resolution"], "grid_resolution");
    if (g < 2) throw ConfigError("grid_resolution", "must be at least 2");
    c.grid_resolution = static_cast<std::size_t>(g);
  }
  if (root["jobs"]) {
    const long long j = get_int(root["jobs"], "jobs");
    if (j < 1 || j > 1024) throw ConfigError("jobs", "must lie in [1, 1024]");
    c.jobs = static_cast<int>(j);
  }

  if (root["bench"]) {
    const YAML::Node b = root["bench"];
    allow_keys(b, "bench", {"mode", "environments", "n", "k"});
    if (b["mode"]) {
      c.bench.mode = get_string(b["mode"], "bench.mode");
      if (c.bench.mode != "table" && c.bench.mode != "ratio") throw ConfigError("bench.mode", "expected table or ratio");
    }
    if (b["environments"]) {
      c.bench.environments = get_list<std::string>(b["environments"], "bench.environments", get_string);
      const auto& ok = supported_environments();
      for (std::size_t i = 0; i < c.bench.environments.size(); ++i) {
        if (std::find(ok.begin(), ok.end(), c.bench.environments[i]) == ok.end()) {
          std::string list;
          for (const auto& l : ok) list += (list.empty() ? "" : ", ") + l;
          throw ConfigError(index_path("bench.environments", i),
                            "unsupported environment '" + c.bench.environments[i] + "' (supported: " + list + ")");
        }
      }
    }
    if (b["n"]) c.n = get_count(b["n"], "bench.n");
    if (b["k"]) c.bench.k = get_count(b["k"], "bench.k");
  }

  if (root["environment"]) {
    c.constraint = build_constraint(root["environment"], "environment", base_dir);
    if (c.n != 0 && c.n != c.constraint->n()) {
      throw ConfigError("bench.n", "disagrees with the environment's agent count");
    }
    c.n = c.constraint->n();
  }

  if (root["distributions"]) {
    const YAML::Node d = root["distributions"];
    allow_keys(d, "distributions", {"iid", "per_agent"});
    if (d["iid"] && d["per_agent"]) throw ConfigError("distributions", "give either iid or per_agent, not both");
    if (d["iid"]) {
      if (c.n < 1) throw ConfigError("distributions.iid", "the agent count is unknown (set environment or bench.n)");
      c.distributions.assign(static_cast<std::size_t>(c.n), build_distribution(d["iid"], "distributions.iid", base_dir));
    } else if (d["per_agent"]) {
      const YAML::Node list = d["per_agent"];
      if (!list.IsSequence()) throw ConfigError("distributions.per_agent", "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i) {
        c.distributions.push_back(build_distribution(list[i], index_path("distributions.per_agent", i), base_dir));
      }
      if (c.n == 0) c.n = static_cast<int>(c.distributions.size());
      if (static_cast<int>(c.distributions.size()) != c.n) {
        throw ConfigError("distributions.per_agent", "expected " + std::to_string(c.n) + " entries, one per agent");
      }
    } else {
      throw ConfigError("distributions", "expected iid or per_agent");
    }
  }
  if (c.bench.k < 1 || (c.n > 0 && c.bench.k > c.n)) throw ConfigError("bench.k", "must lie in [1, n]");

  if (root["mechanism"]) {
    const YAML::Node m = root["mechanism"];
    allow_keys(m, "mechanism", {"kind", "virtual_pricing", "branch_trials", "pad"});
    if (m["kind"]) c.mechanism.kind = get_string(m["kind"], "mechanism.kind");
    if (m["virtual_pricing"]) c.mechanism.virtual_pricing = get_bool(m["virtual_pricing"], "mechanism.virtual_pricing");
    if (m["branch_trials"]) c.mechanism.branch_trials = get_count(m["branch_trials"], "mechanism.branch_trials");
    if (m["pad"]) c.mechanism.pad = get_bool(m["pad"], "mechanism.pad");
    if (c.distributions.empty()) throw ConfigError("distributions", "a mechanism needs distributions");
    validate_mechanism(c);
  }

  if (root["output"]) {
    const YAML::Node o = root["output"];
    allow_keys(o, "output", {"dir", "formats", "trace"});
    if (o["dir"]) c.out_dir = resolve(base_dir, get_string(o["dir"], "output.dir"));
    if (o["formats"]) {
      std::string joined;
      for (const auto& f : get_list<std::string>(o["formats"], "output.formats", get_string)) joined += f + ",";
      c.formats = parse_formats(joined);
    }
    if (o["trace"]) c.trace = get_bool(o["trace"], "output.trace");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ValueDistribution parse_distribution_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  YAML::Node node;
  node["kind"] = spec.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--dist", "expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (value.find(';') != std::string::npos || key == "values" || key == "probabilities" || key == "quantiles") {
        YAML::Node seq(YAML::NodeType::Sequence);
        std::stringstream vs(value);
        std::string v;
        while (std::getline(vs, v, ';')) seq.push_back(v);
        node[key] = seq;
      } else {
        node[key] = value;
      }
    }
  }
  return build_distribution(node, "--dist", ".");
}

MechanismPtr build_mechanism(const ExperimentConfig& c) {
  validate_mechanism(c);
  if (static_cast<int>(c.distributions.size()) != c.n) throw ConfigError("distributions", "one per agent expected");
  const auto& con = *c.constraint;
  const auto& kind = c.mechanism.kind;
  const std::uint64_t seed = c.seed.value_or(0);
  Bundles bundles;
  Distributions priors = c.distributions;
  if (c.mechanism.virtual_pricing || kind == "iid_posted_price") {
    bundles = ironed_bundles(c.distributions, c.grid_resolution);
  }
  if (c.mechanism.virtual_pricing) {
    priors.clear();
    for (const auto& b : bundles) priors.push_back(virtual_distribution(b));
  }
  MechanismPtr base;
  if (kind == "k_clock") {
    base = k_clock_da(con);
  } else if (kind == "matroid_da") {
    base = matroid_da(con);
  } else if (kind == "knapsack_da") {
    base = knapsack_da(con, priors, c.mechanism.branch_trials, seed);
  } else if (kind == "prophet") {
    base = prophet_posted_price(priors);
  } else if (kind == "gsp") {
    base = gsp_sequential(con, priors);
  } else {
    return iid_posted_price(bundles.front(), c.n);
  }
  return c.mechanism.virtual_pricing ? virtual_transform(base, bundles) : base;
}

}  // namespace pentest
