#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pentest/feasibility.hpp"
#include "pentest/mechanisms.hpp"

namespace pentest {

struct MechanismSpec {
  // k_clock, matroid_da, knapsack_da, prophet, gsp, iid_posted_price
  std::string kind = "k_clock";
  bool virtual_pricing = false;
  int branch_trials = 10000;  // knapsack_da only
  bool pad = false;           // extend chosen pens to a maximal feasible set
};

struct BenchSpec {
  std::string mode = "table";  // table or ratio
  std::vector<std::string> environments;  // empty: all supported
  int k = 1;
};

/// Parsed experiment document. Everything is validated at load time;
/// unknown keys are errors.
struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  long long trials = 1000;
  std::size_t grid_resolution = kDefaultGridResolution;
  int jobs = 1;
  int n = 0;
  std::optional<FeasibilityConstraint> constraint;
  Distributions distributions;  // one per agent
  MechanismSpec mechanism;
  BenchSpec bench;
  std::filesystem::path out_dir = ".";
  std::set<std::string> formats{"csv"};
  bool trace = false;
};

/// Parses YAML text. Relative file references resolve against `base_dir`.
/// Throws ConfigError carrying the offending field path.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Distribution from a compact spec such as "exponential:mean=1",
/// "uniform:lo=0,hi=1" or "point_masses:values=3;1,probabilities=0.5;0.5".
ValueDistribution parse_distribution_spec(const std::string& spec);

/// Accepts a comma-separated subset of {csv, json, svg}.
std::set<std::string> parse_formats(const std::string& list);

/// Mechanism described by `spec` for the config's constraint and priors.
MechanismPtr build_mechanism(const ExperimentConfig& config);

}  // namespace pentest
