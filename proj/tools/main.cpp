// pentest command-line tool: run, bench, curves, bounds, verify.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pentest/bench.hpp"
#include "pentest/config.hpp"
#include "pentest/errors.hpp"
#include "pentest/parallel.hpp"
#include "pentest/pensim.hpp"
#include "pentest/report.hpp"

using namespace pentest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> grid;
  std::optional<int> jobs;
};

void apply(const GlobalFlags& g, ExperimentConfig& c) {
  if (g.seed) c.seed = *g.seed;
  if (g.trials) {
    if (*g.trials < 1) throw ConfigError("--trials", "must be at least 1");
    c.trials = *g.trials;
  }
  if (g.out) c.out_dir = *g.out;
  if (g.format) c.formats = parse_formats(*g.format);
  if (g.grid) {
    if (*g.grid < 2) throw ConfigError("--grid", "must be at least 2");
    c.grid_resolution = *g.grid;
  }
  if (g.jobs) {
    if (*g.jobs < 1) throw ConfigError("--jobs", "must be at least 1");
    c.jobs = *g.jobs;
  }
}

std::uint64_t require_seed(const ExperimentConfig& c) {
  if (!c.seed) throw ConfigError("seed", "a seed is required (set it in the config or pass --seed)");
  return *c.seed;
}

bool wants(const ExperimentConfig& c, const char* format) { return c.formats.count(format) > 0; }

ExperimentConfig base_config(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

// ---------------------------------------------------------------------------

int cmd_run(const ExperimentConfig& c) {
  const std::uint64_t seed = require_seed(c);
  if (!c.constraint) throw ConfigError("environment", "run needs an environment");
  if (c.distributions.empty()) throw ConfigError("distributions", "run needs distributions");
  const MechanismPtr mech = build_mechanism(c);
  std::vector<RunRow> rows(static_cast<std::size_t>(c.trials));
  for_each_trial(c.trials, c.jobs, [&](long long i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i));
    std::vector<double> inks(c.distributions.size());
    for (std::size_t j = 0; j < inks.size(); ++j) inks[j] = c.distributions[j].sample(rng);
    RunRow& row = rows[static_cast<std::size_t>(i)];
    row.trial = i;
    row.run = run_pen_algorithm(*mech, inks, *c.constraint, rng, c.mechanism.pad);
    row.omniscient = omniscient_value(inks, *c.constraint);
  });
  double residual = 0.0;
  double omniscient = 0.0;
  for (const auto& r : rows) {
    residual += r.run.total_residual;
    omniscient += r.omniscient;
  }
  if (wants(c, "csv")) write_text(c.out_dir / "runs.csv", runs_table(rows).str());
  if (wants(c, "json") || c.trace) write_text(c.out_dir / "runs.jsonl", runs_jsonl(rows));
  std::printf("mechanism %s, %lld trials: mean residual %s, mean omniscient %s\n", mech->name().c_str(), c.trials,
              format_number(residual / c.trials).c_str(), format_number(omniscient / c.trials).c_str());
  return kExitOk;
}

struct BenchFlags {
  std::string mode;
  std::vector<std::string> envs;
  int n = 0;
  int k = 0;
  std::string dist;
};

int cmd_bench(ExperimentConfig c, const BenchFlags& f) {
  if (!f.mode.empty()) {
    if (f.mode != "table" && f.mode != "ratio") throw ConfigError("--mode", "expected table or ratio");
    c.bench.mode = f.mode;
  }
  if (!f.envs.empty()) c.bench.environments = f.envs;
  if (c.bench.environments.empty()) c.bench.environments = supported_environments();
  if (f.n > 0) {
    if (c.n > 0 && c.n != f.n) throw ConfigError("--n", "disagrees with the config's agent count");
    c.n = f.n;
  }
  if (f.k > 0) c.bench.k = f.k;
  if (!f.dist.empty()) {
    if (c.n < 1) throw ConfigError("--n", "an agent count is needed with --dist");
    c.distributions.assign(static_cast<std::size_t>(c.n), parse_distribution_spec(f.dist));
  }
  if (c.n < 1) throw ConfigError("bench.n", "an agent count is required");
  if (c.bench.k < 1 || c.bench.k > c.n) throw ConfigError("bench.k", "must lie in [1, n]");

  std::vector<BoundReport> rows;
  try {
    rows = table1_report(c.bench.environments, c.n, c.bench.k);
  } catch (const DomainError& e) {
    throw ConfigError("bench.environments", e.what());
  }
  if (wants(c, "csv")) write_text(c.out_dir / "bounds.csv", bounds_table(rows).str());
  if (wants(c, "json")) write_text(c.out_dir / "bounds.json", bounds_json(rows).dump(2) + "\n");

  if (c.bench.mode == "ratio") {
    const std::uint64_t seed = require_seed(c);
    if (static_cast<int>(c.distributions.size()) != c.n) {
      throw ConfigError("distributions", "ratio mode needs one distribution per agent");
    }
    for (auto& row : rows) {
      if (row.environment == "online-iid") {
        for (const auto& d : c.distributions) {
          if (d.describe() != c.distributions.front().describe()) {
            throw ConfigError("distributions", "online-iid needs identical distributions");
          }
        }
      }
      const auto est = measure_environment(row.environment, c.n, c.bench.k, c.distributions, c.trials, seed, c.jobs,
                                           c.grid_resolution);
      row.measured = true;
      row.measured_ratio = est.ratio;
      row.ci_halfwidth = est.confidence_halfwidth;
      row.trials = est.trials;
      row.seed = est.seed;
    }
    if (wants(c, "csv")) write_text(c.out_dir / "ratios.csv", bounds_table(rows).str());
    if (wants(c, "json")) write_text(c.out_dir / "ratios.json", bounds_json(rows).dump(2) + "\n");
  }
  std::cout << bounds_table(rows).str();
  return kExitOk;
}

int cmd_curves(ExperimentConfig c, const std::string& dist, int agent) {
  ValueDistribution d = ValueDistribution::exponential(1.0);
  if (!dist.empty()) {
    d = parse_distribution_spec(dist);
  } else if (!c.distributions.empty()) {
    if (agent < 0 || agent >= static_cast<int>(c.distributions.size())) throw ConfigError("--agent", "out of range");
    d = c.distributions[static_cast<std::size_t>(agent)];
  } else {
    throw ConfigError("--dist", "give a distribution with --dist or a config with distributions");
  }
  const CurveBundle b = ironed_curves(d, c.grid_resolution);
  if (wants(c, "csv")) write_text(c.out_dir / "curves.csv", curves_table(b).str());
  if (wants(c, "svg")) write_text(c.out_dir / "curves.svg", curves_svg(b));
  if (wants(c, "json")) {
    nlohmann::json j{{"distribution", d.describe()}, {"grid_resolution", c.grid_resolution}};
    auto iv = nlohmann::json::array();
    for (const auto& i : b.ironed_intervals) iv.push_back({i.lo, i.hi});
    j["ironed_intervals"] = iv;
    j["hull_q"] = b.hull_q;
    j["hull_U"] = b.hull_U;
    write_text(c.out_dir / "curves.json", j.dump(2) + "\n");
  }
  std::printf("%s: %zu grid points, %zu ironed intervals\n", d.describe().c_str(), b.grid.size(),
              b.ironed_intervals.size());
  return kExitOk;
}

int cmd_bounds(const ExperimentConfig& c, long long n, long long k, std::vector<std::string> envs, bool figure) {
  if (envs.empty()) envs = supported_environments();
  std::vector<BoundReport> rows;
  try {
    rows = table1_report(envs, n, k);
  } catch (const DomainError& e) {
    throw ConfigError("--env", e.what());
  }
  if (wants(c, "csv")) write_text(c.out_dir / "bounds.csv", bounds_table(rows).str());
  if (wants(c, "json")) write_text(c.out_dir / "bounds.json", bounds_json(rows).dump(2) + "\n");
  if (figure) {
    CsvTable t({"k_over_n", "upper_over_lower", "prior_over_upper"});
    for (int j = 1; j <= 100; ++j) {
      const double x = j / 100.0;
      t.add_row({format_number(x), format_number(kid_upper_over_lower(x)), format_number(prior_bound_over_kid_upper(x))});
    }
    write_text(c.out_dir / "figure.csv", t.str());
  }
  std::cout << bounds_table(rows).str();
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& c) {
  CsvTable t({"check", "n", "a", "value", "threshold", "pass"});
  bool ok = true;
  auto add = [&](const char* check, int n, double a, double value, double threshold, bool pass) {
    ok = ok && pass;
    t.add_row({check, std::to_string(n), format_number(a), format_number(value), format_number(threshold),
               pass ? "true" : "false"});
  };
  for (int n : {1, 2, 10, 100}) {
    const double v = verify_c_convexity(n, c.grid_resolution);
    add("c_convexity", n, 0.0, v, -1e-9, v >= -1e-9);
  }
  for (int n : {1, 5, 10}) {
    for (double a : {0.0, 0.05, 1.0 / n}) {
      const double e = verify_integral_identity(n, a);
      add("integral_identity", n, a, e, 1e-6, e < 1e-6);
    }
  }
  for (int n : {2, 5, 10, 50}) {
    for (double a : {0.0, 0.5 / n, 1.0 / n, 2.0 / n, 1.0}) {
      const auto r = verify_iid_worstcase(n, a, c.grid_resolution);
      add("iid_worstcase", n, a, r.ratio, r.bound, r.ratio <= r.bound + 1e-6);
    }
  }
  if (wants(c, "csv")) write_text(c.out_dir / "verify.csv", t.str());
  std::cout << t.str();
  if (!ok) {
    std::fprintf(stderr, "error: a lemma check failed\n");
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pen testing and deferred-acceptance auction experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--trials", g.trials, "Number of trials");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Comma-separated output formats: csv, json, svg");
  app.add_option("--grid", g.grid, "Quantile grid resolution");
  app.add_option("--jobs", g.jobs, "Worker threads");

  std::string config;
  auto* run = app.add_subcommand("run", "Run pen-testing trials from a config");
  run->add_option("--config", config, "Experiment config (YAML)")->required();

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Bound table and measured ratios");
  bench->add_option("--config", config, "Experiment config (YAML)");
  bench->add_option("--mode", bf.mode, "table or ratio");
  bench->add_option("--env", bf.envs, "Environment label (repeatable)");
  bench->add_option("--n", bf.n, "Agent count");
  bench->add_option("--k", bf.k, "Units (select-k), partition blocks (matroid), capacity/2 (knapsack)");
  bench->add_option("--dist", bf.dist, "IID distribution spec, e.g. exponential:mean=1");

  std::string dist;
  int agent = 0;
  auto* curves = app.add_subcommand("curves", "Surplus and consumer-surplus curves of one distribution");
  curves->add_option("--config", config, "Experiment config (YAML)");
  curves->add_option("--dist", dist, "Distribution spec, e.g. uniform:lo=0,hi=1");
  curves->add_option("--agent", agent, "Agent index when reading a config");

  long long bn = 10;
  long long bk = 1;
  std::vector<std::string> benvs;
  bool figure = false;
  auto* bounds = app.add_subcommand("bounds", "Closed-form bound table");
  bounds->add_option("--n", bn, "Agent count");
  bounds->add_option("--k", bk, "Units for select-k");
  bounds->add_option("--env", benvs, "Environment label (repeatable)");
  bounds->add_flag("--figure", figure, "Also write the k/n ratio curves");

  auto* verify = app.add_subcommand("verify", "Numeric checks of the convexity, identity and IID lemmas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig c = base_config(config);
    apply(g, c);
    if (*run) return cmd_run(c);
    if (*bench) return cmd_bench(c, bf);
    if (*curves) return cmd_curves(c, dist, agent);
    if (*bounds) return cmd_bounds(c, bn, bk, benvs, figure);
    if (*verify) return cmd_verify(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitInvariant;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
