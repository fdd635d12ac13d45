#include "pentest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "pentest/errors.hpp"

namespace pentest {

namespace {

void check_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile " + std::to_string(q) + " outside [0,1]");
  }
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

ValueDistribution ValueDistribution::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DomainError("exponential mean must be positive and finite");
  }
  ValueDistribution d;
  d.kind_ = DistributionKind::kExponential;
  d.params_ = {mean};
  return d;
}

ValueDistribution ValueDistribution::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw DomainError("uniform requires 0 <= lo < hi < inf");
  }
  ValueDistribution d;
  d.kind_ = DistributionKind::kUniform;
  d.params_ = {lo, hi};
  return d;
}

ValueDistribution ValueDistribution::point_masses(std::vector<double> values, std::vector<double> probabilities) {
  if (values.empty() || values.size() != probabilities.size()) {
    throw DomainError("point masses need equally many values and probabilities");
  }
  std::map<double, double, std::greater<>> merged;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw DomainError("point-mass values must be finite and non-negative");
    }
    if (!(probabilities[i] >= 0.0)) {
      throw DomainError("point-mass probabilities must be non-negative");
    }
    total += probabilities[i];
    if (probabilities[i] > 0.0) merged[values[i]] += probabilities[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("point-mass probabilities sum to " + fmt_double(total) + ", not 1");
  }
  ValueDistribution d;
  d.kind_ = DistributionKind::kPointMasses;
  d.xs_.push_back(0.0);
  d.prefix_.push_back(0.0);
  double cum = 0.0;
  for (const auto& [value, prob] : merged) {
    d.prefix_.push_back(d.prefix_.back() + prob * value);
    cum += prob;
    d.xs_.push_back(cum);
    d.ys_.push_back(value);
    d.params_.push_back(value);
    d.params_.push_back(prob);
  }
  d.xs_.back() = 1.0;
  return d;
}

ValueDistribution ValueDistribution::piecewise_linear(std::vector<double> knot_quantiles, std::vector<double> knot_values) {
  if (knot_quantiles.size() < 2 || knot_quantiles.size() != knot_values.size()) {
    throw DomainError("piecewise-linear inverse demand needs at least two (quantile, value) knots");
  }
  if (knot_quantiles.front() != 0.0 || knot_quantiles.back() != 1.0) {
    throw DomainError("knot quantiles must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i < knot_quantiles.size(); ++i) {
    if (i > 0 && !(knot_quantiles[i] > knot_quantiles[i - 1])) {
      throw DomainError("knot quantiles must be strictly increasing");
    }
    if (!(knot_values[i] >= 0.0) || !std::isfinite(knot_values[i])) {
      throw DomainError("knot values must be finite and non-negative");
    }
    if (i > 0 && knot_values[i] > knot_values[i - 1]) {
      throw DomainError("inverse demand must be non-increasing in quantile");
    }
  }
  ValueDistribution d;
  d.kind_ = DistributionKind::kPiecewiseLinear;
  d.xs_ = std::move(knot_quantiles);
  d.ys_ = std::move(knot_values);
  d.prefix_.assign(d.xs_.size(), 0.0);
  for (std::size_t j = 1; j < d.xs_.size(); ++j) {
    d.prefix_[j] = d.prefix_[j - 1] + 0.5 * (d.ys_[j - 1] + d.ys_[j]) * (d.xs_[j] - d.xs_[j - 1]);
  }
  return d;
}

ValueDistribution ValueDistribution::piecewise_linear_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> qs;
  std::vector<double> vs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("expected two comma-separated columns in " + path.string() + ": '" + line + "'");
    }
    try {
      std::size_t used = 0;
      const double q = std::stod(line.substr(0, comma), &used);
      const double v = std::stod(line.substr(comma + 1));
      qs.push_back(q);
      vs.push_back(v);
    } catch (const std::invalid_argument&) {
      if (!first) throw DomainError("non-numeric row in " + path.string() + ": '" + line + "'");
    }
    first = false;
  }
  return piecewise_linear(std::move(qs), std::move(vs));
}

ValueDistribution ValueDistribution::truncated_normal_approx(double mean, double sd, double lo, double hi, int knots) {
  if (!(sd > 0.0) || !(lo >= 0.0) || !(hi > lo) || knots < 2) {
    throw DomainError("truncated normal requires sd > 0, 0 <= lo < hi and at least two knots");
  }
  const boost::math::normal_distribution<double> normal(mean, sd);
  const double fa = boost::math::cdf(normal, lo);
  const double fb = boost::math::cdf(normal, hi);
  std::vector<double> qs(knots);
  std::vector<double> vs(knots);
  for (int j = 0; j < knots; ++j) {
    const double q = (j == knots - 1) ? 1.0 : static_cast<double>(j) / (knots - 1);
    double p = fb - q * (fb - fa);
    double v = (p <= 0.0) ? lo : (p >= 1.0 ? hi : boost::math::quantile(normal, p));
    qs[j] = q;
    vs[j] = std::clamp(v, lo, hi);
    if (j > 0) vs[j] = std::min(vs[j], vs[j - 1]);
  }
  auto d = piecewise_linear(std::move(qs), std::move(vs));
  d.params_ = {mean, sd, lo, hi, static_cast<double>(knots)};
  return d;
}

ValueDistribution ValueDistribution::lognormal_approx(double mu, double sigma, int knots, double top_mass) {
  if (!(sigma > 0.0) || knots < 6 || !(top_mass > 0.0 && top_mass < 0.1)) {
    throw DomainError("lognormal requires sigma > 0, at least six knots and 0 < top_mass < 0.1");
  }
  const boost::math::normal_distribution<double> standard;
  auto value_at = [&](double q) {
    if (q >= 1.0) return 0.0;
    return std::exp(mu + sigma * boost::math::quantile(standard, 1.0 - q));
  };
  // Geometric spacing over the heavy top tail, uniform spacing below 0.1.
  const int tail = knots / 2;
  std::vector<double> qs{0.0};
  for (int j = 0; j < tail; ++j) {
    qs.push_back(top_mass * std::pow(0.1 / top_mass, static_cast<double>(j) / tail));
  }
  const int body = knots - 1 - tail;
  for (int j = 0; j < body; ++j) {
    qs.push_back(0.1 + 0.9 * static_cast<double>(j) / (body - 1));
  }
  qs.back() = 1.0;
  std::vector<double> vs(qs.size());
  for (std::size_t j = 0; j < qs.size(); ++j) vs[j] = value_at(j == 0 ? top_mass : qs[j]);
  auto d = piecewise_linear(std::move(qs), std::move(vs));
  d.params_ = {mu, sigma, static_cast<double>(knots), top_mass};
  return d;
}

std::string ValueDistribution::describe() const {
  switch (kind_) {
    case DistributionKind::kExponential:
      return "exponential(mean=" + fmt_double(params_[0]) + ")";
    case DistributionKind::kUniform:
      return "uniform(" + fmt_double(params_[0]) + "," + fmt_double(params_[1]) + ")";
    case DistributionKind::kPointMasses: {
      std::string s = "point_masses(";
      for (std::size_t j = 0; j < ys_.size(); ++j) {
        if (j) s += ",";
        s += fmt_double(ys_[j]) + ":" + fmt_double(xs_[j + 1] - xs_[j]);
      }
      return s + ")";
    }
    case DistributionKind::kPiecewiseLinear:
      return "piecewise_linear(" + std::to_string(xs_.size()) + " knots)";
  }
  return "?";
}

std::size_t ValueDistribution::segment_of(double q) const {
  if (q <= 0.0) return 0;
  const auto it = std::lower_bound(xs_.begin() + 1, xs_.end(), q);
  const auto idx = static_cast<std::size_t>(it - xs_.begin());
  return std::min(idx, xs_.size() - 1) - 1;
}

double ValueDistribution::inverse_demand(double q) const {
  check_quantile(q);
  if (q == 1.0) return 0.0;
  switch (kind_) {
    case DistributionKind::kExponential:
      return q == 0.0 ? kUnbounded : -params_[0] * std::log(q);
    case DistributionKind::kUniform:
      return params_[1] - (params_[1] - params_[0]) * q;
    case DistributionKind::kPointMasses:
      return ys_[segment_of(q)];
    case DistributionKind::kPiecewiseLinear: {
      const std::size_t j = segment_of(q);
      const double t = (q - xs_[j]) / (xs_[j + 1] - xs_[j]);
      return ys_[j] + t * (ys_[j + 1] - ys_[j]);
    }
  }
  return 0.0;
}

double ValueDistribution::inverse_demand_right(double q) const {
  check_quantile(q);
  if (q == 1.0) return 0.0;
  if (kind_ == DistributionKind::kPointMasses) {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), q);
    return ys_[static_cast<std::size_t>(it - xs_.begin()) - 1];
  }
  return inverse_demand(q);
}

double ValueDistribution::cdf(double v) const {
  if (v < 0.0) return 0.0;
  switch (kind_) {
    case DistributionKind::kExponential:
      return -std::expm1(-v / params_[0]);
    case DistributionKind::kUniform:
      return std::clamp((v - params_[0]) / (params_[1] - params_[0]), 0.0, 1.0);
    case DistributionKind::kPointMasses: {
      double acc = 0.0;
      for (std::size_t j = 0; j < ys_.size(); ++j) {
        if (ys_[j] <= v) acc += xs_[j + 1] - xs_[j];
      }
      return std::min(acc, 1.0);
    }
    case DistributionKind::kPiecewiseLinear: {
      // Pr(value > v) = sup{q : v(q) > v}.
      if (ys_.front() <= v) return 1.0;
      for (std::size_t j = 0; j + 1 < xs_.size(); ++j) {
        if (ys_[j + 1] <= v) {
          const double t = (ys_[j] - v) / (ys_[j] - ys_[j + 1]);
          return 1.0 - (xs_[j] + t * (xs_[j + 1] - xs_[j]));
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

double ValueDistribution::upper_quantile(double v) const {
  if (v <= 0.0) return 1.0;
  switch (kind_) {
    case DistributionKind::kExponential:
      return std::exp(-v / params_[0]);
    case DistributionKind::kUniform:
      return std::clamp((params_[1] - v) / (params_[1] - params_[0]), 0.0, 1.0);
    case DistributionKind::kPointMasses: {
      // Atoms are sorted decreasingly, so the answer is a cumulative mass.
      std::size_t j = 0;
      while (j < ys_.size() && ys_[j] >= v) ++j;
      return xs_[j];
    }
    case DistributionKind::kPiecewiseLinear: {
      if (ys_.front() < v) return 0.0;
      for (std::size_t j = 0; j + 1 < xs_.size(); ++j) {
        if (ys_[j + 1] < v) {
          const double t = (ys_[j] - v) / (ys_[j] - ys_[j + 1]);
          return xs_[j] + t * (xs_[j + 1] - xs_[j]);
        }
      }
      return 1.0;
    }
  }
  return 1.0;
}

double ValueDistribution::surplus_curve(double q) const {
  check_quantile(q);
  if (q == 0.0) return 0.0;
  switch (kind_) {
    case DistributionKind::kExponential:
      return params_[0] * q * (1.0 - std::log(q));
    case DistributionKind::kUniform:
      return params_[1] * q - 0.5 * (params_[1] - params_[0]) * q * q;
    case DistributionKind::kPointMasses: {
      const std::size_t j = segment_of(q);
      return prefix_[j] + (q - xs_[j]) * ys_[j];
    }
    case DistributionKind::kPiecewiseLinear: {
      if (q == 1.0) return prefix_.back();
      const std::size_t j = segment_of(q);
      return prefix_[j] + 0.5 * (ys_[j] + inverse_demand(q)) * (q - xs_[j]);
    }
  }
  return 0.0;
}

double ValueDistribution::consumer_surplus_curve(double q) const {
  check_quantile(q);
  if (q == 0.0) return 0.0;
  if (kind_ == DistributionKind::kExponential) return params_[0] * q;
  if (kind_ == DistributionKind::kUniform && q < 1.0) return 0.5 * (params_[1] - params_[0]) * q * q;
  return surplus_curve(q) - q * inverse_demand(q);
}

double ValueDistribution::consumer_surplus_envelope(double q) const {
  const double here = consumer_surplus_curve(q);
  if (q >= 1.0) return here;
  return std::max(here, surplus_curve(q) - q * inverse_demand_right(q));
}

double ValueDistribution::marginal_consumer_surplus(double q) const {
  check_quantile(q);
  switch (kind_) {
    case DistributionKind::kExponential:
      return params_[0];
    case DistributionKind::kUniform:
      if (q == 1.0 && params_[0] > 0.0) return kInfiniteMarginal;
      return (params_[1] - params_[0]) * q;
    case DistributionKind::kPointMasses: {
      if (q == 0.0) return 0.0;
      const bool at_jump = std::binary_search(xs_.begin() + 1, xs_.end(), q);
      if (at_jump && !(q == 1.0 && ys_.back() == 0.0)) return kInfiniteMarginal;
      return 0.0;
    }
    case DistributionKind::kPiecewiseLinear: {
      if (q == 1.0) {
        if (ys_.back() > 0.0) return kInfiniteMarginal;
        const std::size_t j = xs_.size() - 2;
        return -q * (ys_[j + 1] - ys_[j]) / (xs_[j + 1] - xs_[j]);
      }
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), q);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin()) - 1;
      return -q * (ys_[j + 1] - ys_[j]) / (xs_[j + 1] - xs_[j]);
    }
  }
  return 0.0;
}

std::vector<double> ValueDistribution::knots() const {
  if (kind_ == DistributionKind::kExponential || kind_ == DistributionKind::kUniform) return {0.0, 1.0};
  return xs_;
}

std::vector<double> ValueDistribution::atoms() const {
  if (kind_ == DistributionKind::kPointMasses) return ys_;
  std::vector<double> out;
  if (kind_ == DistributionKind::kPiecewiseLinear) {
    for (std::size_t j = 0; j + 1 < ys_.size(); ++j) {
      if (ys_[j] == ys_[j + 1]) out.push_back(ys_[j]);
    }
  }
  return out;
}

double ValueDistribution::sample(Rng& rng) const {
  return inverse_demand(uniform01_open(rng));
}

}  // namespace pentest
