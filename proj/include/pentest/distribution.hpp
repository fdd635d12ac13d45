#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "pentest/random.hpp"

namespace pentest {

/// Price above every type. Posting it rejects the agent; it is only ever
/// compared against, never used in arithmetic.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Marginal consumer surplus at a discontinuity of the inverse demand.
inline constexpr double kInfiniteMarginal = std::numeric_limits<double>::infinity();

enum class DistributionKind { kExponential, kUniform, kPointMasses, kPiecewiseLinear };

/// A prior over values, represented in quantile space.
///
/// The quantile of a value is the probability mass of strictly stronger
/// values, so quantile 0 is the top of the support. `inverse_demand(q)` is
/// non-increasing and pinned to 0 at q = 1 (the lowest type is truncated to
/// zero; this only affects the single point q = 1).
///
/// Every kind exposes closed forms for the price-posting surplus curve
/// V(q) = int_0^q v, the consumer-surplus curve U(q) = V(q) - q v(q), and
/// its derivative u(q) = -q v'(q).
class ValueDistribution {
 public:
  static ValueDistribution exponential(double mean);
  static ValueDistribution uniform(double lo, double hi);
  /// Discrete prior. Values must be >= 0 and probabilities sum to 1 within
  /// 1e-12; duplicate values are merged and zero-probability atoms dropped.
  static ValueDistribution point_masses(std::vector<double> values, std::vector<double> probabilities);
  static ValueDistribution point_mass(double value) { return point_masses({value}, {1.0}); }
  /// Piecewise-linear inverse demand through (quantile, value) knots. Knot
  /// quantiles must start at 0, end at 1 and be strictly increasing; values
  /// must be finite, non-negative and non-increasing.
  static ValueDistribution piecewise_linear(std::vector<double> knot_quantiles, std::vector<double> knot_values);
  /// Two-column CSV `quantile,value`; a non-numeric first line is a header.
  static ValueDistribution piecewise_linear_from_csv(const std::filesystem::path& path);

  /// Piecewise-linear approximation of a normal(mean, sd) truncated to
  /// [lo, hi], with `knots` equally spaced quantile knots.
  static ValueDistribution truncated_normal_approx(double mean, double sd, double lo, double hi, int knots);
  /// Piecewise-linear approximation of a lognormal(mu, sigma). The top
  /// quantile `top_mass` is flattened to keep v(0) finite.
  static ValueDistribution lognormal_approx(double mu, double sigma, int knots, double top_mass = 1e-6);

  DistributionKind kind() const noexcept { return kind_; }
  std::string describe() const;

  /// v(q). Throws DomainError for q outside [0,1]. Returns kUnbounded at
  /// q = 0 when the support is unbounded.
  double inverse_demand(double q) const;
  /// lim_{t -> q+} v(t); equals inverse_demand except at atoms and at the
  /// lowest type.
  double inverse_demand_right(double q) const;

  /// Pr(value <= v).
  double cdf(double v) const;
  /// Pr(value >= v): the largest quantile whose type is at least v.
  double upper_quantile(double v) const;

  double surplus_curve(double q) const;           // V(q)
  double consumer_surplus_curve(double q) const;  // U(q)
  double marginal_consumer_surplus(double q) const;  // u(q), kInfiniteMarginal at jumps of v
  /// max(U(q), U(q+)): the upper envelope the concave hull has to cover.
  double consumer_surplus_envelope(double q) const;

  double mean() const { return surplus_curve(1.0); }
  bool bounded() const noexcept { return kind_ != DistributionKind::kExponential; }
  double support_max() const { return inverse_demand(0.0); }

  /// Quantiles where U may have a kink or jump; the concave hull of U only
  /// has vertices at these points (plus 0 and 1).
  std::vector<double> knots() const;
  /// Atom locations, empty for atomless priors.
  std::vector<double> atoms() const;

  /// v(q) with q uniform on (0,1).
  double sample(Rng& rng) const;

  // Raw parameters, for serialization.
  const std::vector<double>& params() const noexcept { return params_; }
  const std::vector<double>& knot_quantiles() const noexcept { return xs_; }
  const std::vector<double>& knot_values() const noexcept { return ys_; }

 private:
  ValueDistribution() = default;

  // Index j of the segment/atom containing q: q in (xs_[j], xs_[j+1]].
  std::size_t segment_of(double q) const;

  DistributionKind kind_ = DistributionKind::kExponential;
  std::vector<double> params_;
  // Point masses: xs_ = cumulative masses c_0 = 0 < ... < c_m = 1 and ys_
  // the atom values in decreasing order (ys_[j] lives on (c_j, c_{j+1}]).
  // Piecewise linear: the knots themselves.
  std::vector<double> xs_;
  std::vector<double> ys_;
  // Prefix integrals of v at xs_.
  std::vector<double> prefix_;
};

}  // namespace pentest
