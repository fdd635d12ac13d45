#pragma once

#include <cstddef>
#include <vector>

#include "pentest/distribution.hpp"

namespace pentest {

inline constexpr std::size_t kDefaultGridResolution = 10000;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class SurplusRoute {
  kClosedForm,  // V from the distribution's closed form
  kQuadrature,  // V by cumulative two-point Gauss-Legendre on each grid cell
};

/// Surplus and consumer-surplus curves of one distribution, sampled on the
/// uniform grid q_i = i / resolution, i = 0..resolution.
///
/// The ironed members are empty until `iron` has been applied.
struct CurveBundle {
  ValueDistribution dist;
  std::vector<double> grid;
  std::vector<double> v;
  std::vector<double> V;
  std::vector<double> U;
  std::vector<double> u;  // kInfiniteMarginal at jumps of v
  std::vector<double> U_ironed;
  std::vector<double> u_ironed;
  std::vector<Interval> ironed_intervals;

  // Vertices of the concave hull (strictly increasing quantiles, first at 0
  // and last at 1) and the slope of each hull segment.
  std::vector<double> hull_q;
  std::vector<double> hull_U;
  std::vector<double> hull_slope;

  bool ironed() const noexcept { return !hull_q.empty(); }
  std::size_t resolution() const noexcept { return grid.size() - 1; }

  /// Ū(q), evaluated exactly from the hull rather than the grid.
  double ironed_value(double q) const;
  /// ū(q): slope of the hull segment containing q from the left; at q = 0,
  /// the slope of the first segment.
  double ironed_marginal(double q) const;
  /// Index of the hull segment ū(q) is read from.
  std::size_t hull_segment(double q) const;
};

/// Samples V, U, u on the grid. Throws DomainError if resolution < 2.
CurveBundle build_curves(const ValueDistribution& dist,
                         std::size_t resolution = kDefaultGridResolution,
                         SurplusRoute route = SurplusRoute::kClosedForm);

/// Least concave majorant of U (and of its right limits at jumps of v), its
/// left derivative, and the maximal open intervals where it lies strictly
/// above U. Idempotent.
CurveBundle iron(CurveBundle bundle);

/// Convenience: build_curves followed by iron.
CurveBundle ironed_curves(const ValueDistribution& dist, std::size_t resolution = kDefaultGridResolution);

struct VirtualPrice {
  double theta = 0.0;  // quantile
  double price = 0.0;  // v(theta)
};

/// theta = sup{q in [0,1] : ū(q) >= vhat} (0 when the set is empty) and
/// price = v(theta). Requires an ironed bundle; throws DomainError for
/// vhat < 0 or NaN.
VirtualPrice virtual_price(const CurveBundle& bundle, double vhat);

/// Price a single agent is offered when the ironed virtual price is vhat:
/// the smallest price at which exactly quantile mass theta stays. Returns
/// kUnbounded when theta = 0 (the agent is rejected) and 0 when theta = 1.
/// For atomless priors this is v(theta) up to one ulp.
double virtual_posted_price(const CurveBundle& bundle, double vhat);

/// Rebuilds V from U on the grid through V(q) = q U(1) + q int_q^1 U(t)/t^2 dt
/// (trapezoid in t). V(0) = 0.
std::vector<double> surplus_from_consumer_surplus(const std::vector<double>& grid, const std::vector<double>& U);

/// Optimal consumer surplus of one agent under ex-ante allocation
/// probability q: Ū(q).
double opt_cs_ex_ante(const CurveBundle& bundle, double q);

}  // namespace pentest
