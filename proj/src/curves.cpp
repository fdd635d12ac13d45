#include "pentest/curves.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pentest/errors.hpp"

namespace pentest {

namespace {

struct Point {
  double q;
  double y;
};

// Upper concave hull by monotone chain. Points must be sorted by q with
// distinct abscissae. A point on or below the chord of its neighbours (up
// to a relative 1e-13) is dropped.
std::vector<Point> upper_hull(const std::vector<Point>& pts) {
  std::vector<Point> hull;
  hull.reserve(pts.size());
  for (const Point& p : pts) {
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double chord = a.y + (p.y - a.y) * (b.q - a.q) / (p.q - a.q);
      if (b.y <= chord + 1e-13 * std::max(1.0, std::abs(b.y))) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

}  // namespace

std::size_t CurveBundle::hull_segment(double q) const {
  if (q <= hull_q.front()) return 0;
  const auto it = std::lower_bound(hull_q.begin() + 1, hull_q.end(), q);
  const auto idx = static_cast<std::size_t>(it - hull_q.begin());
  return std::min(idx, hull_q.size() - 1) - 1;
}

double CurveBundle::ironed_value(double q) const {
  if (!ironed()) throw std::logic_error("curve bundle has not been ironed");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0,1]");
  const std::size_t k = hull_segment(q);
  if (q == hull_q[k + 1]) return hull_U[k + 1];
  return hull_U[k] + hull_slope[k] * (q - hull_q[k]);
}

double CurveBundle::ironed_marginal(double q) const {
  if (!ironed()) throw std::logic_error("curve bundle has not been ironed");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0,1]");
  return hull_slope[hull_segment(q)];
}

CurveBundle build_curves(const ValueDistribution& dist, std::size_t resolution, SurplusRoute route) {
  if (resolution < 2) throw DomainError("grid resolution must be at least 2");
  CurveBundle b{.dist = dist};
  const std::size_t n = resolution + 1;
  b.grid.resize(n);
  b.v.resize(n);
  b.V.resize(n);
  b.U.resize(n);
  b.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.grid[i] = (i == resolution) ? 1.0 : static_cast<double>(i) / static_cast<double>(resolution);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double q = b.grid[i];
    b.v[i] = dist.inverse_demand(q);
    b.u[i] = dist.marginal_consumer_surplus(q);
  }
  if (route == SurplusRoute::kClosedForm) {
    for (std::size_t i = 0; i < n; ++i) b.V[i] = dist.surplus_curve(b.grid[i]);
  } else {
    const double offset = 0.5 / std::sqrt(3.0);
    b.V[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double lo = b.grid[i - 1];
      const double h = b.grid[i] - lo;
      const double mid = lo + 0.5 * h;
      const double cell = 0.5 * h * (dist.inverse_demand(mid - offset * h) + dist.inverse_demand(mid + offset * h));
      b.V[i] = b.V[i - 1] + cell;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double q = b.grid[i];
    if (q == 0.0) {
      b.U[i] = 0.0;
    } else if (route == SurplusRoute::kClosedForm) {
      b.U[i] = dist.consumer_surplus_curve(q);
    } else {
      b.U[i] = b.V[i] - q * b.v[i];
    }
  }
  return b;
}

CurveBundle iron(CurveBundle b) {
  const std::size_t n = b.grid.size();
  std::vector<double> envelope(n);
  for (std::size_t i = 0; i < n; ++i) {
    envelope[i] = std::max(b.U[i], b.dist.consumer_surplus_envelope(b.grid[i]));
  }

  std::vector<Point> pts;
  pts.reserve(n + b.dist.knots().size());
  for (std::size_t i = 0; i < n; ++i) pts.push_back({b.grid[i], envelope[i]});
  for (double q : b.dist.knots()) pts.push_back({q, b.dist.consumer_surplus_envelope(q)});
  std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) { return x.q < y.q; });
  std::vector<Point> merged;
  merged.reserve(pts.size());
  for (const Point& p : pts) {
    if (!merged.empty() && merged.back().q == p.q) {
      merged.back().y = std::max(merged.back().y, p.y);
    } else {
      merged.push_back(p);
    }
  }
  // Pin the endpoints to U itself: Ū(0) = U(0) and Ū(1) = U(1).
  merged.front().y = b.U.front();
  merged.back().y = b.U.back();

  const auto hull = upper_hull(merged);
  b.hull_q.clear();
  b.hull_U.clear();
  b.hull_slope.clear();
  for (const Point& p : hull) {
    b.hull_q.push_back(p.q);
    b.hull_U.push_back(p.y);
  }
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    b.hull_slope.push_back((hull[k + 1].y - hull[k].y) / (hull[k + 1].q - hull[k].q));
  }

  b.U_ironed.resize(n);
  b.u_ironed.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.U_ironed[i] = b.ironed_value(b.grid[i]);
    b.u_ironed[i] = b.ironed_marginal(b.grid[i]);
  }

  // Touch points: grid points where the hull meets U (or its right limit),
  // plus the hull vertices. Between two consecutive touch points that
  // enclose a non-touching grid point the hull is strictly above U.
  const double scale = std::max(1.0, std::abs(b.hull_U.back()));
  std::vector<char> touch(n);
  std::vector<double> touches(b.hull_q);
  for (std::size_t i = 0; i < n; ++i) {
    touch[i] = (b.U_ironed[i] - envelope[i] <= 1e-12 * scale) ? 1 : 0;
    if (touch[i]) touches.push_back(b.grid[i]);
  }
  std::sort(touches.begin(), touches.end());
  touches.erase(std::unique(touches.begin(), touches.end()), touches.end());
  b.ironed_intervals.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (touch[i]) continue;
    const double q = b.grid[i];
    const auto hi_it = std::upper_bound(touches.begin(), touches.end(), q);
    const double hi = (hi_it == touches.end()) ? 1.0 : *hi_it;
    const double lo = (hi_it == touches.begin()) ? 0.0 : *(hi_it - 1);
    if (b.ironed_intervals.empty() || b.ironed_intervals.back().hi != hi) {
      b.ironed_intervals.push_back({lo, hi});
    }
  }
  return b;
}

CurveBundle ironed_curves(const ValueDistribution& dist, std::size_t resolution) {
  return iron(build_curves(dist, resolution));
}

VirtualPrice virtual_price(const CurveBundle& bundle, double vhat) {
  if (!(vhat >= 0.0)) throw DomainError("virtual price must be non-negative");
  if (!bundle.ironed()) throw std::logic_error("curve bundle has not been ironed");
  // Slopes are non-increasing, so {q : ū(q) >= vhat} = [0, hull_q[count]].
  const auto count = static_cast<std::size_t>(
      std::partition_point(bundle.hull_slope.begin(), bundle.hull_slope.end(),
                           [vhat](double s) { return s >= vhat; }) -
      bundle.hull_slope.begin());
  const double theta = (count == 0) ? 0.0 : bundle.hull_q[count];
  return {theta, bundle.dist.inverse_demand(theta)};
}

double virtual_posted_price(const CurveBundle& bundle, double vhat) {
  const double theta = virtual_price(bundle, vhat).theta;
  if (theta == 0.0) return kUnbounded;
  if (theta == 1.0) return 0.0;
  // Strictly above the type just below theta, so an atom straddling theta
  // is excluded as a whole.
  return std::nextafter(bundle.dist.inverse_demand_right(theta), kUnbounded);
}

std::vector<double> surplus_from_consumer_surplus(const std::vector<double>& grid, const std::vector<double>& U) {
  if (grid.size() != U.size() || grid.size() < 2) {
    throw DomainError("grid and curve must have equal length >= 2");
  }
  const std::size_t n = grid.size();
  std::vector<double> V(n, 0.0);
  double tail = 0.0;  // int_{q_i}^1 U(t)/t^2 dt
  V[n - 1] = U[n - 1];
  for (std::size_t i = n - 1; i-- > 1;) {
    const double f0 = U[i] / (grid[i] * grid[i]);
    const double f1 = U[i + 1] / (grid[i + 1] * grid[i + 1]);
    tail += 0.5 * (grid[i + 1] - grid[i]) * (f0 + f1);
    V[i] = grid[i] * (U[n - 1] + tail);
  }
  V[0] = 0.0;
  return V;
}

double opt_cs_ex_ante(const CurveBundle& bundle, double q) {
  return bundle.ironed_value(q);
}

}  // namespace pentest
