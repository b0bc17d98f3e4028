#include "fw/flowmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fw/errors.hpp"
#include "fw/format.hpp"

namespace fw {

FlowMap make_flow_map(const Grid& grid, std::vector<double> eta, double t,
                      std::vector<double> slope) {
  if (eta.size() != grid.size()) throw FlowMapError("flow map: sample count does not match grid");
  if (!slope.empty() && slope.size() != grid.size()) {
    throw FlowMapError("flow map: slope count does not match grid");
  }
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i])) {
      throw FlowMapError("flow map: non-finite sample at node " + std::to_string(i));
    }
    if (i > 0 && !(eta[i] > eta[i - 1])) {
      throw FlowMapError("flow map is not strictly increasing at node " + std::to_string(i) +
                         " (x = " + format_real(grid.x(i)) + ", t = " + format_real(t) + ")");
    }
  }
  return {grid, std::move(eta), t, std::move(slope)};
}

FlowMap flow_map(const LagrangianState& s) {
  const Grid& g = s.grid();
  std::vector<double> eta(g.size());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = g.x(i) + s.eta_disp[i];
  const auto q = s.q.values();
  return make_flow_map(g, std::move(eta), s.t, std::vector<double>(q.begin(), q.end()));
}

namespace {

// Panel j with eta[j] <= x <= eta[j+1]; throws outside the image.
std::size_t bracket(const FlowMap& map, double x) {
  const auto& e = map.eta;
  if (!(x >= e.front() && x <= e.back())) {
    throw FlowMapError("x = " + format_real(x) + " is outside the image [" + format_real(e.front()) +
                       ", " + format_real(e.back()) + "] of the flow map at t = " +
                       format_real(map.t));
  }
  const auto it = std::upper_bound(e.begin(), e.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - e.begin());
  return j == 0 ? 0 : std::min(j - 1, e.size() - 2);
}

}  // namespace

double invert(const FlowMap& map, double x) {
  const std::size_t j = bracket(map, x);
  const auto& e = map.eta;
  if (x == e[j]) return map.grid.x(j);
  if (x == e[j + 1]) return map.grid.x(j + 1);
  const double x0 = map.grid.x(j);
  const double x1 = map.grid.x(j + 1);
  const double s = (x - e[j]) / (e[j + 1] - e[j]);
  return x0 + s * (x1 - x0);
}

double invert_smooth(const FlowMap& map, double x) {
  if (map.slope.empty()) return invert(map, x);
  const std::size_t j = bracket(map, x);
  const auto& e = map.eta;
  if (x == e[j]) return map.grid.x(j);
  if (x == e[j + 1]) return map.grid.x(j + 1);
  const double h = map.grid.spacing();
  const double y0 = e[j], y1 = e[j + 1];
  const double m0 = h * map.slope[j], m1 = h * map.slope[j + 1];
  // Hermite cubic on s ∈ [0, 1].
  auto value = [&](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * m1;
  };
  auto slope = [&](double s) {
    const double s2 = s * s;
    return (6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 +
           (3 * s2 - 2 * s) * m1;
  };
  double lo = 0.0, hi = 1.0;
  double s = (x - y0) / (y1 - y0);
  for (int it = 0; it < 60; ++it) {
    const double f = value(s) - x;
    if (f == 0.0) break;
    if (f < 0.0) lo = s; else hi = s;
    const double d = slope(s);
    double next = d > 0.0 ? s - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16) {
      s = next;
      break;
    }
    s = next;
  }
  return map.grid.x(j) + s * h;
}

namespace {

template <class F>
SlopeRange panel_range(const FlowMap& map, F f) {
  SlopeRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0, 0};
  const double h = map.grid.spacing();
  for (std::size_t i = 0; i + 1 < map.eta.size(); ++i) {
    const double s = f(map.eta[i + 1] - map.eta[i], h);
    if (s < r.lo) { r.lo = s; r.argmin = i; }
    if (s > r.hi) { r.hi = s; r.argmax = i; }
  }
  return r;
}

void require_within(const SlopeRange& r, BoundInterval b, double tol, const FlowMap& map,
                    const char* what) {
  auto fail = [&](double value, std::size_t i, const char* side, double bound) {
    throw FlowMapError(std::string(what) + " " + format_real(value) + " on panel " +
                       std::to_string(i) + " (x = " + format_real(map.grid.x(i)) + ", t = " +
                       format_real(map.t) + ") is " + side + " the bound " + format_real(bound));
  };
  if (r.lo < b.lo - tol) fail(r.lo, r.argmin, "below", b.lo);
  if (r.hi > b.hi + tol) fail(r.hi, r.argmax, "above", b.hi);
}

}  // namespace

SlopeRange discrete_slopes(const FlowMap& map) {
  return panel_range(map, [](double de, double h) { return de / h; });
}

SlopeRange discrete_inverse_slopes(const FlowMap& map) {
  return panel_range(map, [](double de, double h) { return h / de; });
}

BoundInterval slope_bound(const BallGeometry& geometry, double t) {
  const double a = 1.5 * geometry.r * std::abs(t);
  return {1.0 - a, 1.0 + a};
}

BoundInterval inverse_slope_bound(const BallGeometry& geometry, double t) {
  const double a = 3.0 * geometry.r * std::abs(t);
  const double hi = a < 2.0 ? 1.0 + a / (2.0 - a) : std::numeric_limits<double>::infinity();
  return {1.0 - a / (2.0 + a), hi};
}

SlopeRange check_slope_bounds(const FlowMap& map, const BallGeometry& geometry, double tol) {
  const SlopeRange r = discrete_slopes(map);
  require_within(r, slope_bound(geometry, map.t), tol, map, "flow-map slope");
  return r;
}

SlopeRange inverse_slope_bounds(const FlowMap& map, const BallGeometry& geometry, double tol) {
  const SlopeRange r = discrete_inverse_slopes(map);
  require_within(r, inverse_slope_bound(geometry, map.t), tol, map, "inverse flow-map slope");
  return r;
}

EulerianSnapshot reconstruct(const LagrangianState& s, Reconstruction order) {
  const Grid& g = s.grid();
  const FlowMap map = flow_map(s);
  const std::size_t n = g.size();
  std::vector<double> u(n, 0.0), ux(n, 0.0);
  std::size_t outside = 0;
  const double lo = map.eta.front(), hi = map.eta.back();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    if (x < lo || x > hi) {
      ++outside;
      continue;
    }
    if (order == Reconstruction::linear) {
      const double xi = invert(map, x);
      u[i] = interpolate(s.w, xi);
      ux[i] = interpolate(s.v, xi);
    } else {
      const double xi = invert_smooth(map, x);
      u[i] = interpolate_cubic(g, s.w.values(), xi);
      ux[i] = interpolate_cubic(g, s.v.values(), xi);
    }
  }
  return {s.t, GridFunction(g, std::move(u)), GridFunction(g, std::move(ux)), outside};
}

double q_eta_consistency(const LagrangianState& s) {
  const GridFunction d = derivative(s.eta_disp);
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m = std::max(m, std::abs(s.q[i] - 1.0 - d[i]));
  return m;
}

double ux_route_gap(const EulerianSnapshot& snap, std::size_t margin) {
  const GridFunction du = derivative(snap.u);
  const std::size_t n = du.size();
  // Keep away from the grid ends and from any out-of-image zeros.
  const std::size_t skip = margin + snap.out_of_image;
  double m = 0.0;
  for (std::size_t i = skip; i + skip < n; ++i) m = std::max(m, std::abs(snap.ux[i] - du[i]));
  return m;
}

void write_csv(std::ostream& out, const EulerianSnapshot& snap) {
  out << "x,u,ux\n";
  const Grid& g = snap.u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << format_real(g.x(i)) << ',' << format_real(snap.u[i]) << ',' << format_real(snap.ux[i])
        << '\n';
  }
}

void write_csv(std::ostream& out, const FlowMap& map) {
  out << "x,eta\n";
  for (std::size_t i = 0; i < map.eta.size(); ++i) {
    out << format_real(map.grid.x(i)) << ',' << format_real(map.eta[i]) << '\n';
  }
}

}  // namespace fw
