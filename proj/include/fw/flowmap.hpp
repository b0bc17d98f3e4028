#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fw/grid.hpp"
#include "fw/lagrangian.hpp"

namespace fw {

/// Sampled characteristic map x ↦ η(x, t), strictly increasing on the nodes.
struct FlowMap {
  Grid grid;
  std::vector<double> eta;
  double t = 0.0;
  /// ∂ₓη at the nodes when known (q from the ODE); enables invert_smooth.
  std::vector<double> slope;
};

/// Builds a map from raw samples; throws FlowMapError unless strictly increasing.
FlowMap make_flow_map(const Grid& grid, std::vector<double> eta, double t,
                      std::vector<double> slope = {});

/// η = x + eta_disp, slopes from q.
FlowMap flow_map(const LagrangianState& s);

/// η⁻¹(x) by binary search plus linear interpolation. Exact at the samples
/// and for affine maps. Throws FlowMapError outside [η(−X), η(X)].
double invert(const FlowMap& map, double x);

/// η⁻¹(x) on the cubic Hermite interpolant built from η and ∂ₓη (falls back
/// to invert() when no slopes are stored). Same bracket and error contract.
double invert_smooth(const FlowMap& map, double x);

struct SlopeRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};

/// Panel slopes (η_{i+1} − η_i)/h.
SlopeRange discrete_slopes(const FlowMap& map);
/// Panel slopes of the inverse map, h/(η_{i+1} − η_i).
SlopeRange discrete_inverse_slopes(const FlowMap& map);

struct BoundInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// [1 − (3/2) r|t|, 1 + (3/2) r|t|].
BoundInterval slope_bound(const BallGeometry& geometry, double t);
/// [1 − 3r|t|/(2 + 3r|t|), 1 + 3r|t|/(2 − 3r|t|)].
BoundInterval inverse_slope_bound(const BallGeometry& geometry, double t);

/// Measured forward slopes; throws FlowMapError with the offending node when
/// they leave slope_bound widened by tol.
SlopeRange check_slope_bounds(const FlowMap& map, const BallGeometry& geometry, double tol = 1e-9);

/// Measured inverse slopes; throws FlowMapError with the offending node when
/// they leave inverse_slope_bound widened by tol.
SlopeRange inverse_slope_bounds(const FlowMap& map, const BallGeometry& geometry,
                                double tol = 1e-9);

struct EulerianSnapshot {
  double t = 0.0;
  GridFunction u;
  GridFunction ux;
  /// Nodes outside the image of η, set to 0.
  std::size_t out_of_image = 0;
};

enum class Reconstruction {
  /// invert() + linear interpolation of w and v.
  linear,
  /// invert_smooth() + four-point interpolation of w and v.
  cubic,
};

/// u(x) = w(η⁻¹(x)), uₓ(x) = v(η⁻¹(x)).
EulerianSnapshot reconstruct(const LagrangianState& s,
                             Reconstruction order = Reconstruction::cubic);

/// sup |q − (1 + derivative(eta_disp))|: ∂ₓη through two routes.
double q_eta_consistency(const LagrangianState& s);

/// sup |uₓ − derivative(u)| over nodes at least `margin` nodes inside the image.
double ux_route_gap(const EulerianSnapshot& snap, std::size_t margin = 2);

/// CSV `x,u,ux`.
void write_csv(std::ostream& out, const EulerianSnapshot& snap);
/// CSV `x,eta`.
void write_csv(std::ostream& out, const FlowMap& map);

}  // namespace fw
