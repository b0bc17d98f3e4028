#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fw/flowmap.hpp"
#include "fw/grid.hpp"
#include "fw/lagrangian.hpp"
#include "fw/nonlocal.hpp"

namespace fw {

struct ConservedTriple {
  double e1 = 0.0;  ///< ∫u
  double e2 = 0.0;  ///< ∫u²
  double e3 = 0.0;  ///< ∫(u (1−∂²)⁻¹u − u³)
};

/// Eulerian quadrature of the three functionals; e3 uses helmholtz_inverse.
ConservedTriple conserved(const GridFunction& u, KernelPath path = KernelPath::fast);

/// Same functionals pulled back through x = η(z): ∫ w q dz, ∫ w² q dz,
/// ∫ (w P₂(w,q) − w³) q dz. Needs no inversion or interpolation.
ConservedTriple conserved(const LagrangianState& s);

/// ∫(2u(1−∂²)⁻¹u − u³) in the same Lagrangian form: the cubic functional
/// that is invariant under u_t + (3/2)uuₓ = ∂(1−∂²)⁻¹u.
double cubic_invariant(const LagrangianState& s);

/// |now − initial| / max(|initial|, floor).
double relative_drift(double now, double initial, double floor = 1e-3);

/// Reconstructs every stored state.
std::vector<EulerianSnapshot> reconstruct_all(const Trajectory& traj,
                                              Reconstruction order = Reconstruction::cubic);

/// Pointwise u_t + (3/2) u uₓ − ∂(1−∂²)⁻¹u.
GridFunction residual_field(const GridFunction& ut, const GridFunction& u, const GridFunction& ux);

/// Sup of the residual at snaps[index] with u_t from central differences of
/// the neighbours. Nodes outside the image at any of the three times and the
/// two end nodes are skipped. Throws ConfigError at either end of the series.
double pde_residual(const std::vector<EulerianSnapshot>& snaps, std::size_t index);

/// As above at the stored time closest to t (within 10⁻⁶ dt).
double pde_residual(const Trajectory& traj, double t);

enum class PeakonBranch {
  /// (8/9) e^{−|x − 4t/3|/2}.
  literal,
  /// −(8/9) e^{−|x + 4t/3|/2}, the image of the literal peakon under u ↦ −u(−x, t).
  mirrored,
};

/// Exact sampled peakon. Throws ConfigError unless the crest is at least 5
/// from ±X.
GridFunction peakon(double t, const Grid& grid, PeakonBranch branch = PeakonBranch::literal);

/// Crest location of the chosen branch at time t.
double peakon_crest(double t, PeakonBranch branch = PeakonBranch::literal);

/// Sup over nodes farther than exclusion from the crest of the residual of
/// the exact peakon, with u_t and uₓ in closed form and the nonlocal term
/// from green_derivative.
double peakon_residual(double t, const Grid& grid, double exclusion,
                       PeakonBranch branch = PeakonBranch::mirrored);

enum class OracleMode {
  full,
  /// u_t + c uₓ = 0 with the speed frozen.
  linear_advection,
};

struct OracleOptions {
  OracleMode mode = OracleMode::full;
  double advection_speed = 1.0;
};

/// Method of lines on u_t + ((3/4)u²)ₓ = ∂(1−∂²)⁻¹u: flux split into
/// upwind parts with second-order one-sided differences, nonlocal term via
/// green_derivative, RK4 on the plan_steps schedule. uₓ in the snapshots is
/// derivative(u). Throws ConfigError if dt > h / ((3/2) sup|u|) at any step.
std::vector<EulerianSnapshot> eulerian_oracle(const GridFunction& u0, const SolverConfig& config,
                                              const OracleOptions& options = {});

struct BreakingEvent {
  double t = 0.0;
  std::size_t node = 0;
  double x = 0.0;
};

/// Integrates in warn mode to t_max (config.t_end when unset) and reports the
/// first q_floor breach. Throws ConfigError unless guard_mode is warn.
std::optional<BreakingEvent> wave_breaking_probe(const GridFunction& u0, const SolverConfig& config,
                                                 std::optional<double> t_max = std::nullopt);

struct DiagnosticRow {
  double t = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double min_q = 0.0;
  double sup_u = 0.0;
  double sup_ux = 0.0;
  /// NaN at the first and last stored time.
  double residual = 0.0;
};

std::vector<DiagnosticRow> diagnostic_series(const Trajectory& traj,
                                             const std::vector<EulerianSnapshot>& snaps);

/// CSV `t,e1,e2,e3,min_q,sup_u,sup_ux,residual`.
void write_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);

}  // namespace fw
