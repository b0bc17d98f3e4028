#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fw/grid.hpp"
#include "fw/nonlocal.hpp"

namespace fw {

/// The characteristic-coordinate unknowns at one time level:
/// w = u∘η, v = uₓ∘η, q = ∂ₓη, plus the displacement η(x,t) − x.
struct LagrangianState {
  double t = 0.0;
  GridFunction w;
  GridFunction v;
  GridFunction q;
  GridFunction eta_disp;

  const Grid& grid() const { return w.grid(); }
};

/// Time derivative of every component of a LagrangianState.
struct Tendency {
  GridFunction w;
  GridFunction v;
  GridFunction q;
  GridFunction eta_disp;
};

/// Constants of the local Lipschitz estimate around y₀ = (u₀, u₀′, 1).
struct BallGeometry {
  double r0 = 0.0;
  double y0_norm = 0.0;  ///< ‖u₀‖_{C¹} + ‖u₀′‖_C + ‖1‖_C
  double r = 0.0;        ///< r0 + y0_norm
  double r_l = 0.0;      ///< 1 − r0, lower bound of q in the ball
  double r_u = 0.0;      ///< 1 + r0, upper bound of q in the ball
  double L = 0.0;        ///< (50/9) r
  double T_theoretical = 0.0;  ///< 1/(2L) = 9/(100 r)
  /// 9/(100 ‖u₀‖_{C¹}); infinite for zero data. Reported, never enforced.
  double intro_lifespan = 0.0;
};

enum class GuardMode { enforce, warn };

const char* to_string(GuardMode mode);
GuardMode parse_guard_mode(const std::string& text);

struct SolverConfig {
  Grid grid{20.0, 2001};
  std::optional<double> dt;     ///< nullopt: min(h, T_theoretical/200)
  std::optional<double> t_end;  ///< nullopt: T_theoretical
  double r0 = 0.1;
  double q_floor = kDefaultQFloor;
  double boundary_tolerance = 1e-8;
  GuardMode guard_mode = GuardMode::enforce;
  KernelPath kernel_path = KernelPath::fast;
};

/// Fails with InitialDataError when boundary decay is violated; a slope
/// discontinuity (see is_c1_compatible) is rejected in enforce mode and
/// appended to *warnings in warn mode.
LagrangianState initial_state(const GridFunction& u0, double boundary_tolerance = 1e-8,
                              GuardMode mode = GuardMode::enforce,
                              std::vector<std::string>* warnings = nullptr);

/// True when the grid sees no slope jump larger than 5 h ‖u₀‖_{C¹}. A C¹
/// profile gives a kink indicator of order h³, a kink gives the jump itself.
bool is_c1_compatible(const GridFunction& u0);

BallGeometry ball_geometry(const GridFunction& u0, double r0);

/// ‖(w, v, q)‖_Y = ‖w‖_{C¹} + ‖v‖_C + ‖q‖_C.
double y_norm(const GridFunction& w, const GridFunction& v, const GridFunction& q);
double y_norm(const LagrangianState& s);
/// Y-norm of the (w, v, q) part of a tendency.
double y_norm(const Tendency& t);

/// sup |derivative(w) − v q|: discrete form of ∂ₓw = uₓ(η) ηₓ.
double chain_rule_defect(const LagrangianState& s);

struct StepOptions {
  double q_floor = kDefaultQFloor;
  KernelPath kernel_path = KernelPath::fast;
};

/// ∂ₜw = P₁(w,q), ∂ₜv = P₂(w,q) − w − (3/2)v², ∂ₜq = (3/2) v q, ∂ₜ(η − x) = (3/2) w.
Tendency rhs(const LagrangianState& s, const StepOptions& options = {});

/// One classical RK4 step of size dt (negative dt steps backward). Throws
/// GuardBreach naming the stage and node if any stage or the result has
/// q <= q_floor.
LagrangianState step(const LagrangianState& s, double dt, const StepOptions& options = {});

struct Trajectory {
  BallGeometry geometry;
  SolverConfig config;  ///< dt and t_end resolved
  std::vector<LagrangianState> states;
  std::vector<std::string> warnings;
  /// Set when a guard stopped the run; states keeps everything up to the
  /// last valid step.
  std::optional<std::string> breach;
  double breach_time = 0.0;

  const LagrangianState& initial() const { return states.front(); }
  const LagrangianState& final_state() const { return states.back(); }
  bool completed() const { return !breach.has_value(); }
};

/// Resolved time step and horizon for u0 under config.
struct TimePlan {
  double dt = 0.0;  ///< signed, |dt| <= requested dt
  double t_end = 0.0;
  std::size_t steps = 0;
};

TimePlan plan_steps(const BallGeometry& geometry, const SolverConfig& config);

/// Integrates from t = 0 to t_end with fixed-step RK4 and stores every step.
/// Throws ConfigError when |t_end| > T_theoretical in enforce mode.
Trajectory integrate(const GridFunction& u0, const SolverConfig& config);

}  // namespace fw
