#include "fw/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "fw/errors.hpp"
#include "fw/format.hpp"

namespace fw {

const char* to_string(GuardMode mode) { return mode == GuardMode::enforce ? "enforce" : "warn"; }

GuardMode parse_guard_mode(const std::string& text) {
  if (text == "enforce") return GuardMode::enforce;
  if (text == "warn") return GuardMode::warn;
  throw ConfigError("guard mode must be 'enforce' or 'warn', got '" + text + "'");
}

bool is_c1_compatible(const GridFunction& u0) {
  const double scale = c1_norm(u0);
  if (scale == 0.0) return true;
  return kink_indicator(u0) <= 5.0 * u0.grid().spacing() * scale;
}

LagrangianState initial_state(const GridFunction& u0, double boundary_tolerance, GuardMode mode,
                              std::vector<std::string>* warnings) {
  check_boundary_decay(u0, boundary_tolerance);
  if (!is_c1_compatible(u0)) {
    const std::string msg =
        "initial data is not C^1 on this grid: slope jump of " + format_real(kink_indicator(u0)) +
        " detected (v = u0' would be discontinuous, so the chain-rule compatibility "
        "dw/dx = v q fails at the kink)";
    if (mode == GuardMode::enforce) throw InitialDataError(msg);
    if (warnings) warnings->push_back(msg);
  }
  const Grid& g = u0.grid();
  return {0.0, u0, derivative(u0), GridFunction::constant(g, 1.0), GridFunction::zeros(g)};
}

BallGeometry ball_geometry(const GridFunction& u0, double r0) {
  if (!(r0 > 0.0 && r0 < 1.0 / 9.0)) {
    throw ConfigError("ball radius r0 must satisfy 0 < r0 < 1/9, got " + format_real(r0));
  }
  BallGeometry b;
  b.r0 = r0;
  const double c1 = c1_norm(u0);
  b.y0_norm = c1 + sup_norm(derivative(u0)) + 1.0;
  b.r = r0 + b.y0_norm;
  b.r_l = 1.0 - r0;
  b.r_u = 1.0 + r0;
  b.L = 50.0 * b.r / 9.0;
  b.T_theoretical = 9.0 / (100.0 * b.r);
  b.intro_lifespan = c1 > 0.0 ? 9.0 / (100.0 * c1) : std::numeric_limits<double>::infinity();
  return b;
}

double y_norm(const GridFunction& w, const GridFunction& v, const GridFunction& q) {
  return c1_norm(w) + sup_norm(v) + sup_norm(q);
}

double y_norm(const LagrangianState& s) { return y_norm(s.w, s.v, s.q); }

double y_norm(const Tendency& t) { return y_norm(t.w, t.v, t.q); }

double chain_rule_defect(const LagrangianState& s) {
  const GridFunction dw = derivative(s.w);
  double m = 0.0;
  for (std::size_t i = 0; i < dw.size(); ++i) m = std::max(m, std::abs(dw[i] - s.v[i] * s.q[i]));
  return m;
}

Tendency rhs(const LagrangianState& s, const StepOptions& options) {
  const Grid& g = s.grid();
  const KernelPair k = kernel_pair(s.w, s.q, options.kernel_path, options.q_floor);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
  std::vector<double> dv(g.size()), dq(g.size()), de(g.size());
  const auto w = s.w.values();
  const auto v = s.v.values();
  const auto q = s.q.values();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    dv[i] = k.p2[i] - w[i] - 1.5 * v[i] * v[i];
    dq[i] = 1.5 * v[i] * q[i];
    de[i] = 1.5 * w[i];
  }
  return {k.p1, GridFunction(g, std::move(dv)), GridFunction(g, std::move(dq)),
          GridFunction(g, std::move(de))};
}

namespace {

std::vector<double> axpy(const GridFunction& y, double a, const GridFunction& k) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

void check_q(std::span<const double> q, double floor, double t, int stage) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > floor)) {
      throw GuardBreach("q = " + format_real(q[i]) + " <= q_floor = " + format_real(floor) +
                            " at node " + std::to_string(i) +
                            (stage > 0 ? " in RK stage " + std::to_string(stage)
                                       : std::string(" after the step")) +
                            " (t = " + format_real(t) + ")",
                        t, i, stage);
    }
  }
}

// Any non-finite value means the solution left the representable regime.
GridFunction guarded(const Grid& g, std::vector<double> v, double t, int stage) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw GuardBreach("non-finite value at node " + std::to_string(i) + " in RK stage " +
                            std::to_string(stage) + " (t = " + format_real(t) + ")",
                        t, i, stage);
    }
  }
  return GridFunction(g, std::move(v));
}

LagrangianState advance(const LagrangianState& s, double a, const Tendency& k, double t,
                        double floor, int stage) {
  const Grid& g = s.grid();
  GridFunction q = guarded(g, axpy(s.q, a, k.q), t, stage);
  check_q(q.values(), floor, t, stage);
  return {t, guarded(g, axpy(s.w, a, k.w), t, stage), guarded(g, axpy(s.v, a, k.v), t, stage),
          std::move(q), guarded(g, axpy(s.eta_disp, a, k.eta_disp), t, stage)};
}

Tendency evaluate(const LagrangianState& s, const StepOptions& options, int stage) {
  try {
    return rhs(s, options);
  } catch (const MonotonicityLoss& e) {
    throw GuardBreach(std::string(e.what()) + " in RK stage " + std::to_string(stage) +
                          " (t = " + format_real(s.t) + ")",
                      s.t, e.index(), stage);
  }
}

}  // namespace

LagrangianState step(const LagrangianState& s, double dt, const StepOptions& options) {
  const double f = options.q_floor;
  const Tendency k1 = evaluate(s, options, 1);
  const LagrangianState s2 = advance(s, 0.5 * dt, k1, s.t + 0.5 * dt, f, 2);
  const Tendency k2 = evaluate(s2, options, 2);
  const LagrangianState s3 = advance(s, 0.5 * dt, k2, s.t + 0.5 * dt, f, 3);
  const Tendency k3 = evaluate(s3, options, 3);
  const LagrangianState s4 = advance(s, dt, k3, s.t + dt, f, 4);
  const Tendency k4 = evaluate(s4, options, 4);

  const Grid& g = s.grid();
  const std::size_t n = g.size();
  const double c = dt / 6.0;
  auto combine = [&](const GridFunction& y, const GridFunction& a, const GridFunction& b,
                     const GridFunction& cc, const GridFunction& d) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + c * (a[i] + 2.0 * b[i] + 2.0 * cc[i] + d[i]);
    return out;
  };
  const double t = s.t + dt;
  GridFunction qf = guarded(g, combine(s.q, k1.q, k2.q, k3.q, k4.q), t, 0);
  check_q(qf.values(), f, t, 0);
  return {t, guarded(g, combine(s.w, k1.w, k2.w, k3.w, k4.w), t, 0),
          guarded(g, combine(s.v, k1.v, k2.v, k3.v, k4.v), t, 0), std::move(qf),
          guarded(g, combine(s.eta_disp, k1.eta_disp, k2.eta_disp, k3.eta_disp, k4.eta_disp), t, 0)};
}

TimePlan plan_steps(const BallGeometry& geometry, const SolverConfig& config) {
  TimePlan plan;
  const double T = geometry.T_theoretical;
  plan.t_end = config.t_end.value_or(T);
  if (!std::isfinite(plan.t_end)) throw ConfigError("t_end must be finite");
  if (config.guard_mode == GuardMode::enforce && std::abs(plan.t_end) > T * (1.0 + 1e-12)) {
    throw ConfigError("|t_end| = " + format_real(std::abs(plan.t_end)) +
                      " exceeds the guaranteed lifespan T = " + format_real(T) +
                      "; use guard mode 'warn' to integrate past it");
  }
  const double dt = config.dt.value_or(std::min(config.grid.spacing(), T / 200.0));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (plan.t_end == 0.0) return plan;
  plan.steps = static_cast<std::size_t>(std::ceil(std::abs(plan.t_end) / dt - 1e-9));
  plan.steps = std::max<std::size_t>(plan.steps, 1);
  plan.dt = plan.t_end / static_cast<double>(plan.steps);
  return plan;
}

Trajectory integrate(const GridFunction& u0, const SolverConfig& config) {
  require_same_grid(u0.grid(), config.grid, "integrate");
  Trajectory traj;
  traj.geometry = ball_geometry(u0, config.r0);
  const TimePlan plan = plan_steps(traj.geometry, config);
  traj.config = config;
  traj.config.t_end = plan.t_end;
  traj.config.dt = plan.steps > 0 ? std::abs(plan.dt) : config.dt.value_or(0.0);
  traj.states.reserve(plan.steps + 1);
  traj.states.push_back(initial_state(u0, config.boundary_tolerance, config.guard_mode, &traj.warnings));
  const StepOptions options{config.q_floor, config.kernel_path};
  for (std::size_t k = 0; k < plan.steps; ++k) {
    try {
      LagrangianState next = step(traj.states.back(), plan.dt, options);
      // Pin the clock to the uniform schedule.
      next.t = plan.dt * static_cast<double>(k + 1);
      traj.states.push_back(std::move(next));
    } catch (const GuardBreach& e) {
      traj.breach = e.what();
      traj.breach_time = e.time();
      break;
    }
  }
  return traj;
}

}  // namespace fw
