#include "fw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fw/errors.hpp"
#include "fw/format.hpp"

namespace fw {

ConservedTriple conserved(const GridFunction& u, KernelPath path) {
  const Grid& g = u.grid();
  const GridFunction ku = helmholtz_inverse(u, path);
  std::vector<double> sq(u.size()), cubic(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    sq[i] = u[i] * u[i];
    cubic[i] = u[i] * ku[i] - sq[i] * u[i];
  }
  return {quadrature(u), quadrature(g, sq), quadrature(g, cubic)};
}

namespace {

// ∫ f(w, P₂) q dz for the three pulled-back densities plus the invariant.
struct PulledBack {
  ConservedTriple triple;
  double invariant = 0.0;
};

PulledBack pulled_back(const LagrangianState& s) {
  const Grid& g = s.grid();
  const GridFunction kw = p2(s.w, s.q, KernelPath::fast, 0.0);
  const std::size_t n = g.size();
  std::vector<double> a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = s.w[i], q = s.q[i];
    a[i] = w * q;
    b[i] = w * w * q;
    c[i] = (w * kw[i] - w * w * w) * q;
    d[i] = (2.0 * w * kw[i] - w * w * w) * q;
  }
  return {{quadrature(g, a), quadrature(g, b), quadrature(g, c)}, quadrature(g, d)};
}

}  // namespace

ConservedTriple conserved(const LagrangianState& s) { return pulled_back(s).triple; }

double cubic_invariant(const LagrangianState& s) { return pulled_back(s).invariant; }

double relative_drift(double now, double initial, double floor) {
  return std::abs(now - initial) / std::max(std::abs(initial), floor);
}

std::vector<EulerianSnapshot> reconstruct_all(const Trajectory& traj, Reconstruction order) {
  std::vector<EulerianSnapshot> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(reconstruct(s, order));
  return out;
}

GridFunction residual_field(const GridFunction& ut, const GridFunction& u, const GridFunction& ux) {
  const GridFunction nl = green_derivative(u);
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ut[i] + 1.5 * u[i] * ux[i] - nl[i];
  return GridFunction(u.grid(), std::move(r));
}

double pde_residual(const std::vector<EulerianSnapshot>& snaps, std::size_t index) {
  if (index == 0 || index + 1 >= snaps.size()) {
    throw ConfigError("pde residual needs a stored time with neighbours on both sides; index " +
                      std::to_string(index) + " of " + std::to_string(snaps.size()) +
                      " is at the trajectory boundary");
  }
  const EulerianSnapshot& prev = snaps[index - 1];
  const EulerianSnapshot& cur = snaps[index];
  const EulerianSnapshot& next = snaps[index + 1];
  const Grid& g = cur.u.grid();
  const double span = next.t - prev.t;
  std::vector<double> ut(g.size());
  for (std::size_t i = 0; i < ut.size(); ++i) ut[i] = (next.u[i] - prev.u[i]) / span;
  const GridFunction r = residual_field(GridFunction(g, std::move(ut)), cur.u, cur.ux);
  // Out-of-image zeros sit at the two ends; skip the widest band of them.
  const std::size_t skip =
      1 + std::max({prev.out_of_image, cur.out_of_image, next.out_of_image});
  double m = 0.0;
  for (std::size_t i = skip; i + skip < g.size(); ++i) m = std::max(m, std::abs(r[i]));
  return m;
}

double pde_residual(const Trajectory& traj, double t) {
  const auto& st = traj.states;
  const double dt = traj.config.dt.value_or(0.0);
  std::size_t best = st.size();
  for (std::size_t k = 0; k < st.size(); ++k) {
    if (std::abs(st[k].t - t) <= 1e-6 * dt) {
      best = k;
      break;
    }
  }
  if (best == st.size()) throw ConfigError("no stored state at t = " + format_real(t));
  if (best == 0 || best + 1 >= st.size()) {
    throw ConfigError("t = " + format_real(t) + " is at the trajectory boundary");
  }
  const std::vector<EulerianSnapshot> three{reconstruct(st[best - 1]), reconstruct(st[best]),
                                            reconstruct(st[best + 1])};
  return pde_residual(three, 1);
}

namespace {

constexpr double kPeakonAmplitude = 8.0 / 9.0;
constexpr double kPeakonSpeed = 4.0 / 3.0;

}  // namespace

double peakon_crest(double t, PeakonBranch branch) {
  return branch == PeakonBranch::literal ? kPeakonSpeed * t : -kPeakonSpeed * t;
}

GridFunction peakon(double t, const Grid& grid, PeakonBranch branch) {
  const double crest = peakon_crest(t, branch);
  if (grid.half_width() - std::abs(crest) < 5.0) {
    throw ConfigError("peakon crest at x = " + format_real(crest) +
                      " is closer than 5 to the domain edge X = " + format_real(grid.half_width()));
  }
  const double sign = branch == PeakonBranch::literal ? 1.0 : -1.0;
  return GridFunction::sample(grid, [&](double x) {
    return sign * kPeakonAmplitude * std::exp(-0.5 * std::abs(x - crest));
  });
}

double peakon_residual(double t, const Grid& grid, double exclusion, PeakonBranch branch) {
  const GridFunction u = peakon(t, grid, branch);
  const double crest = peakon_crest(t, branch);
  // dξ/dt for ξ = x − crest(t).
  const double speed = branch == PeakonBranch::literal ? kPeakonSpeed : -kPeakonSpeed;
  std::vector<double> ux(u.size()), ut(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double xi = grid.x(i) - crest;
    const double sgn = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
    ux[i] = -0.5 * sgn * u[i];
    ut[i] = -speed * ux[i];
  }
  const GridFunction r =
      residual_field(GridFunction(grid, std::move(ut)), u, GridFunction(grid, std::move(ux)));
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::abs(grid.x(i) - crest) > exclusion) m = std::max(m, std::abs(r[i]));
  }
  return m;
}

namespace {

// −∂ₓF with F split into a right-moving part (backward differences) and a
// left-moving part (forward differences); samples beyond the grid are 0.
std::vector<double> flux_divergence(const std::vector<double>& u, double h, const OracleOptions& o) {
  const std::size_t n = u.size();
  std::vector<double> fp(n), fm(n);
  if (o.mode == OracleMode::full) {
    double alpha = 0.0;
    for (double x : u) alpha = std::max(alpha, 1.5 * std::abs(x));
    for (std::size_t i = 0; i < n; ++i) {
      const double f = 0.75 * u[i] * u[i];
      fp[i] = 0.5 * (f + alpha * u[i]);
      fm[i] = 0.5 * (f - alpha * u[i]);
    }
  } else {
    const double c = o.advection_speed;
    for (std::size_t i = 0; i < n; ++i) {
      fp[i] = std::max(c, 0.0) * u[i];
      fm[i] = std::min(c, 0.0) * u[i];
    }
  }
  auto at = [n](const std::vector<double>& f, std::ptrdiff_t i) {
    return i < 0 || i >= static_cast<std::ptrdiff_t>(n) ? 0.0 : f[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(n);
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    const double back = 3.0 * at(fp, i) - 4.0 * at(fp, i - 1) + at(fp, i - 2);
    const double fwd = -3.0 * at(fm, i) + 4.0 * at(fm, i + 1) - at(fm, i + 2);
    out[k] = -(back + fwd) * inv;
  }
  return out;
}

std::vector<double> oracle_rhs(const Grid& g, const std::vector<double>& u, const OracleOptions& o) {
  std::vector<double> r = flux_divergence(u, g.spacing(), o);
  if (o.mode == OracleMode::full) {
    const GridFunction nl = green_derivative(GridFunction(g, u));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += nl[i];
  }
  return r;
}

void check_cfl(const std::vector<double>& u, double h, double dt, double t, const OracleOptions& o) {
  const double speed = o.mode == OracleMode::full ? 1.5 * sup_norm(std::span<const double>(u))
                                                  : std::abs(o.advection_speed);
  if (speed > 0.0 && std::abs(dt) > h / speed) {
    throw ConfigError("CFL violation in the Eulerian oracle at t = " + format_real(t) + ": |dt| = " +
                      format_real(std::abs(dt)) + " exceeds h/(1.5 sup|u|) = " +
                      format_real(h / speed));
  }
}

}  // namespace

std::vector<EulerianSnapshot> eulerian_oracle(const GridFunction& u0, const SolverConfig& config,
                                              const OracleOptions& options) {
  require_same_grid(u0.grid(), config.grid, "eulerian_oracle");
  check_boundary_decay(u0, config.boundary_tolerance);
  const Grid& g = config.grid;
  const TimePlan plan = plan_steps(ball_geometry(u0, config.r0), config);
  const double dt = plan.dt;
  const double h = g.spacing();
  const std::size_t n = g.size();
  std::vector<EulerianSnapshot> out;
  out.reserve(plan.steps + 1);
  auto snapshot = [&](double t, const std::vector<double>& u) {
    GridFunction uf(g, u);
    GridFunction ux = derivative(uf);
    out.push_back({t, std::move(uf), std::move(ux), 0});
  };
  const auto init = u0.values();
  std::vector<double> u(init.begin(), init.end());
  snapshot(0.0, u);
  std::vector<double> tmp(n);
  auto stage = [&](const std::vector<double>& k, double a) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + a * k[i];
    return tmp;
  };
  for (std::size_t s = 0; s < plan.steps; ++s) {
    const double t = dt * static_cast<double>(s);
    check_cfl(u, h, dt, t, options);
    const std::vector<double> k1 = oracle_rhs(g, u, options);
    const std::vector<double> k2 = oracle_rhs(g, stage(k1, 0.5 * dt), options);
    const std::vector<double> k3 = oracle_rhs(g, stage(k2, 0.5 * dt), options);
    const std::vector<double> k4 = oracle_rhs(g, stage(k3, dt), options);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(u[i])) {
        throw ConfigError("Eulerian oracle produced a non-finite value at node " +
                          std::to_string(i) + " (t = " + format_real(t + dt) + ")");
      }
    }
    snapshot(dt * static_cast<double>(s + 1), u);
  }
  return out;
}

std::optional<BreakingEvent> wave_breaking_probe(const GridFunction& u0, const SolverConfig& config,
                                                 std::optional<double> t_max) {
  if (config.guard_mode != GuardMode::warn) {
    throw ConfigError("the wave-breaking probe integrates past the guaranteed lifespan and needs "
                      "guard mode 'warn'");
  }
  SolverConfig cfg = config;
  if (t_max) cfg.t_end = *t_max;
  const BallGeometry geom = ball_geometry(u0, cfg.r0);
  const TimePlan plan = plan_steps(geom, cfg);
  LagrangianState s = initial_state(u0, cfg.boundary_tolerance, GuardMode::warn, nullptr);
  const StepOptions options{cfg.q_floor, cfg.kernel_path};
  for (std::size_t k = 0; k < plan.steps; ++k) {
    try {
      s = step(s, plan.dt, options);
      s.t = plan.dt * static_cast<double>(k + 1);
    } catch (const GuardBreach& e) {
      return BreakingEvent{e.time(), e.node(), cfg.grid.x(e.node())};
    }
  }
  return std::nullopt;
}

std::vector<DiagnosticRow> diagnostic_series(const Trajectory& traj,
                                             const std::vector<EulerianSnapshot>& snaps) {
  if (snaps.size() != traj.states.size()) {
    throw ConfigError("diagnostic series: one snapshot per stored state is required");
  }
  std::vector<DiagnosticRow> rows;
  rows.reserve(snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const LagrangianState& s = traj.states[k];
    const ConservedTriple e = conserved(s);
    DiagnosticRow row;
    row.t = s.t;
    row.e1 = e.e1;
    row.e2 = e.e2;
    row.e3 = e.e3;
    row.min_q = *std::min_element(s.q.values().begin(), s.q.values().end());
    row.sup_u = sup_norm(snaps[k].u);
    row.sup_ux = sup_norm(snaps[k].ux);
    row.residual = (k == 0 || k + 1 == snaps.size()) ? std::numeric_limits<double>::quiet_NaN()
                                                      : pde_residual(snaps, k);
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  out << "t,e1,e2,e3,min_q,sup_u,sup_ux,residual\n";
  for (const auto& r : rows) {
    out << format_real(r.t) << ',' << format_real(r.e1) << ',' << format_real(r.e2) << ','
        << format_real(r.e3) << ',' << format_real(r.min_q) << ',' << format_real(r.sup_u) << ','
        << format_real(r.sup_ux) << ',' << format_real(r.residual) << '\n';
  }
}

}  // namespace fw
