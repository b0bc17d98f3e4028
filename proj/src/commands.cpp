#include "fw/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fw/continuity.hpp"
#include "fw/diagnostics.hpp"
#include "fw/errors.hpp"
#include "fw/flowmap.hpp"
#include "fw/format.hpp"
#include "fw/nonlocal.hpp"

namespace fw {

using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const Error*>(&e)) return kExitGuard;
  return kExitConfig;
}

std::string resolve_output_dir(const Scenario& s) {
  if (const char* env = std::getenv("FW_OUTPUT_DIR"); env && *env) return env;
  return s.output_dir;
}

std::string describe(const BallGeometry& g) {
  std::ostringstream out;
  out << "ball geometry\n"
      << "  r0              = " << format_real(g.r0) << '\n'
      << "  |y0|_Y          = " << format_real(g.y0_norm) << '\n'
      << "  r               = " << format_real(g.r) << '\n'
      << "  L               = " << format_real(g.L) << '\n'
      << "  T_theoretical   = " << format_real(g.T_theoretical) << '\n'
      << "  intro lifespan  = " << format_real(g.intro_lifespan) << '\n';
  return out.str();
}

namespace {

ordered_json number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json to_json(const BallGeometry& g) {
  ordered_json j;
  j["r0"] = g.r0;
  j["y0_norm"] = g.y0_norm;
  j["r"] = g.r;
  j["r_l"] = g.r_l;
  j["r_u"] = g.r_u;
  j["L"] = g.L;
  j["T_theoretical"] = g.T_theoretical;
  j["intro_lifespan"] = number(g.intro_lifespan);
  return j;
}

std::filesystem::path prepare_dir(const Scenario& s) {
  const std::filesystem::path dir = resolve_output_dir(s);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

std::vector<std::size_t> evenly_spaced(std::size_t count, std::size_t picks) {
  std::vector<std::size_t> idx;
  if (count == 0 || picks == 0) return idx;
  if (picks == 1) return {count - 1};
  for (std::size_t s = 0; s < picks; ++s) idx.push_back(s * (count - 1) / (picks - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

bool enabled(const Scenario& s, const char* name) {
  return std::find(s.diagnostics.begin(), s.diagnostics.end(), name) != s.diagnostics.end();
}

std::string indexed(const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.csv", stem, k);
  return buf;
}

}  // namespace

int run_solve(const Scenario& s, std::ostream& out) {
  const GridFunction u0 = sample(s.profile, s.config.grid);
  const BallGeometry geom = ball_geometry(u0, s.config.r0);
  out << describe(geom) << std::flush;
  const std::filesystem::path dir = prepare_dir(s);

  const Trajectory traj = integrate(u0, s.config);
  const std::vector<EulerianSnapshot> snaps = reconstruct_all(traj);
  for (const auto& w : traj.warnings) out << "warning: " << w << '\n';

  std::vector<std::string> files{"summary.json"};
  if (enabled(s, "series")) {
    const auto rows = diagnostic_series(traj, snaps);
    write_file(dir / "series.csv", [&](std::ostream& f) { write_csv(f, rows); });
    files.push_back("series.csv");
  }
  const auto picks = evenly_spaced(traj.states.size(), s.snapshots);
  for (std::size_t k : picks) {
    if (enabled(s, "snapshots")) {
      const std::string name = indexed("snapshot", k);
      write_file(dir / name, [&](std::ostream& f) { write_csv(f, snaps[k]); });
      files.push_back(name);
    }
    if (enabled(s, "flowmaps")) {
      const std::string name = indexed("flowmap", k);
      write_file(dir / name, [&](std::ostream& f) { write_csv(f, flow_map(traj.states[k])); });
      files.push_back(name);
    }
  }

  if (s.dump_kernels) {
    const LagrangianState& f = traj.final_state();
    write_file(dir / "kernels.csv", [&](std::ostream& o) { dump_kernel_paths(o, f.w, f.q, 0.0); });
    files.push_back("kernels.csv");
  }

  ordered_json j;
  j["name"] = s.name;
  j["initial_data"] = to_string(s.profile);
  j["geometry"] = to_json(geom);
  j["dt"] = traj.config.dt.value_or(0.0);
  j["t_end"] = traj.config.t_end.value_or(0.0);
  j["steps"] = traj.states.size() - 1;
  j["guard_mode"] = to_string(s.config.guard_mode);
  j["completed"] = traj.completed();
  j["breach"] = traj.breach ? ordered_json(*traj.breach) : ordered_json(nullptr);
  j["warnings"] = traj.warnings;
  const EulerianSnapshot& last = snaps.back();
  j["final"] = {{"t", last.t},
                {"sup_u", sup_norm(last.u)},
                {"sup_ux", sup_norm(last.ux)},
                {"y_norm", y_norm(traj.final_state())},
                {"out_of_image", last.out_of_image}};
  std::vector<double> times;
  for (std::size_t k : picks) times.push_back(traj.states[k].t);
  j["snapshot_steps"] = picks;
  j["snapshot_times"] = times;
  write_file(dir / "summary.json", [&](std::ostream& f) { f << j.dump(2) << '\n'; });

  out << "integrated " << traj.states.size() - 1 << " steps to t = " << format_real(traj.final_state().t)
      << "\nwrote";
  for (const auto& f : files) out << ' ' << f;
  out << " in " << dir.string() << '\n';
  if (traj.breach) {
    out << "guard breach: " << *traj.breach << '\n';
    if (s.config.guard_mode == GuardMode::enforce) return kExitGuard;
  }
  return kExitOk;
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

// Values at or below this are treated as exact zeros in convergence ratios.
constexpr double kResolved = 1e-13;

struct Run {
  Trajectory traj;
  std::vector<EulerianSnapshot> snaps;
};

Run solve(const GridFunction& u0, const SolverConfig& cfg) {
  Run r{integrate(u0, cfg), {}};
  r.snaps = reconstruct_all(r.traj);
  return r;
}

double relative_gap(const GridFunction& a, const GridFunction& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  const double scale = sup_norm(b);
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

// Observed order log2(coarse/fine), both values at or below kResolved count as passing.
CheckResult order_check(std::string name, double coarse, double fine, double min_order) {
  std::string detail = "coarse " + format_real(coarse) + ", refined " + format_real(fine);
  if (coarse <= kResolved && fine <= kResolved) {
    return {std::move(name), true, std::numeric_limits<double>::infinity(), min_order,
            detail + " (both at round-off)"};
  }
  const double order = fine > 0.0 ? std::log2(coarse / fine) : std::numeric_limits<double>::infinity();
  return {std::move(name), order >= min_order, order, min_order, detail};
}

}  // namespace

VerifyReport verify_scenario(const Scenario& s) {
  VerifyReport rep;
  const SolverConfig& base = s.config;
  const GridFunction u0 = sample(s.profile, base.grid);
  const BallGeometry geom = ball_geometry(u0, base.r0);

  const Run coarse = solve(u0, base);
  const std::size_t steps = coarse.traj.states.size() - 1;
  if (steps < 4 && coarse.traj.completed()) {
    throw ConfigError("verify needs at least 4 time steps, the scenario resolves to " +
                      std::to_string(steps));
  }
  SolverConfig fine_cfg = base;
  fine_cfg.grid = Grid(base.grid.half_width(), 2 * base.grid.size() - 1);
  fine_cfg.dt = *coarse.traj.config.dt / 2.0;
  fine_cfg.t_end = coarse.traj.config.t_end;
  // The refined datum samples a marginally different C1 norm; keep the shared horizon.
  fine_cfg.guard_mode = GuardMode::warn;
  const GridFunction u0_fine = sample(s.profile, fine_cfg.grid);
  const Run fine = solve(u0_fine, fine_cfg);

  rep.checks.push_back({"integration", coarse.traj.completed() && fine.traj.completed(),
                        static_cast<double>(steps), 0.0,
                        coarse.traj.breach.value_or(fine.traj.breach.value_or("completed"))});

  // Lifespan arithmetic, recomputed independently of ball_geometry.
  {
    const double r = base.r0 + c1_norm(u0) + sup_norm(derivative(u0)) + 1.0;
    const double err = std::max({std::abs(geom.r - r) / r, std::abs(geom.L - 50.0 * r / 9.0) / geom.L,
                                 std::abs(geom.T_theoretical - 9.0 / (100.0 * r)) / geom.T_theoretical,
                                 std::abs(geom.T_theoretical * 2.0 * geom.L - 1.0)});
    rep.checks.push_back(at_most("lifespan_arithmetic", err, 4.0 * std::numeric_limits<double>::epsilon(),
                                 "largest relative error; T = " + format_real(geom.T_theoretical)));
  }

  {
    const LagrangianState& f = coarse.traj.final_state();
    const KernelPair a = kernel_pair(f.w, f.q, KernelPath::fast, 0.0);
    const KernelPair b = kernel_pair(f.w, f.q, KernelPath::direct, 0.0);
    rep.checks.push_back(at_most("kernel_fast_vs_direct",
                                 std::max(relative_gap(a.p1, b.p1), relative_gap(a.p2, b.p2)), 1e-10,
                                 "final state, relative sup disagreement"));
  }

  {
    double worst = 0.0, y_max = 0.0;
    for (const auto& st : coarse.traj.states) {
      y_max = std::max(y_max, y_norm(st));
      worst = std::max(worst, y_norm(st) - geom.r);
    }
    rep.checks.push_back(at_most("ball_confinement", worst, 1e-6,
                                 "max |y(t)|_Y = " + format_real(y_max) + ", r = " + format_real(geom.r)));
  }

  {
    double worst_fwd = -std::numeric_limits<double>::infinity(), worst_inv = worst_fwd;
    double lo = 1.0, ilo = 1.0, ihi = 1.0, hi = 1.0;
    for (const auto& st : coarse.traj.states) {
      const FlowMap map = flow_map(st);
      const SlopeRange fr = discrete_slopes(map);
      const SlopeRange ir = discrete_inverse_slopes(map);
      const BoundInterval fb = slope_bound(geom, st.t);
      const BoundInterval ib = inverse_slope_bound(geom, st.t);
      worst_fwd = std::max({worst_fwd, fb.lo - fr.lo, fr.hi - fb.hi});
      worst_inv = std::max({worst_inv, ib.lo - ir.lo, ir.hi - ib.hi});
      lo = std::min(lo, fr.lo);
      hi = std::max(hi, fr.hi);
      ilo = std::min(ilo, ir.lo);
      ihi = std::max(ihi, ir.hi);
    }
    rep.checks.push_back(at_most("flowmap_slopes", worst_fwd, 1e-6,
                                 "slopes in [" + format_real(lo) + ", " + format_real(hi) +
                                     "]; value is the largest excursion past the bound"));
    rep.checks.push_back(at_most("inverse_slopes", worst_inv, 1e-6,
                                 "inverse slopes in [" + format_real(ilo) + ", " + format_real(ihi) + "]"));
  }

  {
    double size = 0.0;
    for (const auto& sn : coarse.snaps) size = std::max(size, sup_norm(sn.u) + sup_norm(sn.ux));
    const double bound = 2.0 * c1_norm(u0) * (1.0 + 1e-2);
    rep.checks.push_back(at_most("size_estimate", size, bound, "sup_t (sup|u| + sup|u_x|)"));
  }

  {
    const double a = chain_rule_defect(coarse.traj.final_state());
    const double b = chain_rule_defect(fine.traj.final_state());
    rep.checks.push_back(at_most("chain_rule", a, 1e-3, "sup|dw/dx - v q| at the final time"));
    rep.checks.push_back(
        {"chain_rule_refinement", a <= kResolved || a >= 3.5 * b, b > 0.0 ? a / b : 0.0, 3.5,
         "defect ratio under grid halving: " + format_real(a) + " -> " + format_real(b)});
  }

  {
    const ConservedTriple c0 = conserved(coarse.traj.initial());
    const ConservedTriple c1 = conserved(coarse.traj.final_state());
    const ConservedTriple f0 = conserved(fine.traj.initial());
    const ConservedTriple f1 = conserved(fine.traj.final_state());
    const double dc[3] = {relative_drift(c1.e1, c0.e1), relative_drift(c1.e2, c0.e2),
                          relative_drift(c1.e3, c0.e3)};
    const double df[3] = {relative_drift(f1.e1, f0.e1), relative_drift(f1.e2, f0.e2),
                          relative_drift(f1.e3, f0.e3)};
    for (int i = 0; i < 3; ++i) {
      const bool decreasing = df[i] <= dc[i] || df[i] <= kResolved;
      rep.checks.push_back({"conservation_e" + std::to_string(i + 1), dc[i] <= 1e-5 && decreasing, dc[i],
                            1e-5,
                            "relative drift " + format_real(dc[i]) + ", refined " + format_real(df[i]) +
                                (decreasing ? "" : " (not decreasing)")});
    }
    const double ic = relative_drift(cubic_invariant(coarse.traj.final_state()),
                                     cubic_invariant(coarse.traj.initial()));
    const double ifn = relative_drift(cubic_invariant(fine.traj.final_state()),
                                      cubic_invariant(fine.traj.initial()));
    rep.informational.push_back({"cubic_invariant_2uKu_minus_u3", ic <= 1e-5, ic, 1e-5,
                                 "relative drift of int(2 u K u - u^3); refined " + format_real(ifn)});
  }

  // Mid-run comparisons need matching stored times on both grids.
  const std::size_t mid = steps / 2;
  if (mid >= 1 && coarse.traj.completed() && fine.traj.completed()) {
    const double t_mid = coarse.traj.states[mid].t;
    auto oracle_gap = [&](const GridFunction& init, const SolverConfig& cfg, const Run& run,
                          std::size_t index) {
      SolverConfig oc = cfg;
      oc.t_end = run.traj.states[index].t;
      oc.dt = *run.traj.config.dt;
      const auto eo = eulerian_oracle(init, oc);
      return sup_distance(eo.back().u, run.snaps[index].u);
    };
    const double ga = oracle_gap(u0, base, coarse, mid);
    const double gb = oracle_gap(u0_fine, fine_cfg, fine, 2 * mid);
    rep.checks.push_back(at_most("oracle_agreement", ga, 1e-3,
                                 "sup|u_lagrangian - u_eulerian| at t = " + format_real(t_mid)));
    rep.checks.push_back(order_check("oracle_agreement_order", ga, gb, 1.8));

    const double ra = pde_residual(coarse.snaps, mid);
    const double rb = pde_residual(fine.snaps, 2 * mid);
    rep.checks.push_back(at_most("pde_residual", ra, 1e-3, "interior residual at t = " + format_real(t_mid)));
    rep.checks.push_back(order_check("pde_residual_order", ra, rb, 1.8));
  } else {
    for (const char* n : {"oracle_agreement", "oracle_agreement_order", "pde_residual",
                          "pde_residual_order"}) {
      rep.checks.push_back({n, false, 0.0, 0.0, "run incomplete"});
    }
  }
  return rep;
}

std::string to_json(const VerifyReport& r) {
  auto list = [](const std::vector<CheckResult>& checks) {
    ordered_json a = ordered_json::array();
    for (const auto& c : checks) {
      a.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", number(c.value)},
                   {"threshold", number(c.threshold)},
                   {"detail", c.detail}});
    }
    return a;
  };
  ordered_json j;
  j["passed"] = r.all_passed();
  j["checks"] = list(r.checks);
  j["informational"] = list(r.informational);
  return j.dump(2) + "\n";
}

int run_verify(const Scenario& s, std::ostream& out) {
  const GridFunction u0 = sample(s.profile, s.config.grid);
  out << describe(ball_geometry(u0, s.config.r0)) << std::flush;
  const std::filesystem::path dir = prepare_dir(s);
  const VerifyReport rep = verify_scenario(s);
  for (const auto& c : rep.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << format_real(c.value) << " (limit "
        << format_real(c.threshold) << ") " << c.detail << '\n';
  }
  for (const auto& c : rep.informational) {
    out << "INFO " << c.name << ": " << format_real(c.value) << ' ' << c.detail << '\n';
  }
  write_file(dir / "verify.json", [&](std::ostream& f) { f << to_json(rep); });
  out << (rep.all_passed() ? "all checks passed\n" : "some checks failed\n");
  return rep.all_passed() ? kExitOk : kExitVerify;
}

int run_continuity(const Scenario& s, const ContinuityRequest& req, std::ostream& out) {
  const Grid& g = s.config.grid;
  const GridFunction u0 = sample(s.profile, g);
  out << describe(ball_geometry(u0, s.config.r0)) << std::flush;
  const std::filesystem::path dir = prepare_dir(s);
  ContinuityOptions opt;
  opt.jobs = req.jobs;
  opt.holder_samples = req.holder_samples;
  const ContinuityReport rep =
      continuity_experiment(u0, sample(req.perturbation, g), req.eps_values, req.alphas, s.config, opt);
  write_file(dir / "continuity.json", [&](std::ostream& f) { f << to_json(rep); });
  write_file(dir / "continuity.csv", [&](std::ostream& f) { f << to_csv(rep); });
  out << "horizon " << format_real(rep.horizon) << ", lipschitz_ratio_max "
      << format_real(rep.lipschitz_ratio_max) << ", variation "
      << format_real(rep.lipschitz_ratio_variation) << '\n';
  for (std::size_t a = 0; a < rep.alphas.size(); ++a) {
    out << "alpha " << format_real(rep.alphas[a]) << ": fitted exponent "
        << format_real(rep.fitted_exponent[a]) << '\n';
  }
  out << "wrote continuity.json continuity.csv in " << dir.string() << '\n';
  return kExitOk;
}

int run_breaking(const Scenario& s, const BreakingRequest& req, std::ostream& out) {
  if (s.config.guard_mode != GuardMode::warn) {
    throw ConfigError("breaking integrates past the guaranteed lifespan; use guard mode 'warn'");
  }
  std::vector<Profile> profiles;
  if (req.amplitudes.empty()) {
    profiles.push_back(s.profile);
  } else {
    for (double a : req.amplitudes) {
      Profile p = s.profile;
      if (p.kind != Profile::Kind::gaussian && p.kind != Profile::Kind::sech2) {
        throw ConfigError("amplitude sweeps need a gaussian or sech2 profile");
      }
      p.a = a;
      profiles.push_back(p);
    }
  }
  const Grid& g = s.config.grid;
  const GridFunction first = sample(profiles.front(), g);
  const BallGeometry geom = ball_geometry(first, s.config.r0);
  out << describe(geom) << std::flush;
  const std::filesystem::path dir = prepare_dir(s);
  const double t_max = req.t_max.value_or(5.0 * geom.T_theoretical);

  ordered_json runs = ordered_json::array();
  for (const auto& p : profiles) {
    const GridFunction u0 = sample(p, g);
    const auto event = wave_breaking_probe(u0, s.config, t_max);
    ordered_json r;
    r["initial_data"] = to_string(p);
    r["T_theoretical"] = ball_geometry(u0, s.config.r0).T_theoretical;
    r["breach"] = event.has_value();
    r["t"] = event ? ordered_json(event->t) : ordered_json(nullptr);
    r["x"] = event ? ordered_json(event->x) : ordered_json(nullptr);
    r["node"] = event ? ordered_json(event->node) : ordered_json(nullptr);
    runs.push_back(r);
    out << to_string(p) << ": "
        << (event ? "q <= q_floor at t = " + format_real(event->t) + ", x = " + format_real(event->x)
                  : std::string("no breach"))
        << '\n';
  }
  ordered_json j;
  j["t_max"] = t_max;
  j["q_floor"] = s.config.q_floor;
  j["runs"] = runs;
  write_file(dir / "breaking.json", [&](std::ostream& f) { f << j.dump(2) << '\n'; });
  out << "wrote breaking.json in " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace fw
