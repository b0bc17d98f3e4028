#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fw/diagnostics.hpp"
#include "fw/errors.hpp"

using namespace fw;

namespace {

GridFunction gaussian(const Grid& g, double a = 0.1) {
  return GridFunction::sample(g, [a](double x) { return a * std::exp(-x * x); });
}

SolverConfig config_for(const Grid& g) {
  SolverConfig c;
  c.grid = g;
  return c;
}

}  // namespace

TEST_CASE("conserved quantities in closed form") {
  const Grid g(40.0, 8001);
  const ConservedTriple z = conserved(GridFunction::zeros(g));
  CHECK(z.e1 == 0.0);
  CHECK(z.e2 == 0.0);
  CHECK(z.e3 == 0.0);

  const ConservedTriple c = conserved(gaussian(g));
  CHECK(c.e1 == doctest::Approx(0.1 * std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(c.e2 == doctest::Approx(0.01 * std::sqrt(M_PI / 2.0)).epsilon(1e-12));

  const GridFunction pk = GridFunction::sample(g, [](double x) { return 8.0 / 9.0 * std::exp(-0.5 * std::abs(x)); });
  const ConservedTriple p = conserved(pk);
  CHECK(p.e1 == doctest::Approx(32.0 / 9.0).epsilon(1e-5));
  CHECK(p.e2 == doctest::Approx(128.0 / 81.0).epsilon(1e-5));
}

TEST_CASE("e3 agrees across kernel paths and with the Lagrangian form at t = 0") {
  const Grid g(20.0, 1001);
  const GridFunction u = gaussian(g, 0.3);
  const ConservedTriple f = conserved(u, KernelPath::fast);
  const ConservedTriple d = conserved(u, KernelPath::direct);
  CHECK(std::abs(f.e3 - d.e3) <= 1e-12);
  const ConservedTriple l = conserved(initial_state(u));
  CHECK(l.e1 == doctest::Approx(f.e1).epsilon(1e-14));
  CHECK(l.e2 == doctest::Approx(f.e2).epsilon(1e-14));
  CHECK(l.e3 == doctest::Approx(f.e3).epsilon(1e-12));
}

TEST_CASE("relative_drift") {
  CHECK(relative_drift(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(relative_drift(1e-4, 0.0) == doctest::Approx(0.1));
  CHECK(relative_drift(2.0, 2.0) == 0.0);
}

TEST_CASE("E1, E2 and the cubic invariant stay put on a Gaussian") {
  const Grid g(20.0, 2001);
  const Trajectory tr = integrate(gaussian(g), config_for(g));
  const ConservedTriple c0 = conserved(tr.initial());
  const ConservedTriple c1 = conserved(tr.final_state());
  CHECK(relative_drift(c1.e1, c0.e1) < 1e-6);
  CHECK(relative_drift(c1.e2, c0.e2) < 1e-6);
  CHECK(relative_drift(cubic_invariant(tr.final_state()), cubic_invariant(tr.initial())) < 1e-6);
}

TEST_CASE("pde residual") {
  const Grid g(10.0, 201);
  const Trajectory tr = integrate(GridFunction::zeros(g), config_for(g));
  const auto snaps = reconstruct_all(tr);
  CHECK(pde_residual(snaps, 1) == 0.0);
  CHECK_THROWS_AS(pde_residual(snaps, 0), ConfigError);
  CHECK_THROWS_AS(pde_residual(snaps, snaps.size() - 1), ConfigError);
  CHECK_THROWS_AS(pde_residual(tr, 0.0), ConfigError);
  CHECK_THROWS_AS(pde_residual(tr, 123.0), ConfigError);
}

TEST_CASE("pde residual converges at second order on a Gaussian") {
  auto res = [](std::size_t n) {
    const Grid g(20.0, n);
    SolverConfig c = config_for(g);
    const BallGeometry geo = ball_geometry(gaussian(g), c.r0);
    c.dt = geo.T_theoretical / 400.0 * (2001.0 - 1.0) / double(n - 1);
    const Trajectory tr = integrate(gaussian(g), c);
    const auto snaps = reconstruct_all(tr);
    return pde_residual(snaps, snaps.size() / 2);
  };
  const double a = res(1001), b = res(2001);
  CHECK(a < 1e-4);
  CHECK(std::log2(a / b) > 1.8);
}

TEST_CASE("peakon samples and crest") {
  const Grid g(40.0, 4001);
  const GridFunction p0 = peakon(0.0, g);
  CHECK(p0[2000] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(peakon_crest(3.0) == doctest::Approx(4.0));
  CHECK(peakon_crest(3.0, PeakonBranch::mirrored) == doctest::Approx(-4.0));
  const GridFunction p3 = peakon(3.0, g);
  CHECK(p3[2200] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  const GridFunction m3 = peakon(3.0, g, PeakonBranch::mirrored);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(m3[i] == doctest::Approx(-p3[g.size() - 1 - i]).epsilon(1e-14));
  CHECK_THROWS_AS(peakon(30.0, g), ConfigError);
}

TEST_CASE("peakon residual") {
  const Grid g(40.0, 4001);
  CHECK(peakon_residual(0.0, g, 0.05, PeakonBranch::literal) > 0.1);
  CHECK(peakon_residual(0.0, g, 0.05) <= 1e-6);
  CHECK(peakon_residual(3.0, g, 0.05) <= 1e-6);

  // Crest between nodes: the kink inside a panel costs O(h²).
  const double a = peakon_residual(1.0, Grid(40.0, 2001), 0.05);
  const double b = peakon_residual(1.0, Grid(40.0, 4001), 0.05);
  CHECK(a < 1e-3);
  CHECK(std::log2(a / b) > 1.7);
}

TEST_CASE("Eulerian oracle") {
  const Grid g(10.0, 201);
  const auto z = eulerian_oracle(GridFunction::zeros(g), config_for(g));
  for (const auto& s : z) CHECK(sup_norm(s.u) == 0.0);

  auto advect = [](std::size_t n) {
    const Grid g(20.0, n);
    SolverConfig c = config_for(g);
    c.dt = 0.25 * g.spacing();
    OracleOptions o;
    o.mode = OracleMode::linear_advection;
    o.advection_speed = 1.0;
    const auto snaps = eulerian_oracle(gaussian(g), c, o);
    const double t = snaps.back().t;
    const GridFunction exact = GridFunction::sample(g, [t](double x) { return 0.1 * std::exp(-(x - t) * (x - t)); });
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(snaps.back().u[i] - exact[i]));
    return m;
  };
  const double e1 = advect(401), e2 = advect(801);
  CHECK(e1 < 1e-3);
  CHECK(std::log2(e1 / e2) > 1.7);

  SolverConfig bad = config_for(g);
  bad.dt = 0.05;
  OracleOptions fast;
  fast.mode = OracleMode::linear_advection;
  fast.advection_speed = 10.0;
  CHECK_THROWS_AS(eulerian_oracle(gaussian(g), bad, fast), ConfigError);
}

TEST_CASE("Eulerian oracle agrees with the characteristic solver") {
  const Grid g(20.0, 2001);
  const Trajectory tr = integrate(gaussian(g), config_for(g));
  const auto lag = reconstruct_all(tr);
  const auto eul = eulerian_oracle(gaussian(g), config_for(g));
  REQUIRE(lag.size() == eul.size());
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(lag.back().u[i] - eul.back().u[i]));
  CHECK(m < 1e-5);
}

TEST_CASE("wave-breaking probe") {
  const Grid g(20.0, 801);
  SolverConfig c = config_for(g);
  CHECK_THROWS_AS(wave_breaking_probe(GridFunction::zeros(g), c), ConfigError);
  c.guard_mode = GuardMode::warn;
  CHECK_FALSE(wave_breaking_probe(GridFunction::zeros(g), c, 1.0).has_value());

  const GridFunction small = gaussian(g, 0.05);
  const double T = ball_geometry(small, c.r0).T_theoretical;
  CHECK_FALSE(wave_breaking_probe(small, c, 5.0 * T).has_value());

  double previous = 1e300;
  for (double a : {2.0, 3.0, 4.0}) {
    const GridFunction u0 = GridFunction::sample(g, [a](double x) {
      const double s = 1.0 / std::cosh(2.0 * x);
      return a * s * s;
    });
    const auto ev = wave_breaking_probe(u0, c, 10.0);
    REQUIRE(ev.has_value());
    CHECK(std::isfinite(ev->t));
    CHECK(ev->t < previous);
    CHECK(ev->x > 0.0);
    previous = ev->t;
  }
}

TEST_CASE("diagnostic series") {
  const Grid g(10.0, 401);
  const Trajectory tr = integrate(gaussian(g), config_for(g));
  const auto snaps = reconstruct_all(tr);
  const auto rows = diagnostic_series(tr, snaps);
  REQUIRE(rows.size() == tr.states.size());
  CHECK(std::isnan(rows.front().residual));
  CHECK(std::isnan(rows.back().residual));
  CHECK(std::isfinite(rows[1].residual));
  CHECK(rows.front().min_q == 1.0);
  CHECK(rows.front().sup_u == doctest::Approx(0.1));
  CHECK_THROWS_AS(diagnostic_series(tr, {}), ConfigError);

  std::ostringstream out;
  write_csv(out, rows);
  const std::string s = out.str();
  CHECK(s.rfind("t,e1,e2,e3,min_q,sup_u,sup_ux,residual\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(rows.size() + 1));
}
