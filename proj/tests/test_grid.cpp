#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fw/errors.hpp"
#include "fw/grid.hpp"

using namespace fw;

namespace {

GridFunction gaussian(const Grid& g, double a = 1.0) {
  return GridFunction::sample(g, [a](double x) { return a * std::exp(-x * x); });
}

GridFunction random_function(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  return GridFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g(2.0, 5);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(4) == 2.0);
  CHECK(g.nearest(0.4) == 2);
  CHECK(g.nearest(-9.0) == 0);
  CHECK(g.nearest(9.0) == 4);
  CHECK_THROWS_AS(Grid(2.0, 2), ConfigError);
  CHECK_THROWS_AS(Grid(0.0, 11), ConfigError);
  CHECK_THROWS_AS(Grid(-1.0, 11), ConfigError);
}

TEST_CASE("grid functions reject non-finite samples and size mismatches") {
  const Grid g(1.0, 3);
  CHECK_THROWS_AS(GridFunction(g, {0.0, NAN, 0.0}), Error);
  CHECK_THROWS_AS(GridFunction(g, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(GridFunction::zeros(g) + GridFunction::zeros(Grid(1.0, 5)), ConfigError);
}

TEST_CASE("sup_norm") {
  CHECK(sup_norm(GridFunction::zeros(Grid(10.0, 101))) == 0.0);
  CHECK(sup_norm(gaussian(Grid(10.0, 2001))) == 1.0);
  const Grid g(20.0, 4001);
  const auto peak = GridFunction::sample(g, [](double x) { return 8.0 / 9.0 * std::exp(-0.5 * std::abs(x)); });
  CHECK(sup_norm(peak) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("derivative") {
  const Grid g(10.0, 2001);
  const GridFunction dc = derivative(GridFunction::constant(g, 3.5));
  CHECK(sup_norm(dc) == 0.0);

  const GridFunction dl = derivative(GridFunction::sample(g, [](double x) { return x; }));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(dl[i] == doctest::Approx(1.0).epsilon(1e-12));

  const GridFunction ds = derivative(GridFunction::sample(g, [](double x) { return std::sin(x); }));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(ds[i] - std::cos(g.x(i))));
  CHECK(err <= 4e-5);
}

TEST_CASE("derivative converges at second order including the endpoints") {
  auto err = [](std::size_t n) {
    const Grid g(3.0, n);
    const GridFunction d = derivative(GridFunction::sample(g, [](double x) { return std::sin(x); }));
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(d[i] - std::cos(g.x(i))));
    return e;
  };
  CHECK(std::log2(err(301) / err(601)) > 1.9);
}

TEST_CASE("c1_norm") {
  CHECK(c1_norm(GridFunction::zeros(Grid(5.0, 11))) == 0.0);

  // Oracle: dense search of the closed-form |f'| = 2a|x|e^{-x^2}.
  const double a = 0.1;
  double dense = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double x = 2.0 * k / 200000.0;
    dense = std::max(dense, 2.0 * a * x * std::exp(-x * x));
  }
  CHECK(dense == doctest::Approx(a * std::sqrt(2.0 / std::exp(1.0))).epsilon(1e-9));
  const double c1 = c1_norm(gaussian(Grid(10.0, 4001), a));
  CHECK(std::abs(c1 - (a + dense)) < 1e-5);
  CHECK(std::abs(c1 - a * 1.8577638850) < 1e-5);

  const GridFunction s = GridFunction::sample(Grid(10.0, 2001), [](double x) { return std::sin(x); });
  CHECK(std::abs(c1_norm(s) - 2.0) < 1e-4);
}

TEST_CASE("holder_seminorm") {
  const Grid g(5.0, 401);
  CHECK(holder_seminorm(GridFunction::constant(g, 2.0), 0.3) == 0.0);

  const GridFunction f = gaussian(g);
  CHECK(holder_seminorm(f, 0.0) == doctest::Approx(1.0 - std::exp(-25.0)));

  const Grid g2(1.0, 2000);
  const GridFunction absx = GridFunction::sample(g2, [](double x) { return std::abs(x); });
  CHECK(holder_seminorm(absx, 0.5) == doctest::Approx(holder_seminorm_serial(absx, 0.5)).epsilon(1e-14));

  CHECK_THROWS_AS(holder_seminorm(f, 1.0), ConfigError);
  CHECK_THROWS_AS(holder_seminorm(f, -0.1), ConfigError);
  CHECK_THROWS_AS(holder_seminorm_serial(f, 1.0), ConfigError);
}

TEST_CASE("holder_seminorm matches the exhaustive reference on random data") {
  std::mt19937 rng(7);
  const Grid g(2.0, 700);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 0.99}) {
    const GridFunction f = random_function(g, rng);
    CHECK(holder_seminorm(f, alpha) == doctest::Approx(holder_seminorm_serial(f, alpha)).epsilon(1e-14));
  }
}

TEST_CASE("holder_seminorm under a small pair budget keeps adjacent pairs") {
  const Grid g(10.0, 3001);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::sin(3.0 * x) * std::exp(-x * x / 20.0); });
  const double full = holder_seminorm_serial(f, 0.5);
  const double sampled = holder_seminorm(f, 0.5, 20000);
  double adjacent = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    adjacent = std::max(adjacent, std::abs(f[i + 1] - f[i]) / std::sqrt(g.spacing()));
  }
  CHECK(sampled <= full * (1.0 + 1e-14));
  CHECK(sampled >= adjacent * (1.0 - 1e-14));
}

TEST_CASE("quadrature") {
  CHECK(quadrature(GridFunction::zeros(Grid(10.0, 101))) == 0.0);
  const double q = quadrature(gaussian(Grid(10.0, 2001)));
  CHECK(std::abs(q - std::sqrt(M_PI)) / std::sqrt(M_PI) <= 1e-10);
  // The kink sits on a node; the trapezoid error there is O(h^2).
  const Grid g(40.0, 40001);
  const auto peak = GridFunction::sample(g, [](double x) { return 8.0 / 9.0 * std::exp(-0.5 * std::abs(x)); });
  CHECK(std::abs(quadrature(peak) - 32.0 / 9.0) <= 1e-6);
}

TEST_CASE("interpolate") {
  const Grid g(10.0, 2001);
  const GridFunction s = GridFunction::sample(g, [](double x) { return std::sin(x); });
  for (std::size_t i : {0u, 17u, 1000u, 2000u}) CHECK(interpolate(s, g.x(i)) == s[i]);

  const GridFunction lin = GridFunction::sample(g, [](double x) { return 2.0 * x - 1.0; });
  for (double x : {-9.9991, -0.3333, 0.0, 4.12345, 9.99}) {
    CHECK(interpolate(lin, x) == doctest::Approx(2.0 * x - 1.0).epsilon(1e-13));
  }

  const double h = g.spacing();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  double err = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double x = d(rng);
    err = std::max(err, std::abs(interpolate(s, x) - std::sin(x)));
  }
  CHECK(err <= h * h / 8.0);

  InterpolationStats stats;
  CHECK(interpolate(s, 10.5, &stats) == 0.0);
  CHECK(interpolate(s, -11.0, &stats) == 0.0);
  CHECK(stats.out_of_domain == 2);
}

TEST_CASE("interpolation interlaces neighbouring samples") {
  std::mt19937 rng(11);
  const Grid g(1.0, 41);
  const GridFunction f = random_function(g, rng);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t i = static_cast<std::size_t>(k % 40);
    const double x = g.x(i) + d(rng) * g.spacing();
    const double v = interpolate(f, x);
    CHECK(v >= std::min(f[i], f[i + 1]) - 1e-15);
    CHECK(v <= std::max(f[i], f[i + 1]) + 1e-15);
  }
}

TEST_CASE("interpolate_cubic reproduces cubics") {
  const Grid g(3.0, 31);
  auto p = [](double x) { return 0.5 * x * x * x - x * x + 2.0 * x - 3.0; };
  const GridFunction f = GridFunction::sample(g, p);
  for (double x : {-3.0, -2.95, -0.123, 1.5, 2.99, 3.0}) {
    CHECK(interpolate_cubic(g, f.values(), x) == doctest::Approx(p(x)).epsilon(1e-12));
  }
  InterpolationStats stats;
  CHECK(interpolate_cubic(g, f.values(), 3.5, &stats) == 0.0);
  CHECK(stats.out_of_domain == 1);
}

TEST_CASE("norm and quadrature identities on random data") {
  std::mt19937 rng(5);
  const Grid g(4.0, 201);
  for (int k = 0; k < 20; ++k) {
    const GridFunction f = random_function(g, rng);
    const GridFunction h = random_function(g, rng);
    const double c = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    CHECK(sup_norm(f) <= c1_norm(f));
    CHECK(sup_norm(c * f) == doctest::Approx(std::abs(c) * sup_norm(f)).epsilon(1e-14));
    CHECK(quadrature(c * f) == doctest::Approx(c * quadrature(f)).epsilon(1e-12));
    CHECK(holder_seminorm(c * f, 0.5) == doctest::Approx(std::abs(c) * holder_seminorm(f, 0.5)).epsilon(1e-13));
    CHECK(sup_norm(f + h) <= sup_norm(f) + sup_norm(h) + 1e-15);
  }
  const NormReport r = norm_report(random_function(g, rng), 0.25);
  CHECK(r.c0 <= r.c1);
  CHECK(r.holder_alpha == 0.25);
  CHECK(r.holder_seminorm >= 0.0);
}

TEST_CASE("derivative reproduces the slope of interpolated linear data") {
  const Grid coarse(2.0, 21);
  const GridFunction lin = GridFunction::sample(coarse, [](double x) { return -0.7 * x + 0.2; });
  const Grid fine(2.0, 81);
  const GridFunction onto = GridFunction::sample(fine, [&](double x) { return interpolate(lin, x); });
  const GridFunction d = derivative(onto);
  for (std::size_t i = 1; i + 1 < fine.size(); ++i) CHECK(d[i] == doctest::Approx(-0.7).epsilon(1e-12));
}

TEST_CASE("boundary decay and kink detection") {
  const Grid g(10.0, 1001);
  CHECK_NOTHROW(check_boundary_decay(gaussian(g), 1e-8));
  CHECK_THROWS_AS(check_boundary_decay(GridFunction::constant(g, 1e-3), 1e-8), InitialDataError);

  const double h = g.spacing();
  CHECK(kink_indicator(gaussian(g, 0.1)) < 5.0 * h * 0.2);
  const auto peak = GridFunction::sample(g, [](double x) { return 8.0 / 9.0 * std::exp(-0.5 * std::abs(x)); });
  // Slope jump of the peakon at its crest is 8/9.
  CHECK(kink_indicator(peak) == doctest::Approx(8.0 / 9.0).epsilon(0.05));
}

TEST_CASE("csv round trip") {
  const Grid g(3.0, 61);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::exp(-x * x) / 3.0; });
  std::stringstream buf;
  write_csv(buf, f);
  CHECK(buf.str().rfind("x,value\n", 0) == 0);
  const GridFunction back = read_csv(buf);
  CHECK(back.grid() == g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == f[i]);
}

TEST_CASE("csv errors name the line") {
  std::stringstream bad("x,value\n-1,0\n0,zz\n1,0\n");
  try {
    (void)read_csv(bad);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::stringstream uneven("x,value\n-1,0\n0.3,0\n1,0\n");
  CHECK_THROWS_AS(read_csv(uneven), ConfigError);
}
