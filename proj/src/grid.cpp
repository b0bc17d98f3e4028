#include "fw/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "fw/errors.hpp"
#include "fw/format.hpp"

namespace fw {

std::string format_real(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Grid::Grid(double half_width, std::size_t n_points)
    : half_width_(half_width), n_points_(n_points), spacing_(0.0) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid half-width must be positive and finite");
  }
  if (n_points < 3) {
    throw ConfigError("grid needs at least 3 points, got " + std::to_string(n_points));
  }
  spacing_ = 2.0 * half_width / static_cast<double>(n_points - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t Grid::nearest(double x) const {
  const double s = std::round((x + half_width_) / spacing_);
  if (s <= 0.0) return 0;
  if (s >= static_cast<double>(n_points_ - 1)) return n_points_ - 1;
  return static_cast<std::size_t>(s);
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("grid function has " + std::to_string(values_.size()) +
                      " values for a grid of " + std::to_string(grid_.size()) + " points");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error("non-finite grid function value at node " + std::to_string(i));
    }
  }
}

GridFunction GridFunction::zeros(const Grid& grid) { return constant(grid, 0.0); }

GridFunction GridFunction::constant(const Grid& grid, double c) {
  return GridFunction(grid, std::vector<double>(grid.size(), c));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
  return GridFunction(grid, std::move(v));
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw ConfigError(std::string(where) + ": grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction f) { return f *= c; }

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "operator*");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return GridFunction(a.grid(), std::move(v));
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const GridFunction& f) { return sup_norm(f.values()); }

GridFunction derivative(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const auto u = f.values();
  std::vector<double> d(n);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  return GridFunction(f.grid(), std::move(d));
}

double c1_norm(const GridFunction& f) { return sup_norm(f) + sup_norm(derivative(f)); }

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("Hölder exponent must lie in [0, 1), got " + format_real(alpha));
  }
}

// Offsets whose pairs are inspected. All offsets when the budget allows it;
// otherwise every offset up to a dense cutoff plus a geometric tail.
std::vector<std::size_t> holder_offsets(std::size_t n, std::size_t pair_budget) {
  std::vector<std::size_t> offsets;
  const std::size_t total = n * (n - 1) / 2;
  if (total <= pair_budget) {
    offsets.resize(n - 1);
    for (std::size_t k = 1; k < n; ++k) offsets[k - 1] = k;
    return offsets;
  }
  std::size_t spent = 0;
  const std::size_t dense_budget = pair_budget / 2;
  std::size_t k = 1;
  while (k < n && spent + (n - k) <= dense_budget) {
    offsets.push_back(k);
    spent += n - k;
    ++k;
  }
  if (offsets.empty()) {
    offsets.push_back(1);
    spent = n - 1;
    k = 2;
  }
  double next = static_cast<double>(k);
  while (k < n && spent + (n - k) <= pair_budget) {
    offsets.push_back(k);
    spent += n - k;
    next *= 1.05;
    k = std::max(k + 1, static_cast<std::size_t>(next));
  }
  return offsets;
}

}  // namespace

double holder_seminorm(const GridFunction& f, double alpha, std::size_t pair_budget) {
  check_alpha(alpha);
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const auto u = f.values();
  const std::vector<std::size_t> offsets = holder_offsets(n, pair_budget);
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(offsets.size());
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (std::ptrdiff_t o = 0; o < m; ++o) {
    const std::size_t k = offsets[static_cast<std::size_t>(o)];
    double osc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) osc = std::max(osc, std::abs(u[i + k] - u[i]));
    best = std::max(best, osc / std::pow(static_cast<double>(k) * h, alpha));
  }
  return best;
}

double holder_seminorm_serial(const GridFunction& f, double alpha) {
  check_alpha(alpha);
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const auto u = f.values();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = static_cast<double>(j - i) * h;
      best = std::max(best, std::abs(u[j] - u[i]) / std::pow(dist, alpha));
    }
  }
  return best;
}

NormReport norm_report(const GridFunction& f, double alpha) {
  NormReport r;
  r.c0 = sup_norm(f);
  r.c1 = c1_norm(f);
  r.holder_alpha = alpha;
  r.holder_seminorm = holder_seminorm(f, alpha);
  return r;
}

double quadrature(const Grid& grid, std::span<const double> values) {
  const std::size_t n = values.size();
  double s = 0.5 * (values[0] + values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
  return s * grid.spacing();
}

double quadrature(const GridFunction& f) { return quadrature(f.grid(), f.values()); }

namespace {

struct Cell {
  std::size_t index;
  double frac;
};

// Locates x in the grid; a fractional part within a few ulps of a node is
// snapped so that node evaluations are exact.
Cell locate(const Grid& grid, double x) {
  const double s = (x + grid.half_width()) / grid.spacing();
  const double r = std::round(s);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s));
  const double last = static_cast<double>(grid.size() - 1);
  if (std::abs(s - r) <= tol) {
    if (r >= last) return {grid.size() - 2, 1.0};
    return {static_cast<std::size_t>(r), 0.0};
  }
  const double fl = std::min(std::floor(s), last - 1.0);
  return {static_cast<std::size_t>(fl), s - fl};
}

bool outside(const Grid& grid, double x) {
  const double X = grid.half_width();
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * X;
  return !(x >= -X - slack && x <= X + slack);
}

}  // namespace

double interpolate(const Grid& grid, std::span<const double> values, double x,
                   InterpolationStats* stats) {
  if (outside(grid, x)) {
    if (stats) ++stats->out_of_domain;
    return 0.0;
  }
  const Cell c = locate(grid, x);
  if (c.frac == 0.0) return values[c.index];
  if (c.frac == 1.0) return values[c.index + 1];
  return values[c.index] + c.frac * (values[c.index + 1] - values[c.index]);
}

double interpolate(const GridFunction& f, double x, InterpolationStats* stats) {
  return interpolate(f.grid(), f.values(), x, stats);
}

double interpolate_cubic(const Grid& grid, std::span<const double> values, double x,
                         InterpolationStats* stats) {
  if (outside(grid, x)) {
    if (stats) ++stats->out_of_domain;
    return 0.0;
  }
  const Cell c = locate(grid, x);
  if (c.frac == 0.0) return values[c.index];
  if (c.frac == 1.0) return values[c.index + 1];
  const std::size_t n = grid.size();
  if (n < 4) return values[c.index] + c.frac * (values[c.index + 1] - values[c.index]);
  // Stencil start s so that nodes s..s+3 bracket the cell and stay in range.
  std::size_t s = c.index == 0 ? 0 : c.index - 1;
  if (s + 3 >= n) s = n - 4;
  const double t = static_cast<double>(c.index - s) + c.frac;  // position in stencil units
  const double t0 = t, t1 = t - 1.0, t2 = t - 2.0, t3 = t - 3.0;
  const double w0 = -t1 * t2 * t3 / 6.0;
  const double w1 = t0 * t2 * t3 / 2.0;
  const double w2 = -t0 * t1 * t3 / 2.0;
  const double w3 = t0 * t1 * t2 / 6.0;
  return w0 * values[s] + w1 * values[s + 1] + w2 * values[s + 2] + w3 * values[s + 3];
}

void check_boundary_decay(const GridFunction& f, double tolerance) {
  const double left = std::abs(f[0]);
  const double right = std::abs(f[f.size() - 1]);
  if (left > tolerance || right > tolerance) {
    throw InitialDataError("initial data does not decay at the boundary: |u(-X)| = " +
                           format_real(left) + ", |u(X)| = " + format_real(right) +
                           " exceed boundary_tolerance " + format_real(tolerance) +
                           "; widen the domain");
  }
}

double kink_indicator(const GridFunction& f) {
  const std::size_t n = f.size();
  if (n < 5) return 0.0;
  const auto u = f.values();
  double m = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d4 = u[i - 2] - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + u[i + 2];
    m = std::max(m, std::abs(d4));
  }
  return m / (2.0 * f.grid().spacing());
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << format_real(f.grid().x(i)) << ',' << format_real(f[i]) << '\n';
  }
}

GridFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty grid function CSV");
  if (line.rfind("x,", 0) != 0) throw ConfigError("grid function CSV must start with an x column header");
  std::vector<double> xs, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected two columns");
    }
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (xs.size() < 3) throw ConfigError("grid function CSV needs at least 3 rows");
  const double X = xs.back();
  Grid grid(X, xs.size());
  const double tol = 1e-9 * std::max(1.0, X);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.x(i)) > tol) {
      throw ConfigError("grid function CSV is not on a uniform symmetric grid (row " +
                        std::to_string(i + 2) + ")");
    }
  }
  return GridFunction(grid, std::move(vs));
}

}  // namespace fw
