#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace fw {

/// Uniform grid x_i = -X + i h on the truncated line [-X, X].
///
/// Functions sampled on a Grid are taken to vanish outside [-X, X]; every
/// construction of initial data checks this decay explicitly.
class Grid {
 public:
  Grid(double half_width, std::size_t n_points);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return spacing_; }
  double x(std::size_t i) const { return -half_width_ + static_cast<double>(i) * spacing_; }
  std::vector<double> nodes() const;

  /// Index of the node closest to x (clamped to the grid).
  std::size_t nearest(double x) const;

  bool operator==(const Grid& other) const = default;

 private:
  double half_width_;
  std::size_t n_points_;
  double spacing_;
};

/// A real function sampled on a Grid. Values are always finite.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction zeros(const Grid& grid);
  static GridFunction constant(const Grid& grid, double c);
  static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Moves the samples out; the function is left empty.
  std::vector<double> release() && { return std::move(values_); }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double c);

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction f);
/// Pointwise product.
GridFunction operator*(const GridFunction& a, const GridFunction& b);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

struct NormReport {
  double c0 = 0.0;
  double c1 = 0.0;
  double holder_alpha = 0.0;
  double holder_seminorm = 0.0;
};

/// Default number of sample pairs the Hölder seminorm may inspect.
inline constexpr std::size_t kDefaultPairBudget = 4'000'000;

double sup_norm(const GridFunction& f);
double sup_norm(std::span<const double> values);

/// Central differences in the interior, second-order one-sided stencils at
/// the two endpoints.
GridFunction derivative(const GridFunction& f);

/// sup|f| + sup|f'| with f' from derivative().
double c1_norm(const GridFunction& f);

/// max |f_i - f_j| / |x_i - x_j|^alpha over grid pairs, alpha in [0, 1).
///
/// Pairs are grouped by index offset k = j - i: on a uniform grid the
/// denominator only depends on k, so each offset costs one max-reduction.
/// When n(n-1)/2 exceeds pair_budget, all small offsets are kept (in
/// particular every adjacent pair) and larger offsets are sampled
/// geometrically until the budget is spent. OpenMP-parallel over offsets.
double holder_seminorm(const GridFunction& f, double alpha,
                       std::size_t pair_budget = kDefaultPairBudget);

/// Exhaustive O(n^2) pair loop, single-threaded; reference for holder_seminorm.
double holder_seminorm_serial(const GridFunction& f, double alpha);

NormReport norm_report(const GridFunction& f, double alpha);

/// Composite trapezoid rule over [-X, X].
double quadrature(const GridFunction& f);
double quadrature(const Grid& grid, std::span<const double> values);

/// Counts evaluations that fell outside [-X, X] (returned as 0).
struct InterpolationStats {
  std::size_t out_of_domain = 0;
};

/// Piecewise-linear interpolation, exact at nodes.
double interpolate(const GridFunction& f, double x, InterpolationStats* stats = nullptr);
double interpolate(const Grid& grid, std::span<const double> values, double x,
                   InterpolationStats* stats = nullptr);

/// Four-point Lagrange interpolation (stencil shifted inward at the edges),
/// exact at nodes and for cubic data.
double interpolate_cubic(const Grid& grid, std::span<const double> values, double x,
                         InterpolationStats* stats = nullptr);

/// Throws InitialDataError if |f| exceeds tolerance at either endpoint.
void check_boundary_decay(const GridFunction& f, double tolerance);

/// Size of the largest slope discontinuity seen by the grid:
/// max_i |Δ⁴f_i| / (2h). O(h³) for smooth data, equal to the jump of f' at
/// a kink sitting on a node.
double kink_indicator(const GridFunction& f);

/// CSV with header `x,value`, 17 significant digits.
void write_csv(std::ostream& out, const GridFunction& f);
/// Reads the `x,value` format back; the grid is recovered from the x column
/// and must be uniform and symmetric.
GridFunction read_csv(std::istream& in);

}  // namespace fw
