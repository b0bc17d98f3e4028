#include "fw/nonlocal.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>

#include "fw/errors.hpp"
#include "fw/format.hpp"

namespace fw {

CumulativeFlow build_cumulative_flow(const GridFunction& q, double q_floor) {
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(q[i] > q_floor)) throw MonotonicityLoss(i, q[i], q_floor);
  }
  const double h = q.grid().spacing();
  const GridFunction dq = derivative(q);
  const double correction = h * h / 12.0;
  std::vector<double> lambda(n);
  double trap = 0.0;
  lambda[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    trap += 0.5 * h * (q[i - 1] + q[i]);
    lambda[i] = trap - correction * (dq[i] - dq[0]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(lambda[i] > lambda[i - 1])) throw MonotonicityLoss(i, q[i], q_floor);
  }
  return {q.grid(), std::move(lambda)};
}

namespace {

// Per-panel data shared by every evaluation path. For panel j = [Λ_j, Λ_{j+1}]:
//   right[j] = ½ ∫_0^Δ e^{-σ}     p(Λ_j + σ) dσ
//   left[j]  = ½ ∫_0^Δ e^{-(Δ-σ)} p(Λ_j + σ) dσ
//   decay[j] = e^{-Δ}
// where p is the panel's quadratic model of w.
struct Panels {
  std::vector<double> right;
  std::vector<double> left;
  std::vector<double> decay;
};

// Blend of the two candidate second divided differences. Weights
// b²/(a²+b²) and a²/(a²+b²) pick the smoother stencil near a kink and
// average the two (fourth-order) on smooth data.
double blend_curvature(double a, double b) {
  const double den = a * a + b * b;
  if (den == 0.0) return 0.0;
  return (a * b * b + b * a * a) / den;
}

Panels build_panels(const std::vector<double>& lambda, std::span<const double> w) {
  const std::size_t n = lambda.size();
  const std::size_t panels = n - 1;
  std::vector<double> slope(panels);
  for (std::size_t j = 0; j < panels; ++j) {
    slope[j] = (w[j + 1] - w[j]) / (lambda[j + 1] - lambda[j]);
  }
  Panels p;
  p.right.resize(panels);
  p.left.resize(panels);
  p.decay.resize(panels);
  for (std::size_t j = 0; j < panels; ++j) {
    const double delta = lambda[j + 1] - lambda[j];
    double curv_left = 0.0, curv_right = 0.0;
    const bool has_left = j >= 1;
    const bool has_right = j + 2 < n;
    if (has_left) curv_left = (slope[j] - slope[j - 1]) / (lambda[j + 1] - lambda[j - 1]);
    if (has_right) curv_right = (slope[j + 1] - slope[j]) / (lambda[j + 2] - lambda[j]);
    double curv;
    if (has_left && has_right) {
      curv = blend_curvature(curv_left, curv_right);
    } else {
      curv = has_left ? curv_left : curv_right;
    }
    const double e = std::exp(-delta);
    const double m0 = -std::expm1(-delta);                  // ∫ e^{-σ}
    const double m1 = m0 - delta * e;                        // ∫ σ e^{-σ}
    const double mq = (2.0 - delta) * m1 - delta * delta * e;  // ∫ σ(σ-Δ) e^{-σ}
    p.right[j] = 0.5 * (w[j] * m0 + slope[j] * m1 + curv * mq);
    p.left[j] = 0.5 * (w[j + 1] * m0 - slope[j] * m1 + curv * mq);
    p.decay[j] = e;
  }
  return p;
}

void sweep_fast(const Panels& p, SplitIntegrals& out) {
  const std::size_t n = p.right.size() + 1;
  out.right[n - 1] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) out.right[i] = p.right[i] + p.decay[i] * out.right[i + 1];
  out.left[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) out.left[i] = p.left[i - 1] + p.decay[i - 1] * out.left[i - 1];
}

inline void direct_at(const std::vector<double>& lambda, const Panels& p, std::size_t i,
                      SplitIntegrals& out) {
  const std::size_t n = lambda.size();
  double r = 0.0;
  for (std::size_t j = i; j + 1 < n; ++j) r += std::exp(-(lambda[j] - lambda[i])) * p.right[j];
  double l = 0.0;
  for (std::size_t j = 0; j < i; ++j) l += std::exp(-(lambda[i] - lambda[j + 1])) * p.left[j];
  out.right[i] = r;
  out.left[i] = l;
}

void sweep_direct(const std::vector<double>& lambda, const Panels& p, SplitIntegrals& out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lambda.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) direct_at(lambda, p, static_cast<std::size_t>(i), out);
}

void sweep_direct_serial(const std::vector<double>& lambda, const Panels& p, SplitIntegrals& out) {
  for (std::size_t i = 0; i < lambda.size(); ++i) direct_at(lambda, p, i, out);
}

CumulativeFlow unit_flow(const Grid& grid) {
  return build_cumulative_flow(GridFunction::constant(grid, 1.0), 0.0);
}

}  // namespace

SplitIntegrals split_integrals(const CumulativeFlow& flow, std::span<const double> w,
                               KernelPath path) {
  if (w.size() != flow.lambda.size()) throw ConfigError("split_integrals: size mismatch");
  const Panels panels = build_panels(flow.lambda, w);
  SplitIntegrals out{std::vector<double>(w.size()), std::vector<double>(w.size())};
  switch (path) {
    case KernelPath::fast:
      sweep_fast(panels, out);
      break;
    case KernelPath::direct:
      sweep_direct(flow.lambda, panels, out);
      break;
    case KernelPath::direct_serial:
      sweep_direct_serial(flow.lambda, panels, out);
      break;
  }
  return out;
}

namespace {

GridFunction combine(const Grid& grid, const SplitIntegrals& s, double left_sign) {
  std::vector<double> v(s.right.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.right[i] + left_sign * s.left[i];
  return GridFunction(grid, std::move(v));
}

}  // namespace

GridFunction helmholtz_inverse(const GridFunction& f, KernelPath path) {
  return combine(f.grid(), split_integrals(unit_flow(f.grid()), f.values(), path), +1.0);
}

GridFunction green_derivative(const GridFunction& f, KernelPath path) {
  return combine(f.grid(), split_integrals(unit_flow(f.grid()), f.values(), path), -1.0);
}

KernelPair kernel_pair(const GridFunction& w, const GridFunction& q, KernelPath path,
                       double q_floor) {
  require_same_grid(w.grid(), q.grid(), "kernel_pair");
  const SplitIntegrals s = split_integrals(build_cumulative_flow(q, q_floor), w.values(), path);
  return {combine(w.grid(), s, -1.0), combine(w.grid(), s, +1.0)};
}

GridFunction p1(const GridFunction& w, const GridFunction& q, KernelPath path, double q_floor) {
  return kernel_pair(w, q, path, q_floor).p1;
}

GridFunction p2(const GridFunction& w, const GridFunction& q, KernelPath path, double q_floor) {
  return kernel_pair(w, q, path, q_floor).p2;
}

void dump_kernel_paths(std::ostream& out, const GridFunction& w, const GridFunction& q,
                       double q_floor) {
  const KernelPair fast = kernel_pair(w, q, KernelPath::fast, q_floor);
  const KernelPair direct = kernel_pair(w, q, KernelPath::direct, q_floor);
  out << "x,p1_fast,p1_direct,p2_fast,p2_direct\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    out << format_real(w.grid().x(i)) << ',' << format_real(fast.p1[i]) << ','
        << format_real(direct.p1[i]) << ',' << format_real(fast.p2[i]) << ','
        << format_real(direct.p2[i]) << '\n';
  }
}

}  // namespace fw
