#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fw/grid.hpp"

namespace fw {

/// Default lower bound on q below which the kernel exponent is refused.
inline constexpr double kDefaultQFloor = 0.1;

/// How the exponential-kernel integrals are evaluated.
enum class KernelPath {
  fast,           ///< O(N) forward/backward recurrences (sequential sweeps)
  direct,         ///< O(N^2) quadrature, OpenMP-parallel over target nodes
  direct_serial,  ///< O(N^2) quadrature, single-threaded reference
};

/// Λ(x_i) = ∫_{-X}^{x_i} q, the Lagrangian arc length used as the kernel
/// coordinate: e^{-|∫_x^z q|} = e^{-|Λ(z) - Λ(x)|}.
struct CumulativeFlow {
  Grid grid;
  std::vector<double> lambda;
};

/// Trapezoid prefix sums of q with the Euler–Maclaurin endpoint correction
/// -h²/12 (q'(x_i) - q'(x_0)). Throws MonotonicityLoss if any q_i <= q_floor.
CumulativeFlow build_cumulative_flow(const GridFunction& q, double q_floor = kDefaultQFloor);

/// One-sided halves of the kernel integral at each node:
///   right_i = ½ ∫_{x_i}^{X}  e^{-(Λ(z)-Λ(x_i))} w q dz
///   left_i  = ½ ∫_{-X}^{x_i} e^{-(Λ(x_i)-Λ(z))} w q dz
/// In Λ-coordinates w q dz = w dΛ, so each panel integrates a local
/// quadratic model of w against the exact exponential weight.
struct SplitIntegrals {
  std::vector<double> right;
  std::vector<double> left;
};

SplitIntegrals split_integrals(const CumulativeFlow& flow, std::span<const double> w,
                               KernelPath path = KernelPath::fast);

/// (1 - ∂²)^{-1} f = ½ e^{-|x|} * f on the truncated line.
GridFunction helmholtz_inverse(const GridFunction& f, KernelPath path = KernelPath::fast);

/// ∂ₓ(1 - ∂²)^{-1} f as the sign-split kernel integral (right minus left half).
GridFunction green_derivative(const GridFunction& f, KernelPath path = KernelPath::fast);

/// P₁(w, q) = right − left, P₂(w, q) = right + left.
GridFunction p1(const GridFunction& w, const GridFunction& q, KernelPath path = KernelPath::fast,
                double q_floor = kDefaultQFloor);
GridFunction p2(const GridFunction& w, const GridFunction& q, KernelPath path = KernelPath::fast,
                double q_floor = kDefaultQFloor);

struct KernelPair {
  GridFunction p1;
  GridFunction p2;
};

/// Both operators from a single pair of sweeps.
KernelPair kernel_pair(const GridFunction& w, const GridFunction& q,
                       KernelPath path = KernelPath::fast, double q_floor = kDefaultQFloor);

/// Debug dump of both evaluation paths: `x,p1_fast,p1_direct,p2_fast,p2_direct`.
void dump_kernel_paths(std::ostream& out, const GridFunction& w, const GridFunction& q,
                       double q_floor = kDefaultQFloor);

}  // namespace fw
