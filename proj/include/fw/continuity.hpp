#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fw/grid.hpp"
#include "fw/lagrangian.hpp"

namespace fw {

struct ContinuityOptions {
  /// Stored times at which the C^{0,α} distances are evaluated (evenly
  /// spaced over the horizon, endpoints included). C⁰ and C¹ distances use
  /// every stored time.
  std::size_t holder_samples = 21;
  /// Concurrent ε-runs.
  std::size_t jobs = 1;
  std::size_t pair_budget = kDefaultPairBudget;
};

struct ContinuityReport {
  std::vector<double> eps_values;
  std::vector<double> alphas;
  /// ‖ε p‖_{C⁰} per ε.
  std::vector<double> c0_data_dist;
  /// sup over time of ‖u_ε − u‖_{C⁰} and ‖u_ε − u‖_{C¹} per ε.
  std::vector<double> c0_sol_dist;
  std::vector<double> c1_sol_dist;
  /// holder_sol_dist[a][k]: sup over sampled times of [u_ε − u]_{α_a} for ε_k.
  std::vector<std::vector<double>> holder_sol_dist;
  /// Least-squares slope of log holder_sol_dist against log c0_data_dist,
  /// one per alpha; NaN when fewer than two ε give positive distances.
  std::vector<double> fitted_exponent;
  /// c0_sol_dist / c0_data_dist per ε (0 for ε = 0).
  std::vector<double> lipschitz_ratio;
  double lipschitz_ratio_max = 0.0;
  /// (max − min) / min of the positive-ε ratios.
  double lipschitz_ratio_variation = 0.0;
  /// Common horizon min over all runs of T_theoretical (or config.t_end when smaller).
  double horizon = 0.0;
  double r = 0.0;
};

/// Solves for u₀ and each u₀ + ε p up to the common horizon and measures the
/// distances. Throws InitialDataError when ‖ε p‖_Y ≥ r0 for some ε (the
/// perturbed datum would leave the ball around y₀) and ConfigError for α
/// outside [0, 1).
ContinuityReport continuity_experiment(const GridFunction& u0, const GridFunction& perturbation,
                                       const std::vector<double>& eps_values,
                                       const std::vector<double>& alphas,
                                       const SolverConfig& config,
                                       const ContinuityOptions& options = {});

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// JSON document with every list and fitted value.
std::string to_json(const ContinuityReport& report);

/// CSV `eps,c0_data,c0_sol,c1_sol,ratio,holder_<alpha>...`.
std::string to_csv(const ContinuityReport& report);

}  // namespace fw
