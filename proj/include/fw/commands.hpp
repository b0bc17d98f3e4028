#pragma once

#include <cstddef>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fw/lagrangian.hpp"
#include "fw/scenario.hpp"

namespace fw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitVerify = 4;

/// ConfigError → 2; every other library error (guards, initial data, flow
/// map) → 3; anything else (I/O) → 2.
int exit_code_for(const std::exception& e);

/// FW_OUTPUT_DIR when set and non-empty, else scenario.output_dir.
std::string resolve_output_dir(const Scenario& s);

/// Human-readable r, L, T_theoretical and intro lifespan block.
std::string describe(const BallGeometry& g);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  /// Reported, never counted toward the verdict.
  std::vector<CheckResult> informational;
  bool all_passed() const;
};

/// Runs the scenario at its own resolution and at half the grid spacing and
/// half the time step, then evaluates every bound, drift and convergence
/// check. Individual failures are recorded; only setup errors throw.
VerifyReport verify_scenario(const Scenario& s);
std::string to_json(const VerifyReport& r);

/// Integrates and writes summary.json plus the enabled CSVs into the
/// output directory. Returns kExitGuard for a guard breach in enforce mode.
int run_solve(const Scenario& s, std::ostream& out);

/// Writes verify.json; kExitVerify unless every check passes.
int run_verify(const Scenario& s, std::ostream& out);

struct ContinuityRequest {
  Profile perturbation;
  std::vector<double> eps_values{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> alphas{0.0, 0.5};
  std::size_t jobs = 1;
  std::size_t holder_samples = 21;
};

/// Writes continuity.json and continuity.csv.
int run_continuity(const Scenario& s, const ContinuityRequest& request, std::ostream& out);

struct BreakingRequest {
  /// Default 5 T_theoretical of the first profile.
  std::optional<double> t_max;
  /// When non-empty, the profile amplitude a is swept over these values.
  std::vector<double> amplitudes;
};

/// Writes breaking.json. The scenario must be in guard mode warn.
int run_breaking(const Scenario& s, const BreakingRequest& request, std::ostream& out);

}  // namespace fw
