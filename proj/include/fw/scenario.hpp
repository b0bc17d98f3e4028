#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fw/grid.hpp"
#include "fw/lagrangian.hpp"

namespace fw {

/// Named initial profile.
///   zero
///   gaussian(a, sigma[, x0])   a exp(−((x − x0)/sigma)²)
///   sech2(a, k[, x0])          a sech²(k (x − x0))
///   peakon                     (8/9) e^{−|x|/2}
///   from_csv(path)             `x,value` file on the run's grid
/// Both `gaussian(0.1, 1)` and `gaussian:a=0.1,sigma=1` are accepted.
struct Profile {
  enum class Kind { zero, gaussian, sech2, peakon, from_csv };
  Kind kind = Kind::gaussian;
  double a = 0.1;
  double width = 1.0;  ///< sigma for gaussian, k for sech2
  double x0 = 0.0;
  std::string path;
};

Profile parse_profile(const std::string& text);
/// Canonical text, accepted by parse_profile.
std::string to_string(const Profile& p);
GridFunction sample(const Profile& p, const Grid& grid);

struct Scenario {
  std::string name = "fw";
  SolverConfig config;
  Profile profile;
  /// Subset of {series, snapshots, flowmaps}.
  std::vector<std::string> diagnostics{"flowmaps", "series", "snapshots"};
  std::string output_dir = "fw_out";
  /// Stored times written as snapshot and flow-map CSVs, evenly spaced.
  std::size_t snapshots = 5;
  /// Also write kernels.csv with both P₁/P₂ evaluation paths at the final state.
  bool dump_kernels = false;
};

/// Sets one key (same names in config files and on the command line):
/// X, n_points, dt, t_end, r0, q_floor, boundary_tolerance, guard_mode,
/// initial_data, name, diagnostics, output_dir, snapshots, dump_kernels. `auto` is
/// accepted for dt and t_end. Throws ConfigError naming `where`.
void apply_setting(Scenario& s, const std::string& key, const std::string& value,
                   const std::string& where);

/// `key = value` lines; `#` starts a comment. Errors carry `source:line`.
Scenario parse_config(std::istream& in, const std::string& source = "<config>");
Scenario load_config(const std::string& path);

/// Canonical config text; parse_config(to_config(s)) reproduces s.
std::string to_config(const Scenario& s);

/// Parses a real, rejecting trailing garbage and non-finite values.
double parse_real(const std::string& text, const std::string& what);
/// Comma-separated reals.
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

}  // namespace fw
