// fw: command-line front end for the Fornberg–Whitham characteristic solver.

#include <deque>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fw/commands.hpp"
#include "fw/errors.hpp"
#include "fw/scenario.hpp"

namespace {

// Flags that map one-to-one onto config keys, applied on top of --config.
struct ScenarioFlags {
  std::string config;
  std::deque<std::pair<std::string, std::string>> values;  // key, text; stable addresses
  std::vector<std::pair<CLI::Option*, std::string>> options;

  void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    values.emplace_back(key, std::string());
    options.emplace_back(app.add_option(flag, values.back().second, help), key);
  }

  fw::Scenario build() const {
    fw::Scenario s = config.empty() ? fw::Scenario{} : fw::load_config(config);
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].first->count() > 0) {
        fw::apply_setting(s, values[i].first, values[i].second, options[i].first->get_name());
      }
    }
    return s;
  }

  bool given(const std::string& key) const {
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (values[i].first == key && options[i].first->count() > 0) return true;
    }
    return false;
  }
};

void add_scenario_flags(CLI::App& app, ScenarioFlags& f) {
  app.add_option("--config", f.config, "key = value scenario file (flags override it)");
  f.add(app, "--profile", "initial_data",
        "initial data: zero | peakon | gaussian:a=..,sigma=..[,x0=..] | sech2:a=..,k=..[,x0=..] | "
        "from_csv:path");
  f.add(app, "--X", "X", "domain half-width");
  f.add(app, "--n", "n_points", "number of grid points");
  f.add(app, "--dt", "dt", "time step or 'auto' (min(h, T/200))");
  f.add(app, "--t-end", "t_end", "final time or 'auto' (T_theoretical)");
  f.add(app, "--r0", "r0", "ball radius, 0 < r0 < 1/9");
  f.add(app, "--q-floor", "q_floor", "smallest admissible q");
  f.add(app, "--boundary-tolerance", "boundary_tolerance", "max |u0| allowed at +-X");
  f.add(app, "--guard", "guard_mode", "enforce | warn");
  f.add(app, "--output-dir", "output_dir", "output directory (FW_OUTPUT_DIR overrides)");
  f.add(app, "--name", "name", "scenario name");
  f.add(app, "--snapshots", "snapshots", "number of snapshot/flow-map files");
  f.add(app, "--diagnostics", "diagnostics", "comma list of series,snapshots,flowmaps or none");
  f.add(app, "--dump-kernels", "dump_kernels", "true: write both kernel paths at the final state");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fornberg-Whitham solver via the characteristic (Lagrangian) ODE system"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "integrate and write snapshots, flow maps and diagnostics");
  ScenarioFlags solve_flags;
  add_scenario_flags(*solve, solve_flags);

  auto* verify = app.add_subcommand("verify", "run the bound, drift and convergence checks");
  ScenarioFlags verify_flags;
  add_scenario_flags(*verify, verify_flags);

  auto* cont = app.add_subcommand("continuity", "data-to-solution continuity experiment");
  ScenarioFlags cont_flags;
  add_scenario_flags(*cont, cont_flags);
  std::string perturbation = "gaussian:a=0.1,sigma=0.5,x0=1";
  std::string eps_text = "1e-1,1e-2,1e-3,1e-4";
  std::string alpha_text = "0,0.5";
  std::size_t jobs = 1;
  std::size_t holder_samples = 21;
  cont->add_option("--perturbation", perturbation, "perturbation profile p (u0 + eps p)")
      ->capture_default_str();
  cont->add_option("--eps", eps_text, "comma list of eps values")->capture_default_str();
  cont->add_option("--alpha", alpha_text, "comma list of Hoelder exponents in [0, 1)")
      ->capture_default_str();
  cont->add_option("--jobs", jobs, "concurrent eps runs")->capture_default_str()->check(CLI::PositiveNumber);
  cont->add_option("--holder-samples", holder_samples, "times at which Hoelder distances are taken")
      ->capture_default_str();

  auto* breaking = app.add_subcommand("breaking", "integrate past T until q reaches q_floor");
  ScenarioFlags breaking_flags;
  add_scenario_flags(*breaking, breaking_flags);
  std::string t_max_text;
  std::string amplitudes_text;
  breaking->add_option("--t-max", t_max_text, "integration limit (default 5 T_theoretical)");
  breaking->add_option("--amplitudes", amplitudes_text, "comma list: sweep the profile amplitude");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fw::kExitConfig;
  }

  try {
    if (solve->parsed()) return fw::run_solve(solve_flags.build(), std::cout);
    if (verify->parsed()) return fw::run_verify(verify_flags.build(), std::cout);
    if (cont->parsed()) {
      fw::ContinuityRequest req;
      req.perturbation = fw::parse_profile(perturbation);
      req.eps_values = fw::parse_real_list(eps_text, "--eps");
      req.alphas = fw::parse_real_list(alpha_text, "--alpha");
      for (double a : req.alphas) {
        if (!(a >= 0.0 && a < 1.0)) {
          throw fw::ConfigError("--alpha: Hoelder exponents must satisfy 0 <= alpha < 1, got " +
                                std::to_string(a));
        }
      }
      req.jobs = jobs;
      req.holder_samples = holder_samples;
      return fw::run_continuity(cont_flags.build(), req, std::cout);
    }
    if (breaking->parsed()) {
      fw::Scenario s = breaking_flags.build();
      if (!breaking_flags.given("guard_mode")) s.config.guard_mode = fw::GuardMode::warn;
      fw::BreakingRequest req;
      if (!t_max_text.empty()) req.t_max = fw::parse_real(t_max_text, "--t-max");
      if (!amplitudes_text.empty()) req.amplitudes = fw::parse_real_list(amplitudes_text, "--amplitudes");
      return fw::run_breaking(s, req, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fw::exit_code_for(e);
  }
  return fw::kExitConfig;
}
