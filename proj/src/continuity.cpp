#include "fw/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fw/errors.hpp"
#include "fw/flowmap.hpp"
#include "fw/format.hpp"

namespace fw {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct RunDistances {
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<double> holder;
};

std::vector<std::size_t> sample_indices(std::size_t count, std::size_t samples) {
  std::vector<std::size_t> idx;
  if (count == 0) return idx;
  if (samples < 2 || samples >= count) {
    for (std::size_t k = 0; k < count; ++k) idx.push_back(k);
    return idx;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    idx.push_back((s * (count - 1)) / (samples - 1));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

RunDistances measure(const std::vector<EulerianSnapshot>& base, const Trajectory& run,
                     const std::vector<double>& alphas, const std::vector<std::size_t>& holder_at,
                     std::size_t budget) {
  if (run.states.size() != base.size()) {
    throw Error("continuity experiment: perturbed run stored " +
                std::to_string(run.states.size()) + " states, base run " +
                std::to_string(base.size()));
  }
  RunDistances d;
  d.holder.assign(alphas.size(), 0.0);
  std::size_t next = 0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const EulerianSnapshot snap = reconstruct(run.states[k]);
    const GridFunction du = snap.u - base[k].u;
    const double c0 = sup_norm(du);
    d.c0 = std::max(d.c0, c0);
    d.c1 = std::max(d.c1, c0 + sup_norm(snap.ux - base[k].ux));
    if (next < holder_at.size() && holder_at[next] == k) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        d.holder[a] = std::max(d.holder[a], holder_seminorm(du, alphas[a], budget));
      }
      ++next;
    }
  }
  return d;
}

}  // namespace

ContinuityReport continuity_experiment(const GridFunction& u0, const GridFunction& perturbation,
                                       const std::vector<double>& eps_values,
                                       const std::vector<double>& alphas,
                                       const SolverConfig& config,
                                       const ContinuityOptions& options) {
  require_same_grid(u0.grid(), config.grid, "continuity_experiment");
  require_same_grid(perturbation.grid(), config.grid, "continuity_experiment");
  for (double a : alphas) {
    if (!(a >= 0.0 && a < 1.0)) {
      throw ConfigError("Hölder exponent alpha must lie in [0, 1), got " + format_real(a));
    }
  }

  ContinuityReport rep;
  rep.eps_values = eps_values;
  rep.alphas = alphas;

  const BallGeometry base_geom = ball_geometry(u0, config.r0);
  rep.r = base_geom.r;
  double horizon = base_geom.T_theoretical;
  std::vector<GridFunction> data;
  data.reserve(eps_values.size());
  for (double eps : eps_values) {
    GridFunction dp = eps * perturbation;
    const double yd = c1_norm(dp) + sup_norm(derivative(dp));
    if (!(yd < config.r0)) {
      throw InitialDataError("perturbation eps = " + format_real(eps) + " has ||eps p||_Y = " +
                             format_real(yd) + ", not below r0 = " + format_real(config.r0) +
                             ": the perturbed datum leaves the ball around y0");
    }
    rep.c0_data_dist.push_back(sup_norm(dp));
    data.push_back(u0 + dp);
    horizon = std::min(horizon, ball_geometry(data.back(), config.r0).T_theoretical);
  }
  if (config.t_end) horizon = std::min(horizon, std::abs(*config.t_end));
  rep.horizon = horizon;

  SolverConfig cfg = config;
  cfg.t_end = horizon;
  cfg.dt = config.dt.value_or(std::min(config.grid.spacing(), base_geom.T_theoretical / 200.0));

  const Trajectory base = integrate(u0, cfg);
  if (!base.completed()) throw Error("continuity experiment: base run stopped: " + *base.breach);
  std::vector<EulerianSnapshot> base_snaps;
  base_snaps.reserve(base.states.size());
  for (const auto& s : base.states) base_snaps.push_back(reconstruct(s));
  const std::vector<std::size_t> holder_at =
      sample_indices(base.states.size(), options.holder_samples);

  const std::size_t m = eps_values.size();
  std::vector<RunDistances> dist(m);
  std::vector<std::exception_ptr> failure(m);
  const int jobs = static_cast<int>(std::max<std::size_t>(1, options.jobs));
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(m); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    try {
      if (eps_values[k] == 0.0) {
        dist[k].holder.assign(alphas.size(), 0.0);
        continue;
      }
      const Trajectory run = integrate(data[k], cfg);
      if (!run.completed()) {
        throw Error("continuity experiment: run eps = " + format_real(eps_values[k]) +
                    " stopped: " + *run.breach);
      }
      dist[k] = measure(base_snaps, run, alphas, holder_at, options.pair_budget);
    } catch (...) {
      failure[k] = std::current_exception();
    }
  }
  for (const auto& f : failure) {
    if (f) std::rethrow_exception(f);
  }

  rep.holder_sol_dist.assign(alphas.size(), std::vector<double>(m, 0.0));
  double ratio_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    rep.c0_sol_dist.push_back(dist[k].c0);
    rep.c1_sol_dist.push_back(dist[k].c1);
    for (std::size_t a = 0; a < alphas.size(); ++a) rep.holder_sol_dist[a][k] = dist[k].holder[a];
    const double ratio = rep.c0_data_dist[k] > 0.0 ? dist[k].c0 / rep.c0_data_dist[k] : 0.0;
    rep.lipschitz_ratio.push_back(ratio);
    if (rep.c0_data_dist[k] > 0.0) {
      rep.lipschitz_ratio_max = std::max(rep.lipschitz_ratio_max, ratio);
      ratio_min = std::min(ratio_min, ratio);
    }
  }
  rep.lipschitz_ratio_variation =
      ratio_min > 0.0 && std::isfinite(ratio_min) ? (rep.lipschitz_ratio_max - ratio_min) / ratio_min
                                                   : 0.0;

  for (std::size_t a = 0; a < alphas.size(); ++a) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < m; ++k) {
      if (rep.c0_data_dist[k] > 0.0 && rep.holder_sol_dist[a][k] > 0.0) {
        lx.push_back(std::log(rep.c0_data_dist[k]));
        ly.push_back(std::log(rep.holder_sol_dist[a][k]));
      }
    }
    rep.fitted_exponent.push_back(fit_slope(lx, ly));
  }
  return rep;
}

std::string to_json(const ContinuityReport& r) {
  nlohmann::ordered_json j;
  j["eps_values"] = r.eps_values;
  j["alphas"] = r.alphas;
  j["c0_data_dist"] = r.c0_data_dist;
  j["c0_sol_dist"] = r.c0_sol_dist;
  j["c1_sol_dist"] = r.c1_sol_dist;
  nlohmann::ordered_json holder = nlohmann::ordered_json::object();
  nlohmann::ordered_json fitted = nlohmann::ordered_json::object();
  for (std::size_t a = 0; a < r.alphas.size(); ++a) {
    const std::string key = format_real(r.alphas[a]);
    holder[key] = r.holder_sol_dist[a];
    const double f = r.fitted_exponent[a];
    fitted[key] = std::isfinite(f) ? nlohmann::ordered_json(f) : nlohmann::ordered_json(nullptr);
  }
  j["holder_sol_dist"] = holder;
  j["fitted_exponent"] = fitted;
  j["lipschitz_ratio"] = r.lipschitz_ratio;
  j["lipschitz_ratio_max"] = r.lipschitz_ratio_max;
  j["lipschitz_ratio_variation"] = r.lipschitz_ratio_variation;
  j["horizon"] = r.horizon;
  j["r"] = r.r;
  return j.dump(2) + "\n";
}

std::string to_csv(const ContinuityReport& r) {
  std::ostringstream out;
  out << "eps,c0_data,c0_sol,c1_sol,ratio";
  for (double a : r.alphas) out << ",holder_" << format_real(a);
  out << '\n';
  for (std::size_t k = 0; k < r.eps_values.size(); ++k) {
    out << format_real(r.eps_values[k]) << ',' << format_real(r.c0_data_dist[k]) << ','
        << format_real(r.c0_sol_dist[k]) << ',' << format_real(r.c1_sol_dist[k]) << ','
        << format_real(r.lipschitz_ratio[k]);
    for (std::size_t a = 0; a < r.alphas.size(); ++a) out << ',' << format_real(r.holder_sol_dist[a][k]);
    out << '\n';
  }
  return out.str();
}

}  // namespace fw
