#include "fw/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fw/errors.hpp"

namespace fw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  const auto r = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

Profile parse_profile(const std::string& raw) {
  const std::string text = trim(raw);
  Profile p;
  std::string name = text;
  std::vector<std::string> positional;
  std::vector<std::pair<std::string, std::string>> named;
  if (const auto open = text.find('('); open != std::string::npos) {
    if (text.back() != ')') throw ConfigError("profile '" + text + "': missing ')'");
    name = trim(text.substr(0, open));
    positional = split(text.substr(open + 1, text.size() - open - 2), ',');
  } else if (const auto colon = text.find(':'); colon != std::string::npos) {
    name = trim(text.substr(0, colon));
    for (const auto& item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        positional.push_back(item);
      } else {
        named.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
      }
    }
  }
  const std::string where = "profile '" + text + "'";

  if (name == "zero" || name == "peakon") {
    if (!positional.empty() || !named.empty()) throw ConfigError(where + ": takes no parameters");
    p.kind = name == "zero" ? Profile::Kind::zero : Profile::Kind::peakon;
    p.a = name == "zero" ? 0.0 : 8.0 / 9.0;
    p.width = name == "zero" ? 1.0 : 0.5;
    return p;
  }
  if (name == "from_csv") {
    p.kind = Profile::Kind::from_csv;
    if (positional.size() == 1 && named.empty()) {
      p.path = positional[0];
    } else if (positional.empty() && named.size() == 1 && named[0].first == "path") {
      p.path = named[0].second;
    } else {
      throw ConfigError(where + ": expected from_csv(path)");
    }
    if (p.path.empty()) throw ConfigError(where + ": empty path");
    return p;
  }
  if (name != "gaussian" && name != "sech2") throw ConfigError(where + ": unknown profile '" + name + "'");

  p.kind = name == "gaussian" ? Profile::Kind::gaussian : Profile::Kind::sech2;
  const std::string width_key = name == "gaussian" ? "sigma" : "k";
  const std::vector<std::string> keys{"a", width_key, "x0"};
  if (positional.size() > 3 || (!positional.empty() && !named.empty())) {
    throw ConfigError(where + ": use either positional (a, " + width_key + "[, x0]) or named parameters");
  }
  std::vector<bool> seen(3, false);
  auto set = [&](std::size_t k, const std::string& value) {
    if (seen[k]) throw ConfigError(where + ": parameter '" + keys[k] + "' given twice");
    seen[k] = true;
    const double v = parse_real(value, where + " parameter " + keys[k]);
    if (k == 0) p.a = v;
    if (k == 1) p.width = v;
    if (k == 2) p.x0 = v;
  };
  for (std::size_t k = 0; k < positional.size(); ++k) set(k, positional[k]);
  for (const auto& [key, value] : named) {
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) throw ConfigError(where + ": unknown parameter '" + key + "'");
    set(static_cast<std::size_t>(it - keys.begin()), value);
  }
  if (!seen[0] || !seen[1]) throw ConfigError(where + ": needs a and " + width_key);
  if (!(p.width > 0.0)) throw ConfigError(where + ": " + width_key + " must be positive");
  return p;
}

std::string to_string(const Profile& p) {
  switch (p.kind) {
    case Profile::Kind::zero:
      return "zero";
    case Profile::Kind::peakon:
      return "peakon";
    case Profile::Kind::from_csv:
      return "from_csv(" + p.path + ")";
    case Profile::Kind::gaussian:
    case Profile::Kind::sech2:
      break;
  }
  std::string out = p.kind == Profile::Kind::gaussian ? "gaussian(" : "sech2(";
  out += shortest(p.a) + ", " + shortest(p.width);
  if (p.x0 != 0.0) out += ", " + shortest(p.x0);
  return out + ")";
}

GridFunction sample(const Profile& p, const Grid& grid) {
  switch (p.kind) {
    case Profile::Kind::zero:
      return GridFunction::zeros(grid);
    case Profile::Kind::peakon:
      return GridFunction::sample(grid, [](double x) { return 8.0 / 9.0 * std::exp(-0.5 * std::abs(x)); });
    case Profile::Kind::gaussian:
      return GridFunction::sample(grid, [&](double x) {
        const double s = (x - p.x0) / p.width;
        return p.a * std::exp(-s * s);
      });
    case Profile::Kind::sech2:
      return GridFunction::sample(grid, [&](double x) {
        const double c = std::cosh(p.width * (x - p.x0));
        return p.a / (c * c);
      });
    case Profile::Kind::from_csv: {
      std::ifstream in(p.path);
      if (!in) throw ConfigError("cannot open initial-data file '" + p.path + "'");
      GridFunction f = [&] {
        try {
          return read_csv(in);
        } catch (const ConfigError& e) {
          throw ConfigError(p.path + ": " + e.what());
        }
      }();
      if (!(f.grid() == grid)) {
        throw ConfigError(p.path + ": grid (X = " + shortest(f.grid().half_width()) + ", n = " +
                          std::to_string(f.grid().size()) + ") does not match the run grid (X = " +
                          shortest(grid.half_width()) + ", n = " + std::to_string(grid.size()) + ")");
      }
      return f;
    }
  }
  throw ConfigError("unknown profile kind");
}

void apply_setting(Scenario& s, const std::string& key, const std::string& raw,
                   const std::string& where) {
  const std::string value = trim(raw);
  const std::string what = where + ": " + key;
  try {
    SolverConfig& c = s.config;
    if (key == "X") {
      c.grid = Grid(parse_real(value, what), c.grid.size());
    } else if (key == "n_points") {
      c.grid = Grid(c.grid.half_width(), parse_count(value, what));
    } else if (key == "dt") {
      if (value == "auto") {
        c.dt.reset();
      } else {
        const double dt = parse_real(value, what);
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        c.dt = dt;
      }
    } else if (key == "t_end") {
      if (value == "auto") c.t_end.reset(); else c.t_end = parse_real(value, what);
    } else if (key == "r0") {
      c.r0 = parse_real(value, what);
      if (!(c.r0 > 0.0 && c.r0 < 1.0 / 9.0)) throw ConfigError("r0 must satisfy 0 < r0 < 1/9");
    } else if (key == "q_floor") {
      c.q_floor = parse_real(value, what);
      if (!(c.q_floor >= 0.0 && c.q_floor < 1.0)) throw ConfigError("q_floor must lie in [0, 1)");
    } else if (key == "boundary_tolerance") {
      c.boundary_tolerance = parse_real(value, what);
      if (!(c.boundary_tolerance >= 0.0)) throw ConfigError("boundary_tolerance must be >= 0");
    } else if (key == "guard_mode") {
      c.guard_mode = parse_guard_mode(value);
    } else if (key == "initial_data") {
      s.profile = parse_profile(value);
    } else if (key == "name") {
      if (value.empty()) throw ConfigError("name must not be empty");
      s.name = value;
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError("output_dir must not be empty");
      s.output_dir = value;
    } else if (key == "snapshots") {
      s.snapshots = parse_count(value, what);
    } else if (key == "dump_kernels") {
      if (value != "true" && value != "false") throw ConfigError("dump_kernels must be true or false");
      s.dump_kernels = value == "true";
    } else if (key == "diagnostics") {
      static const std::set<std::string> known{"series", "snapshots", "flowmaps"};
      std::vector<std::string> list;
      if (!value.empty() && value != "none") {
        for (const auto& d : split(value, ',')) {
          if (!known.count(d)) throw ConfigError("unknown diagnostic '" + d + "'");
          if (std::find(list.begin(), list.end(), d) == list.end()) list.push_back(d);
        }
      }
      std::sort(list.begin(), list.end());
      s.diagnostics = std::move(list);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ConfigError(where + ": " + msg);
  }
}

Scenario parse_config(std::istream& in, const std::string& source) {
  Scenario s;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    apply_setting(s, key, line.substr(eq + 1), where);
  }
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::string to_config(const Scenario& s) {
  const SolverConfig& c = s.config;
  std::ostringstream out;
  out << "name = " << s.name << '\n'
      << "X = " << shortest(c.grid.half_width()) << '\n'
      << "n_points = " << c.grid.size() << '\n'
      << "dt = " << (c.dt ? shortest(*c.dt) : std::string("auto")) << '\n'
      << "t_end = " << (c.t_end ? shortest(*c.t_end) : std::string("auto")) << '\n'
      << "r0 = " << shortest(c.r0) << '\n'
      << "q_floor = " << shortest(c.q_floor) << '\n'
      << "boundary_tolerance = " << shortest(c.boundary_tolerance) << '\n'
      << "guard_mode = " << to_string(c.guard_mode) << '\n'
      << "initial_data = " << to_string(s.profile) << '\n';
  out << "diagnostics = ";
  if (s.diagnostics.empty()) out << "none";
  for (std::size_t i = 0; i < s.diagnostics.size(); ++i) out << (i ? "," : "") << s.diagnostics[i];
  out << '\n'
      << "snapshots = " << s.snapshots << '\n'
      << "dump_kernels = " << (s.dump_kernels ? "true" : "false") << '\n'
      << "output_dir = " << s.output_dir << '\n';
  return out.str();
}

}  // namespace fw
