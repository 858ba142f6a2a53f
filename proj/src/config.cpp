#include "cavity/util/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cavity/metrics.hpp"

namespace cavity {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(bool v) { return v ? "1" : "0"; }

double parse_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
  return d;
}

long long parse_int(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
  return i;
}

std::uint64_t parse_uint(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const unsigned long long i = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || v[0] == '-') {
    throw std::invalid_argument("config: bad unsigned integer for " + key + ": '" + v + "'");
  }
  return i;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_size(GridSize3 g) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%dx%dx%d", g.nx, g.ny, g.nz);
  return buf;
}

GridSize3 parse_size(const std::string& v, const std::string& key) {
  GridSize3 g;
  char extra;
  if (std::sscanf(v.c_str(), "%dx%dx%d%c", &g.nx, &g.ny, &g.nz, &extra) != 3) {
    throw std::invalid_argument("config: bad grid size for " + key + ": '" + v + "'");
  }
  return g;
}

}  // namespace

std::string config_to_text(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["grid"] = fmt_size(c.grid);
  kv["np"] = std::to_string(c.np);
  kv["mode"] = decomp_mode_name(c.mode);
  kv["dims"] = c.dims ? format_dims(*c.dims) : "auto";
  kv["strategy"] = strategy_name(c.strategy);
  kv["overlap"] = fmt(c.overlap);
  kv["growth_type"] = std::to_string(c.growth_type);
  kv["steps"] = std::to_string(c.steps);
  kv["seed"] = std::to_string(c.seed);
  kv["timeout_ms"] = fmt(c.timeout_ms);
  kv["monitor_every"] = std::to_string(c.monitor_every);
  kv["out_dir"] = c.out_dir;
  kv["dump_fields"] = fmt(c.dump_fields);
  kv["verify_tol"] = fmt(c.verify_tol);

  kv["fluid.rho"] = fmt(c.fluid.rho);
  kv["fluid.nu"] = fmt(c.fluid.nu);
  kv["fluid.alpha"] = fmt(c.fluid.alpha);
  kv["fluid.sigma"] = fmt(c.fluid.sigma);
  kv["fluid.gravity"] = fmt(c.fluid.gravity[0]) + "," + fmt(c.fluid.gravity[1]) + "," +
                        fmt(c.fluid.gravity[2]);
  kv["fluid.u_ref"] = fmt(c.fluid.u_ref);
  kv["fluid.kappa"] = fmt(c.fluid.kappa);
  kv["fluid.t_hot"] = fmt(c.fluid.t_hot);
  kv["fluid.t_cold"] = fmt(c.fluid.t_cold);
  kv["fluid.t_inf"] = fmt(c.fluid.t_inf);
  kv["fluid.length"] = fmt(c.fluid.length);

  kv["solver.cfl"] = fmt(c.solver.cfl);
  kv["solver.max_steps"] = std::to_string(c.solver.max_steps);
  kv["solver.conv_tol"] = fmt(c.solver.conv_tol);
  kv["solver.rescale"] = fmt(c.solver.rescale);
  kv["solver.check_every"] = std::to_string(c.solver.check_every);

  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

RunConfig config_from_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "grid") {
      c.grid = parse_size(val, key);
    } else if (key == "np") {
      c.np = static_cast<int>(parse_int(val, key));
    } else if (key == "mode") {
      auto m = parse_decomp_mode(val);
      if (!m) throw std::invalid_argument("config: unknown mode '" + val + "'");
      c.mode = *m;
    } else if (key == "dims") {
      if (val == "auto") {
        c.dims.reset();
      } else {
        auto d = parse_dims(val);
        if (!d) throw std::invalid_argument("config: bad dims '" + val + "'");
        c.dims = *d;
      }
    } else if (key == "strategy") {
      auto s = parse_strategy(val);
      if (!s) throw std::invalid_argument("config: unknown strategy '" + val + "'");
      c.strategy = *s;
    } else if (key == "overlap") {
      c.overlap = parse_bool(val, key);
    } else if (key == "growth_type") {
      c.growth_type = static_cast<int>(parse_int(val, key));
    } else if (key == "steps") {
      c.steps = static_cast<long>(parse_int(val, key));
    } else if (key == "seed") {
      c.seed = parse_uint(val, key);
    } else if (key == "timeout_ms") {
      c.timeout_ms = parse_double(val, key);
    } else if (key == "monitor_every") {
      c.monitor_every = static_cast<int>(parse_int(val, key));
    } else if (key == "out_dir") {
      c.out_dir = val;
    } else if (key == "dump_fields") {
      c.dump_fields = parse_bool(val, key);
    } else if (key == "verify_tol") {
      c.verify_tol = parse_double(val, key);
    } else if (key == "fluid.rho") {
      c.fluid.rho = parse_double(val, key);
    } else if (key == "fluid.nu") {
      c.fluid.nu = parse_double(val, key);
    } else if (key == "fluid.alpha") {
      c.fluid.alpha = parse_double(val, key);
    } else if (key == "fluid.sigma") {
      c.fluid.sigma = parse_double(val, key);
    } else if (key == "fluid.gravity") {
      double gx, gy, gz;
      char extra;
      if (std::sscanf(val.c_str(), "%lf,%lf,%lf%c", &gx, &gy, &gz, &extra) != 3) {
        throw std::invalid_argument("config: bad gravity triple '" + val + "'");
      }
      c.fluid.gravity = {gx, gy, gz};
    } else if (key == "fluid.u_ref") {
      c.fluid.u_ref = parse_double(val, key);
    } else if (key == "fluid.kappa") {
      c.fluid.kappa = parse_double(val, key);
    } else if (key == "fluid.t_hot") {
      c.fluid.t_hot = parse_double(val, key);
    } else if (key == "fluid.t_cold") {
      c.fluid.t_cold = parse_double(val, key);
    } else if (key == "fluid.t_inf") {
      c.fluid.t_inf = parse_double(val, key);
    } else if (key == "fluid.length") {
      c.fluid.length = parse_double(val, key);
    } else if (key == "solver.cfl") {
      c.solver.cfl = parse_double(val, key);
    } else if (key == "solver.max_steps") {
      c.solver.max_steps = static_cast<long>(parse_int(val, key));
    } else if (key == "solver.conv_tol") {
      c.solver.conv_tol = parse_double(val, key);
    } else if (key == "solver.rescale") {
      c.solver.rescale = parse_bool(val, key);
    } else if (key == "solver.check_every") {
      c.solver.check_every = static_cast<int>(parse_int(val, key));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  metrics::note_io();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str());
}

void save_config(const std::string& path, const RunConfig& c) {
  metrics::note_io();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot open " + path + " for writing");
  out << config_to_text(c);
}

}  // namespace cavity
