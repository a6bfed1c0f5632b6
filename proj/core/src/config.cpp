#include "catqec/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace catqec {

namespace {

std::string fmt_g(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_double(const std::string& v, const std::string& where) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": trailing characters in '" + v + "'");
  return out;
}

int64_t parse_int(const std::string& v, const std::string& where) {
  size_t pos = 0;
  int64_t out;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not an integer: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": trailing characters in '" + v + "'");
  return out;
}

uint64_t parse_u64(const std::string& v, const std::string& where) {
  size_t pos = 0;
  uint64_t out;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not an unsigned integer: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": trailing characters in '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (chi_over_2pi_mhz <= 0.0) throw ConfigError("chi_over_2pi_mhz must be positive");
  if (nbar <= 0.0) throw ConfigError("nbar must be positive");
  if (fock_dim < 2) throw ConfigError("fock_dim must be >= 2");
  if (tw_us < 0.0) throw ConfigError("tw_us must be non-negative");
  if (n_cycles < 1) throw ConfigError("n_cycles must be >= 1");
  if (t_sel_ns < 0.0) throw ConfigError("t_sel_ns must be non-negative");
  try {
    noise();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double amax = std::sqrt(nbar) * (1.0 + std::sqrt(2.0));
  if (amax * amax + 6.0 * amax > static_cast<double>(fock_dim))
    throw ConfigError("fock_dim too small for nbar: need |a|^2 + 6|a| <= fock_dim at the "
                      "largest amplitude reached during encoding");
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text,
                                               const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) throw ConfigError(where + ": empty key or value");

    if (key == "chi_over_2pi_mhz") cfg.chi_over_2pi_mhz = parse_double(val, where);
    else if (key == "t1_us") cfg.t1_us = parse_double(val, where);
    else if (key == "t2_us") cfg.t2_us = parse_double(val, where);
    else if (key == "tcav_us") cfg.tcav_us = parse_double(val, where);
    else if (key == "nbar") cfg.nbar = parse_double(val, where);
    else if (key == "alpha_phase") cfg.alpha_phase = parse_double(val, where);
    else if (key == "fock_dim") cfg.fock_dim = static_cast<int>(parse_int(val, where));
    else if (key == "tw_us") cfg.tw_us = parse_double(val, where);
    else if (key == "n_cycles") cfg.n_cycles = static_cast<int>(parse_int(val, where));
    else if (key == "t_sel_ns") cfg.t_sel_ns = parse_double(val, where);
    else if (key == "seed") cfg.seed = parse_u64(val, where);
    else if (key == "gate_model") {
      if (val == "suspended") cfg.gate_model = GateModel::SelectivePhase::suspended;
      else if (val == "active") cfg.gate_model = GateModel::SelectivePhase::active;
      else throw ConfigError(where + ": gate_model must be 'suspended' or 'active'");
    } else if (key == "init_mode") {
      if (val == "ideal-state") cfg.init_mode = InitMode::ideal_state;
      else if (val == "full-encode") cfg.init_mode = InitMode::full_encode;
      else throw ConfigError(where + ": init_mode must be 'ideal-state' or 'full-encode'");
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str(), path);
}

std::map<std::string, std::string> ExperimentConfig::resolved_keys() const {
  std::map<std::string, std::string> m;
  m["chi_over_2pi_mhz"] = fmt_g(chi_over_2pi_mhz);
  m["t1_us"] = fmt_g(t1_us);
  m["t2_us"] = fmt_g(t2_us);
  m["tcav_us"] = fmt_g(tcav_us);
  m["nbar"] = fmt_g(nbar);
  m["alpha_phase"] = fmt_g(alpha_phase);
  m["fock_dim"] = std::to_string(fock_dim);
  m["tw_us"] = fmt_g(tw_us);
  m["n_cycles"] = std::to_string(n_cycles);
  m["gate_model"] =
      gate_model == GateModel::SelectivePhase::suspended ? "suspended" : "active";
  m["t_sel_ns"] = fmt_g(t_sel_ns);
  m["seed"] = std::to_string(seed);
  m["init_mode"] = init_mode == InitMode::ideal_state ? "ideal-state" : "full-encode";
  return m;
}

}  // namespace catqec
