#include "qubus/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qubus {

LinkParams RunConfig::link_params() const {
  LinkParams p;
  p.alpha = alpha;
  p.theta = theta;
  p.L0_km = L0_km;
  p.atten_km = atten_km;
  p.f_hz = f_hz;
  p.c_km_s = c_km_s;
  p.det = {eta_D, lambda_dark};
  p.gamma = gamma;
  p.delta = delta;
  return p;
}

ChainParams RunConfig::chain_params() const {
  ChainParams p;
  p.L0_km = L0_km;
  p.L_km = L_km;
  p.f_hz = f_hz;
  p.P_g = P_g;
  p.P_c = P_c;
  p.tau0_s = tau0_s;
  p.tauD_s = tauD_s;
  p.c_km_s = c_km_s;
  p.eta_D = eta_D;
  p.eta_M = eta_M;
  p.F_link = F_link;
  p.memory_modes = memory_modes;
  return p;
}

QndParams RunConfig::qnd_params() const {
  QndParams q;
  const double a0 = alpha0 ? *alpha0 : 2.0 * std::sqrt(5.0) / std::abs(theta);
  q.alpha0 = Complex{a0, 0.0};
  q.theta = theta;
  q.det = {eta_D, lambda_dark};
  return q;
}

Matrix4c RunConfig::input_density() const {
  if (input_state == "mixed") return Matrix4c::Identity() / 4.0;
  static const std::map<std::string, Vector4c> pure = [] {
    std::map<std::string, Vector4c> m;
    const char* basis[] = {"HH", "HV", "VH", "VV"};
    for (int i = 0; i < 4; ++i) m[basis[i]] = Vector4c::Unit(i);
    m["phi_plus"] = to_vector(bell_matrix(Bell::PhiPlus));
    m["phi_minus"] = to_vector(bell_matrix(Bell::PhiMinus));
    m["psi_plus"] = to_vector(bell_matrix(Bell::PsiPlus));
    m["psi_minus"] = to_vector(bell_matrix(Bell::PsiMinus));
    return m;
  }();
  const auto it = pure.find(input_state);
  if (it == pure.end()) throw ConfigError("unknown input_state '" + input_state + "'");
  return LinkSimulator::pure_input(it->second);
}

void RunConfig::validate() const {
  try {
    link_params().validate();
    chain_params().validate();
    SourceState{p_s}.validate();
    if (theta == 0.0) throw std::domain_error("theta must be nonzero");
    if (alpha0 && !(*alpha0 > 0.0)) throw std::domain_error("alpha0 must be positive");
    for (double l : lambda_sweep) {
      if (!(l >= 0.0)) throw std::domain_error("lambda_sweep values must be >= 0");
    }
    for (double d : fig3_L0_km) {
      if (!(d > 0.0)) throw std::domain_error("fig3_L0_km values must be positive");
    }
    for (double F : fig3_F) {
      if (!(F > 0.5 && F < 1.0)) throw std::domain_error("fig3_F values must lie in (1/2,1)");
    }
    for (double f : table_f_hz) {
      if (!(f > 0.0)) throw std::domain_error("table_f_hz values must be positive");
    }
    if (fig4_f_hz.size() != fig4_P_c.size()) {
      throw std::domain_error("fig4_f_hz and fig4_P_c must have equal length");
    }
    for (double L : fig4_L_km) {
      ChainParams c = chain_params();
      c.L_km = L;
      c.validate();
    }
    for (std::size_t i = 0; i < fig4_f_hz.size(); ++i) {
      ChainParams c = chain_params();
      c.f_hz = fig4_f_hz[i];
      c.P_c = fig4_P_c[i];
      c.validate();
    }
    if (mc_mode != "link" && mc_mode != "chain" && mc_mode != "both") {
      throw std::domain_error("mc_mode must be link, chain or both");
    }
    if (link_attempts < 1 || trials < 1) throw std::domain_error("attempt and trial counts must be >= 1");
    input_density();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError("not a finite number: '" + v + "'");
  }
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-') throw ConfigError("not a non-negative integer: '" + v + "'");
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("not a non-negative integer: '" + v + "'");
  }
  return x;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = to_double(v); }},
      {"theta", [](RunConfig& c, const std::string& v) { c.theta = to_double(v); }},
      {"L0_km", [](RunConfig& c, const std::string& v) { c.L0_km = to_double(v); }},
      {"atten_km", [](RunConfig& c, const std::string& v) { c.atten_km = to_double(v); }},
      {"f_hz", [](RunConfig& c, const std::string& v) { c.f_hz = to_double(v); }},
      {"c_km_s", [](RunConfig& c, const std::string& v) { c.c_km_s = to_double(v); }},
      {"eta_D", [](RunConfig& c, const std::string& v) { c.eta_D = to_double(v); }},
      {"lambda_dark", [](RunConfig& c, const std::string& v) { c.lambda_dark = to_double(v); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.gamma = to_double(v); }},
      {"delta", [](RunConfig& c, const std::string& v) { c.delta = to_double(v); }},
      {"input_state", [](RunConfig& c, const std::string& v) { c.input_state = v; }},
      {"L_km", [](RunConfig& c, const std::string& v) { c.L_km = to_double(v); }},
      {"P_g", [](RunConfig& c, const std::string& v) { c.P_g = to_double(v); }},
      {"P_c", [](RunConfig& c, const std::string& v) { c.P_c = to_double(v); }},
      {"tau0_s", [](RunConfig& c, const std::string& v) { c.tau0_s = to_double(v); }},
      {"tauD_s", [](RunConfig& c, const std::string& v) { c.tauD_s = to_double(v); }},
      {"eta_M", [](RunConfig& c, const std::string& v) { c.eta_M = to_double(v); }},
      {"F_link", [](RunConfig& c, const std::string& v) { c.F_link = to_double(v); }},
      {"memory_modes",
       [](RunConfig& c, const std::string& v) { c.memory_modes = static_cast<std::int64_t>(to_u64(v)); }},
      {"alpha0", [](RunConfig& c, const std::string& v) { c.alpha0 = to_double(v); }},
      {"p_s", [](RunConfig& c, const std::string& v) { c.p_s = to_double(v); }},
      {"lambda_sweep", [](RunConfig& c, const std::string& v) { c.lambda_sweep = to_list(v); }},
      {"fig3_L0_km", [](RunConfig& c, const std::string& v) { c.fig3_L0_km = to_list(v); }},
      {"fig3_F", [](RunConfig& c, const std::string& v) { c.fig3_F = to_list(v); }},
      {"table_f_hz", [](RunConfig& c, const std::string& v) { c.table_f_hz = to_list(v); }},
      {"fig4_L_km", [](RunConfig& c, const std::string& v) { c.fig4_L_km = to_list(v); }},
      {"fig4_f_hz", [](RunConfig& c, const std::string& v) { c.fig4_f_hz = to_list(v); }},
      {"fig4_P_c", [](RunConfig& c, const std::string& v) { c.fig4_P_c = to_list(v); }},
      {"mc_mode", [](RunConfig& c, const std::string& v) { c.mc_mode = v; }},
      {"link_attempts", [](RunConfig& c, const std::string& v) { c.link_attempts = to_u64(v); }},
      {"trials", [](RunConfig& c, const std::string& v) { c.trials = to_u64(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
      {"output_path", [](RunConfig& c, const std::string& v) { c.output_path = v; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

}  // namespace qubus
