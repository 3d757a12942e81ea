#include "config.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "util.hpp"

namespace mpctune {

BoConfig BoSettings::to_bo_config() const {
  BoConfig c;
  c.kappa = kappa;
  c.n_init = n_init;
  c.max_iter = max_iter;
  c.restarts = restarts;
  c.seed = seed;
  c.kernel.lengthscale = lengthscale;
  c.kernel.nu = nu;
  c.kernel.noise = noise;
  return c;
}

namespace {

struct KeySpec {
  std::function<void(AppConfig&, double)> set;
  bool required = false;
};

std::map<std::string, KeySpec> key_table() {
  using C = AppConfig;
  std::map<std::string, KeySpec> t;
  t["alpha_e_cs"] = {[](C& c, double v) { c.plant.alpha_e_cs = v; }, true};
  t["alpha_e_hrc"] = {[](C& c, double v) { c.plant.alpha_e_hrc = v; }, true};
  t["alpha_e_hwg"] = {[](C& c, double v) { c.plant.alpha_e_hwg = v; }, true};
  t["alpha_ng_hwg"] = {[](C& c, double v) { c.plant.alpha_ng_hwg = v; }, true};
  t["alpha_e_ct"] = {[](C& c, double v) { c.plant.alpha_e_ct = v; }, true};
  t["alpha_w_ct"] = {[](C& c, double v) { c.plant.alpha_w_ct = v; }, true};
  t["alpha_h_hrc"] = {[](C& c, double v) { c.plant.alpha_h_hrc = v; }, true};
  t["alpha_cond_cs"] = {[](C& c, double v) { c.plant.alpha_cond_cs = v; }, true};
  t["p_cs_min"] = {[](C& c, double v) { c.plant.p_cs.lo = v; }, true};
  t["p_cs_max"] = {[](C& c, double v) { c.plant.p_cs.hi = v; }, true};
  t["p_hrc_min"] = {[](C& c, double v) { c.plant.p_hrc.lo = v; }, true};
  t["p_hrc_max"] = {[](C& c, double v) { c.plant.p_hrc.hi = v; }, true};
  t["p_hwg_min"] = {[](C& c, double v) { c.plant.p_hwg.lo = v; }, true};
  t["p_hwg_max"] = {[](C& c, double v) { c.plant.p_hwg.hi = v; }, true};
  t["p_ct_min"] = {[](C& c, double v) { c.plant.p_ct.lo = v; }, true};
  t["p_ct_max"] = {[](C& c, double v) { c.plant.p_ct.hi = v; }, true};
  t["p_hx_min"] = {[](C& c, double v) { c.plant.p_hx.lo = v; }, true};
  t["p_hx_max"] = {[](C& c, double v) { c.plant.p_hx.hi = v; }, true};
  t["p_cw_min"] = {[](C& c, double v) { c.plant.p_cw.lo = v; }, true};
  t["p_cw_max"] = {[](C& c, double v) { c.plant.p_cw.hi = v; }, true};
  t["p_hw_min"] = {[](C& c, double v) { c.plant.p_hw.lo = v; }, true};
  t["p_hw_max"] = {[](C& c, double v) { c.plant.p_hw.hi = v; }, true};
  t["e_cw_cap"] = {[](C& c, double v) { c.plant.e_cw_cap = v; }, true};
  t["e_hw_cap"] = {[](C& c, double v) { c.plant.e_hw_cap = v; }, true};
  t["price_water"] = {[](C& c, double v) { c.plant.price_water = v; }, true};
  t["price_gas"] = {[](C& c, double v) { c.plant.price_gas = v; }, true};
  t["price_demand"] = {[](C& c, double v) { c.plant.price_demand = v; }, true};
  t["rho_cw"] = {[](C& c, double v) { c.plant.rho_cw = v; }, false};
  t["rho_hw"] = {[](C& c, double v) { c.plant.rho_hw = v; }, false};
  t["horizon"] = {[](C& c, double v) { c.plant.horizon = static_cast<int>(v); }, false};
  t["month_hours"] = {[](C& c, double v) { c.plant.month_hours = static_cast<int>(v); }, false};
  t["start_soc"] = {[](C& c, double v) { c.plant.start_soc = v; }, false};
  t["forecast_noise_std"] = {[](C& c, double v) { c.plant.forecast_noise_std = v; }, false};
  t["forecast_seed"] = {[](C& c, double v) { c.plant.forecast_seed = static_cast<uint64_t>(v); }, false};
  t["bo.kappa"] = {[](C& c, double v) { c.bo.kappa = v; }, false};
  t["bo.n_init"] = {[](C& c, double v) { c.bo.n_init = static_cast<int>(v); }, false};
  t["bo.max_iter"] = {[](C& c, double v) { c.bo.max_iter = static_cast<int>(v); }, false};
  t["bo.restarts"] = {[](C& c, double v) { c.bo.restarts = static_cast<int>(v); }, false};
  t["bo.seed"] = {[](C& c, double v) { c.bo.seed = static_cast<uint64_t>(v); }, false};
  t["bo.lengthscale"] = {[](C& c, double v) { c.bo.lengthscale = v; }, false};
  t["bo.nu"] = {[](C& c, double v) { c.bo.nu = v; }, false};
  t["bo.noise"] = {[](C& c, double v) { c.bo.noise = v; }, false};
  return t;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

}  // namespace

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  const auto table = key_table();
  AppConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) fail(path, line_no, "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(path, line_no, "duplicate key '" + key + "'");
    double v = 0.0;
    try {
      size_t pos = 0;
      v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(path, line_no, "invalid number '" + value + "' for key '" + key + "'");
    }
    it->second.set(cfg, v);
  }
  std::string missing;
  for (const auto& [key, spec] : table) {
    if (spec.required && !seen.count(key)) missing += (missing.empty() ? "" : ", ") + key;
  }
  if (!missing.empty()) throw ConfigError(path + ": missing required keys: " + missing);
  cfg.plant.validate();
  return cfg;
}

std::string config_to_string(const AppConfig& c) {
  std::ostringstream os;
  const PlantConfig& p = c.plant;
  os << "# mpctune plant configuration\n";
  os << "# conversion coefficients (kW per kW of product unless noted)\n";
  os << "alpha_e_cs = " << fmt_double(p.alpha_e_cs) << "        # chiller electricity / kW chilled water\n";
  os << "alpha_e_hrc = " << fmt_double(p.alpha_e_hrc) << "       # HR chiller electricity / kW chilled water\n";
  os << "alpha_e_hwg = " << fmt_double(p.alpha_e_hwg) << "       # generator electricity / kW hot water\n";
  os << "alpha_ng_hwg = " << fmt_double(p.alpha_ng_hwg) << "      # generator gas / kW hot water\n";
  os << "alpha_e_ct = " << fmt_double(p.alpha_e_ct) << "        # tower electricity / kW condenser water\n";
  os << "alpha_w_ct = " << fmt_double(p.alpha_w_ct) << "         # tower make-up water, gal / kWh condenser\n";
  os << "alpha_h_hrc = " << fmt_double(p.alpha_h_hrc) << "       # HR chiller hot water byproduct / kW chilled\n";
  os << "alpha_cond_cs = " << fmt_double(p.alpha_cond_cs) << "     # chiller condenser duty / kW chilled\n";
  os << "\n# unit operating ranges, kW (storage discharge < 0 means charging)\n";
  const struct { const char* nm; const Limits& l; } lims[] = {
      {"p_cs", p.p_cs}, {"p_hrc", p.p_hrc}, {"p_hwg", p.p_hwg}, {"p_ct", p.p_ct},
      {"p_hx", p.p_hx}, {"p_cw", p.p_cw},   {"p_hw", p.p_hw},
  };
  for (const auto& l : lims) {
    os << l.nm << "_min = " << fmt_double(l.l.lo) << "\n" << l.nm << "_max = " << fmt_double(l.l.hi) << "\n";
  }
  os << "\n# storage capacities, kWh\n";
  os << "e_cw_cap = " << fmt_double(p.e_cw_cap) << "\n";
  os << "e_hw_cap = " << fmt_double(p.e_hw_cap) << "\n";
  os << "\n# prices\n";
  os << "price_water = " << fmt_double(p.price_water) << "      # $/gal\n";
  os << "price_gas = " << fmt_double(p.price_gas) << "        # $/kWh\n";
  os << "price_demand = " << fmt_double(p.price_demand) << "       # $/kW per billing month\n";
  os << "\n# carryover penalties, $/kWh (omit to use 10x the max electricity price)\n";
  if (!std::isnan(p.rho_cw)) os << "rho_cw = " << fmt_double(p.rho_cw) << "\n";
  if (!std::isnan(p.rho_hw)) os << "rho_hw = " << fmt_double(p.rho_hw) << "\n";
  os << "\n# controller and simulation\n";
  os << "horizon = " << p.horizon << "            # MPC prediction horizon, hours\n";
  os << "month_hours = " << p.month_hours << "       # billing month length, hours\n";
  os << "start_soc = " << fmt_double(p.start_soc) << "         # initial tank SOC, fraction of capacity\n";
  os << "forecast_noise_std = " << p.forecast_noise_std
     << " # realized = forecast * (1 + eps), eps ~ N(0, std^2)\n";
  os << "forecast_seed = " << p.forecast_seed << "\n";
  os << "\n# tuning defaults (overridable from the command line)\n";
  os << "bo.kappa = " << fmt_double(c.bo.kappa) << "\n";
  os << "bo.n_init = " << c.bo.n_init << "\n";
  os << "bo.max_iter = " << c.bo.max_iter << "\n";
  os << "bo.restarts = " << c.bo.restarts << "\n";
  os << "bo.seed = " << c.bo.seed << "\n";
  os << "bo.lengthscale = " << fmt_double(c.bo.lengthscale) << "   # in normalized tuning-box units\n";
  os << "bo.nu = " << fmt_double(c.bo.nu) << "             # Matern smoothness: 0.5, 1.5 or 2.5\n";
  os << "bo.noise = " << fmt_double(c.bo.noise) << "          # GP observation noise variance\n";
  return os.str();
}

void write_config(const AppConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_string(config);
}

uint64_t config_hash(const AppConfig& config) {
  const std::string s = config_to_string(config);
  uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace mpctune
