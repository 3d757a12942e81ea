#include "plant.hpp"

#include <cmath>
#include <sstream>

namespace mpctune {

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("plant config: " + what);
}
}  // namespace

void PlantConfig::validate() const {
  require(alpha_e_cs > 0 && alpha_e_hrc > 0 && alpha_e_hwg > 0 && alpha_ng_hwg > 0 &&
              alpha_e_ct > 0 && alpha_w_ct > 0 && alpha_h_hrc > 0 && alpha_cond_cs > 0,
          "all conversion coefficients must be > 0");
  for (const auto* lim : {&p_cs, &p_hrc, &p_hwg, &p_ct, &p_hx, &p_cw, &p_hw}) {
    require(std::isfinite(lim->lo) && std::isfinite(lim->hi), "load bounds must be finite");
    require(lim->lo <= lim->hi, "load lower bound exceeds upper bound");
  }
  require(e_cw_cap > 0 && e_hw_cap > 0, "storage capacities must be > 0");
  require(price_water >= 0 && price_gas >= 0 && price_demand >= 0, "prices must be >= 0");
  if (!std::isnan(rho_cw)) require(rho_cw >= 0, "rho_cw must be >= 0");
  if (!std::isnan(rho_hw)) require(rho_hw >= 0, "rho_hw must be >= 0");
  require(horizon >= 1, "horizon must be >= 1");
  require(month_hours >= 1, "month_hours must be >= 1");
  require(start_soc >= 0 && start_soc <= 1, "start_soc must be in [0, 1]");
  require(forecast_noise_std >= 0, "forecast_noise_std must be >= 0");
}

PlantConfig desk_plant_config() {
  PlantConfig c;
  c.alpha_e_cs = 0.20;
  c.alpha_e_hrc = 0.35;
  c.alpha_e_hwg = 0.02;
  c.alpha_ng_hwg = 1.15;
  c.alpha_e_ct = 0.03;
  c.alpha_w_ct = 0.50;
  c.alpha_h_hrc = 1.25;
  c.alpha_cond_cs = 1.20;
  c.p_cs = {0, 1200};
  c.p_hrc = {0, 500};
  c.p_hwg = {0, 800};
  c.p_ct = {0, 2500};
  c.p_hx = {0, 800};
  c.p_cw = {-500, 500};
  c.p_hw = {-300, 300};
  c.e_cw_cap = 1000;
  c.e_hw_cap = 500;
  c.price_water = 0.009;
  c.price_gas = 0.018;
  c.price_demand = 4.5;
  c.rho_cw = 2.0;
  c.rho_hw = 2.0;
  c.horizon = 48;
  c.month_hours = 720;
  c.start_soc = 0.5;
  c.forecast_noise_std = 0.10;
  c.forecast_seed = 1;
  return c;
}

void ForecastWindow::validate(int horizon) const {
  if (load_e.size() != horizon || load_cw.size() != horizon || load_hw.size() != horizon ||
      price_e.size() != horizon) {
    throw InputError("forecast window length does not match the horizon");
  }
  if (load_e.minCoeff() < 0 || load_cw.minCoeff() < 0 || load_hw.minCoeff() < 0) {
    throw InputError("forecast loads must be >= 0");
  }
}

void BackoffTerms::validate() const {
  if (!(cw >= 0.0 && cw <= 0.5 && hw >= 0.0 && hw <= 0.5)) {
    throw ConfigError("back-off terms must lie in [0, 0.5]");
  }
}

Limits first_step_bounds(double soc, double beta, double cap) {
  Limits b{beta * cap, (1.0 - beta) * cap};
  if (soc > b.hi) b.hi = soc;
  if (soc < b.lo) b.lo = soc;
  return b;
}

int mpc_variable_count(int horizon) { return 20 * horizon + 1; }

namespace {

// per-hour variable offsets within an hour block
enum VarOffset {
  kPcs = 0, kPhrc, kPhwg, kPct, kPhx, kPcw, kPhw,
  kRe, kRw, kRng,
  kSunCw, kSovCw, kSunHw, kSovHw,
  kEcw, kEhw,
  kUlCw, kUlHw, kOlCw, kOlHw,
  kBlock  // = 20
};

std::string tag(const char* base, int k) { return std::string(base) + "[" + std::to_string(k) + "]"; }

}  // namespace

LpProblem build_mpc_lp(const PlantConfig& cfg, const PlantState& state,
                       const ForecastWindow& fc, const BackoffTerms& backoff, double sigma_t) {
  cfg.validate();
  backoff.validate();
  const int T = cfg.horizon;
  fc.validate(T);
  if (!(sigma_t > 0)) throw InputError("build_mpc_lp: sigma_t must be > 0");
  if (std::isnan(cfg.rho_cw) || std::isnan(cfg.rho_hw))
    throw InputError("build_mpc_lp: carryover penalties must be resolved");

  const int nv = mpc_variable_count(T);
  const int r_var = 20 * T;  // peak-demand variable R
  const int m_eq = 12 * T;
  const int m_ub = T;

  LpProblem p;
  p.c.setZero(nv);
  p.a_eq.setZero(m_eq, nv);
  p.b_eq.setZero(m_eq);
  p.a_ub.setZero(m_ub, nv);
  p.b_ub.setZero(m_ub);
  p.lb.setConstant(nv, 0.0);
  p.ub.setConstant(nv, kInf);
  p.var_names.resize(nv);
  p.row_names.resize(m_eq + m_ub);

  const auto idx = [&](int k, VarOffset off) { return k * kBlock + static_cast<int>(off); };

  for (int k = 0; k < T; ++k) {
    p.var_names[idx(k, kPcs)] = tag("P_cs", k);
    p.var_names[idx(k, kPhrc)] = tag("P_hrc", k);
    p.var_names[idx(k, kPhwg)] = tag("P_hwg", k);
    p.var_names[idx(k, kPct)] = tag("P_ct", k);
    p.var_names[idx(k, kPhx)] = tag("P_hx", k);
    p.var_names[idx(k, kPcw)] = tag("P_cw", k);
    p.var_names[idx(k, kPhw)] = tag("P_hw", k);
    p.var_names[idx(k, kRe)] = tag("r_e", k);
    p.var_names[idx(k, kRw)] = tag("r_w", k);
    p.var_names[idx(k, kRng)] = tag("r_ng", k);
    p.var_names[idx(k, kSunCw)] = tag("S_un_cw", k);
    p.var_names[idx(k, kSovCw)] = tag("S_ov_cw", k);
    p.var_names[idx(k, kSunHw)] = tag("S_un_hw", k);
    p.var_names[idx(k, kSovHw)] = tag("S_ov_hw", k);
    p.var_names[idx(k, kEcw)] = tag("E_cw", k);
    p.var_names[idx(k, kEhw)] = tag("E_hw", k);
    p.var_names[idx(k, kUlCw)] = tag("ul_cw", k);
    p.var_names[idx(k, kUlHw)] = tag("ul_hw", k);
    p.var_names[idx(k, kOlCw)] = tag("ol_cw", k);
    p.var_names[idx(k, kOlHw)] = tag("ol_hw", k);
  }
  p.var_names[r_var] = "R";

  // variable bounds
  for (int k = 0; k < T; ++k) {
    const struct { VarOffset off; Limits lim; } loads[] = {
        {kPcs, cfg.p_cs}, {kPhrc, cfg.p_hrc}, {kPhwg, cfg.p_hwg}, {kPct, cfg.p_ct},
        {kPhx, cfg.p_hx}, {kPcw, cfg.p_cw},   {kPhw, cfg.p_hw},
    };
    for (const auto& l : loads) {
      p.lb(idx(k, l.off)) = l.lim.lo;
      p.ub(idx(k, l.off)) = l.lim.hi;
    }
    // purchases and slacks keep [0, inf); carryovers keep [0, inf)
    const Limits cw_b = k == 0 ? first_step_bounds(state.e_cw, backoff.cw, cfg.e_cw_cap)
                               : Limits{backoff.cw * cfg.e_cw_cap, (1.0 - backoff.cw) * cfg.e_cw_cap};
    const Limits hw_b = k == 0 ? first_step_bounds(state.e_hw, backoff.hw, cfg.e_hw_cap)
                               : Limits{backoff.hw * cfg.e_hw_cap, (1.0 - backoff.hw) * cfg.e_hw_cap};
    if (cw_b.lo > cw_b.hi || hw_b.lo > hw_b.hi)
      throw InputError("build_mpc_lp: inconsistent storage bounds");
    p.lb(idx(k, kEcw)) = cw_b.lo;
    p.ub(idx(k, kEcw)) = cw_b.hi;
    p.lb(idx(k, kEhw)) = hw_b.lo;
    p.ub(idx(k, kEhw)) = hw_b.hi;
  }
  p.lb(r_var) = state.peak_kw;

  // objective
  for (int k = 0; k < T; ++k) {
    p.c(idx(k, kRe)) = fc.price_e(k);
    p.c(idx(k, kRw)) = cfg.price_water;
    p.c(idx(k, kRng)) = cfg.price_gas;
    p.c(idx(k, kUlCw)) = cfg.rho_cw;
    p.c(idx(k, kOlCw)) = cfg.rho_cw;
    p.c(idx(k, kUlHw)) = cfg.rho_hw;
    p.c(idx(k, kOlHw)) = cfg.rho_hw;
  }
  p.c(r_var) = cfg.price_demand / sigma_t;

  // equality rows, 12 per hour
  int row = 0;
  for (int k = 0; k < T; ++k) {
    // electricity purchase
    p.a_eq(row, idx(k, kRe)) = 1.0;
    p.a_eq(row, idx(k, kPcs)) = -cfg.alpha_e_cs;
    p.a_eq(row, idx(k, kPhrc)) = -cfg.alpha_e_hrc;
    p.a_eq(row, idx(k, kPhwg)) = -cfg.alpha_e_hwg;
    p.a_eq(row, idx(k, kPct)) = -cfg.alpha_e_ct;
    p.b_eq(row) = fc.load_e(k);
    p.row_names[row] = tag("elec", k);
    ++row;
    // water purchase
    p.a_eq(row, idx(k, kRw)) = 1.0;
    p.a_eq(row, idx(k, kPct)) = -cfg.alpha_w_ct;
    p.row_names[row] = tag("water", k);
    ++row;
    // gas purchase
    p.a_eq(row, idx(k, kRng)) = 1.0;
    p.a_eq(row, idx(k, kPhwg)) = -cfg.alpha_ng_hwg;
    p.row_names[row] = tag("gas", k);
    ++row;
    // condenser water balance
    p.a_eq(row, idx(k, kPct)) = 1.0;
    p.a_eq(row, idx(k, kPcs)) = -cfg.alpha_cond_cs;
    p.a_eq(row, idx(k, kPhx)) = -1.0;
    p.row_names[row] = tag("cond", k);
    ++row;
    // chilled water balance
    p.a_eq(row, idx(k, kPcs)) = 1.0;
    p.a_eq(row, idx(k, kPhrc)) = 1.0;
    p.a_eq(row, idx(k, kPcw)) = 1.0;
    p.a_eq(row, idx(k, kSunCw)) = 1.0;
    p.a_eq(row, idx(k, kSovCw)) = -1.0;
    p.b_eq(row) = fc.load_cw(k);
    p.row_names[row] = tag("cw_bal", k);
    ++row;
    // hot water balance
    p.a_eq(row, idx(k, kPhrc)) = cfg.alpha_h_hrc;
    p.a_eq(row, idx(k, kPhwg)) = 1.0;
    p.a_eq(row, idx(k, kPhx)) = -1.0;
    p.a_eq(row, idx(k, kPhw)) = 1.0;
    p.a_eq(row, idx(k, kSunHw)) = 1.0;
    p.a_eq(row, idx(k, kSovHw)) = -1.0;
    p.b_eq(row) = fc.load_hw(k);
    p.row_names[row] = tag("hw_bal", k);
    ++row;
    // storage dynamics: E[k] = E[k-1] - P[k]
    p.a_eq(row, idx(k, kEcw)) = 1.0;
    p.a_eq(row, idx(k, kPcw)) = 1.0;
    if (k == 0) {
      p.b_eq(row) = state.e_cw;
    } else {
      p.a_eq(row, idx(k - 1, kEcw)) = -1.0;
    }
    p.row_names[row] = tag("e_cw_dyn", k);
    ++row;
    p.a_eq(row, idx(k, kEhw)) = 1.0;
    p.a_eq(row, idx(k, kPhw)) = 1.0;
    if (k == 0) {
      p.b_eq(row) = state.e_hw;
    } else {
      p.a_eq(row, idx(k - 1, kEhw)) = -1.0;
    }
    p.row_names[row] = tag("e_hw_dyn", k);
    ++row;
    // carryover dynamics: ul[k] = ul[k-1] - S_un[k], ol[k] = ol[k-1] - S_ov[k]
    const struct { VarOffset st; VarOffset sl; const char* nm; double anchor; } dyn[] = {
        {kUlCw, kSunCw, "ul_cw_dyn", state.ul_cw},
        {kUlHw, kSunHw, "ul_hw_dyn", state.ul_hw},
        {kOlCw, kSovCw, "ol_cw_dyn", state.ol_cw},
        {kOlHw, kSovHw, "ol_hw_dyn", state.ol_hw},
    };
    for (const auto& dn : dyn) {
      p.a_eq(row, idx(k, dn.st)) = 1.0;
      p.a_eq(row, idx(k, dn.sl)) = 1.0;
      if (k == 0) {
        p.b_eq(row) = dn.anchor;
      } else {
        p.a_eq(row, idx(k - 1, dn.st)) = -1.0;
      }
      p.row_names[row] = tag(dn.nm, k);
      ++row;
    }
  }

  // peak-demand epigraph: r_e[k] - R <= 0
  for (int k = 0; k < T; ++k) {
    p.a_ub(k, idx(k, kRe)) = 1.0;
    p.a_ub(k, r_var) = -1.0;
    p.row_names[m_eq + k] = tag("peak", k);
  }

  return p;
}

ControlAction extract_first_action(const LpProblem& p, const LpSolution& s) {
  if (s.status != LpStatus::Optimal) {
    throw NumericalError(std::string("extract_first_action: solution status is ") +
                         to_string(s.status));
  }
  const auto value = [&](const char* base) {
    const int j = p.var_index(tag(base, 0));
    if (j < 0) throw InputError(std::string("extract_first_action: missing variable ") + base);
    return s.x(j);
  };
  ControlAction a;
  a.p_cs = value("P_cs");
  a.p_hrc = value("P_hrc");
  a.p_hwg = value("P_hwg");
  a.p_ct = value("P_ct");
  a.p_hx = value("P_hx");
  a.p_cw = value("P_cw");
  a.p_hw = value("P_hw");
  a.s_un_cw = value("S_un_cw");
  a.s_ov_cw = value("S_ov_cw");
  a.s_un_hw = value("S_un_hw");
  a.s_ov_hw = value("S_ov_hw");

  const struct { double v; const char* nm; } checks[] = {
      {a.p_cs, "P_cs"}, {a.p_hrc, "P_hrc"}, {a.p_hwg, "P_hwg"}, {a.p_ct, "P_ct"},
      {a.p_hx, "P_hx"}, {a.p_cw, "P_cw"},   {a.p_hw, "P_hw"},
  };
  for (const auto& c : checks) {
    const int j = p.var_index(tag(c.nm, 0));
    if (c.v < p.lb(j) - 1e-7 || c.v > p.ub(j) + 1e-7) {
      std::ostringstream os;
      os << "extract_first_action: " << c.nm << "=" << c.v << " violates bounds ["
         << p.lb(j) << ", " << p.ub(j) << "]";
      throw NumericalError(os.str());
    }
  }
  return a;
}

}  // namespace mpctune
