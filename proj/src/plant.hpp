#pragma once

#include <string>

#include <Eigen/Dense>

#include "lp.hpp"

namespace mpctune {

struct Limits {
  double lo = 0.0;
  double hi = 0.0;
};

// Central-plant parameters. Conversion coefficients are kW consumed per kW of
// product (make-up water in gal per kWh of condenser duty). All numeric values
// are configuration, not published plant data.
struct PlantConfig {
  // conversion coefficients
  double alpha_e_cs = 0.0;    // chiller electricity per kW chilled water
  double alpha_e_hrc = 0.0;   // HR chiller electricity per kW chilled water
  double alpha_e_hwg = 0.0;   // hot water generator electricity per kW hot water
  double alpha_ng_hwg = 0.0;  // hot water generator gas per kW hot water
  double alpha_e_ct = 0.0;    // cooling tower electricity per kW condenser water
  double alpha_w_ct = 0.0;    // cooling tower make-up water, gal per kWh condenser water
  double alpha_h_hrc = 0.0;   // HR chiller hot water byproduct per kW chilled water
  double alpha_cond_cs = 0.0; // chiller condenser duty per kW chilled water

  // unit operating ranges, kW (storage discharge may be negative = charging)
  Limits p_cs, p_hrc, p_hwg, p_ct, p_hx, p_cw, p_hw;

  // storage capacities, kWh
  double e_cw_cap = 0.0;
  double e_hw_cap = 0.0;

  // prices
  double price_water = 0.0;   // $/gal
  double price_gas = 0.0;     // $/kWh
  double price_demand = 0.0;  // $/kW per billing month

  // carryover (unmet/over-met production) penalties, $/kWh; NaN -> derived as
  // 10x the maximum electricity price of the series at simulation time
  double rho_cw = std::numeric_limits<double>::quiet_NaN();
  double rho_hw = std::numeric_limits<double>::quiet_NaN();

  int horizon = 48;       // MPC prediction horizon, hours
  int month_hours = 720;  // billing month length, hours

  double start_soc = 0.5;            // initial tank state of charge, fraction
  double forecast_noise_std = 0.10;  // realized = forecast * (1 + eps)
  uint64_t forecast_seed = 1;

  void validate() const;  // throws ConfigError
};

// Synthetic desk-scale plant used by the examples and the test fixtures.
PlantConfig desk_plant_config();

struct PlantState {
  double e_cw = 0.0;
  double e_hw = 0.0;
  double ul_cw = 0.0, ul_hw = 0.0;  // carried-over under-production, kWh
  double ol_cw = 0.0, ol_hw = 0.0;  // carried-over over-production, kWh
  double peak_kw = 0.0;             // realized peak purchase this billing month
  long hour = 0;
};

struct ForecastWindow {
  Eigen::VectorXd load_e, load_cw, load_hw, price_e;
  int size() const { return static_cast<int>(load_e.size()); }
  void validate(int horizon) const;
};

// Storage bound back-off fractions, the tuning parameters.
struct BackoffTerms {
  double cw = 0.0;
  double hw = 0.0;
  void validate() const;  // each in [0, 0.5]
};

struct ControlAction {
  double p_cs = 0, p_hrc = 0, p_hwg = 0, p_ct = 0, p_hx = 0, p_cw = 0, p_hw = 0;
  double s_un_cw = 0, s_ov_cw = 0, s_un_hw = 0, s_ov_hw = 0;
};

// Storage bounds for the first horizon step given the current (clamped) SOC:
// the back-off margins, relaxed to the SOC itself when it sits outside them.
Limits first_step_bounds(double soc, double beta, double cap);

// Assembles the horizon LP: purchases, condenser/chilled/hot water balances,
// storage and carryover dynamics, peak-demand epigraph, back-off storage
// bounds. sigma_t amortizes the monthly demand charge over remaining solves.
LpProblem build_mpc_lp(const PlantConfig& config, const PlantState& state,
                       const ForecastWindow& forecasts, const BackoffTerms& backoff,
                       double sigma_t);

// First-hour variable block of an optimal solution, located by name tags.
ControlAction extract_first_action(const LpProblem& p, const LpSolution& s);

// 20*T + 1 for this formulation; exposed so callers can size-check.
int mpc_variable_count(int horizon);

}  // namespace mpctune
