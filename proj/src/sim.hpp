#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plant.hpp"
#include "series.hpp"

namespace mpctune {

// One tank's closed-loop bound update. Exactly one case fires per input:
//   1: in-range            -> margins kept
//   2: above upper margin  -> upper bound relaxed to the SOC
//   3: below lower margin  -> lower bound relaxed to the SOC
//   4: overflow (> cap)    -> clamp to cap, over-production carryover grows
//   5: dry-up (< 0)        -> clamp to 0, under-production carryover grows
struct BackoffUpdate {
  double soc = 0.0;       // clamped SOC
  Limits next_bounds;
  double ul_add = 0.0;    // kWh added to the under-production carryover
  double ol_add = 0.0;    // kWh added to the over-production carryover
  int case_id = 0;        // 1..5
};

BackoffUpdate apply_backoff_update(double e_next, double beta, double cap);

// Reconciles a committed first-hour action with the realized hour: production
// holds, storage discharge absorbs commodity-load forecast error, purchases
// are recomputed from the realized electrical load.
struct StepResult {
  double e_next_cw = 0.0;  // pre-clamp
  double e_next_hw = 0.0;
  double r_e = 0.0, r_w = 0.0, r_ng = 0.0;
  double cost_elec = 0.0, cost_water = 0.0, cost_gas = 0.0;
};

StepResult plant_step(const PlantState& state, const ControlAction& action,
                      const HourData& realized, const PlantConfig& config);

struct ViolationEvent {
  long hour = 0;
  char tank = 'c';      // 'c' chilled, 'h' hot
  char kind = 'o';      // 'o' overflow, 'd' dry-up
  double magnitude = 0; // kWh
};

struct HourRecord {
  long hour = 0;
  double soc_cw = 0, soc_hw = 0;            // post-update
  double r_e = 0, r_w = 0, r_ng = 0;
  double price_e = 0;
  double cost_elec = 0, cost_water = 0, cost_gas = 0, cost_demand = 0, cost_slack = 0;
  double ul_cw = 0, ul_hw = 0, ol_cw = 0, ol_hw = 0;
  double peak_kw = 0;
  int lp_iterations = 0;
};

struct ClosedLoopResult {
  double total_cost = 0;
  double cost_electricity = 0;
  double cost_demand = 0;
  double cost_water = 0;
  double cost_gas = 0;
  double cost_slack_penalty = 0;
  std::vector<double> weekly_costs;  // 168-hour buckets, partial tail included
  std::vector<HourRecord> hourly;
  std::vector<ViolationEvent> violations;
  long hours = 0;
  double rho_cw_used = 0, rho_hw_used = 0;
};

struct SimOptions {
  // when set, an LP that fails to solve is dumped here for inspection
  std::optional<std::string> lp_dump_path;
};

// Receding-horizon closed loop: solve, apply the first hour against realized
// disturbances, update storage bounds, accumulate cost. Throws SimulationError
// (with the failing hour) if any LP is not optimal.
ClosedLoopResult simulate(const PlantConfig& config, const DisturbanceSeries& series,
                          const BackoffTerms& backoff, long span_hours,
                          const SimOptions& options = {});

}  // namespace mpctune
