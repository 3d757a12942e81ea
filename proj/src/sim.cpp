#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mpctune {

namespace {
// absorbs LP round-off before the case analysis so exact arithmetic paths
// (zero forecast error) cannot log phantom violations
constexpr double kSocSnapTol = 1e-6;  // kWh
}  // namespace

BackoffUpdate apply_backoff_update(double e_next, double beta, double cap) {
  if (!std::isfinite(e_next)) throw InputError("apply_backoff_update: non-finite SOC");
  const double lo_m = beta * cap;
  const double hi_m = (1.0 - beta) * cap;
  BackoffUpdate u;
  if (e_next < 0.0) {
    u.case_id = 5;
    u.soc = 0.0;
    u.next_bounds = {0.0, hi_m};
    u.ul_add = -e_next;
  } else if (e_next > cap) {
    u.case_id = 4;
    u.soc = cap;
    u.next_bounds = {lo_m, cap};
    u.ol_add = e_next - cap;
  } else if (e_next < lo_m) {
    u.case_id = 3;
    u.soc = e_next;
    u.next_bounds = {e_next, hi_m};
  } else if (e_next > hi_m) {
    u.case_id = 2;
    u.soc = e_next;
    u.next_bounds = {lo_m, e_next};
  } else {
    u.case_id = 1;
    u.soc = e_next;
    u.next_bounds = {lo_m, hi_m};
  }
  return u;
}

StepResult plant_step(const PlantState& state, const ControlAction& a, const HourData& realized,
                      const PlantConfig& cfg) {
  StepResult r;
  // storage discharge absorbs the commodity-load forecast error
  const double p_cw_real = realized.load_cw - a.p_cs - a.p_hrc;
  const double p_hw_real = realized.load_hw - cfg.alpha_h_hrc * a.p_hrc - a.p_hwg + a.p_hx;
  r.e_next_cw = state.e_cw - p_cw_real;
  r.e_next_hw = state.e_hw - p_hw_real;

  r.r_e = cfg.alpha_e_cs * a.p_cs + cfg.alpha_e_hrc * a.p_hrc + cfg.alpha_e_hwg * a.p_hwg +
          cfg.alpha_e_ct * a.p_ct + realized.load_e;
  r.r_w = cfg.alpha_w_ct * a.p_ct;
  r.r_ng = cfg.alpha_ng_hwg * a.p_hwg;

  r.cost_elec = realized.price_e * r.r_e;
  r.cost_water = cfg.price_water * r.r_w;
  r.cost_gas = cfg.price_gas * r.r_ng;
  return r;
}

ClosedLoopResult simulate(const PlantConfig& config, const DisturbanceSeries& series,
                          const BackoffTerms& backoff, long span_hours,
                          const SimOptions& options) {
  config.validate();
  backoff.validate();
  if (span_hours < 1) throw InputError("simulate: span_hours must be >= 1");
  if (!series.has_forecasts()) throw InputError("simulate: series has no forecasts");
  if (span_hours + config.horizon > series.hours()) {
    std::ostringstream os;
    os << "simulate: series covers " << series.hours() << " hours but span " << span_hours
       << " + horizon " << config.horizon << " are required";
    throw InputError(os.str());
  }

  PlantConfig cfg = config;
  if (std::isnan(cfg.rho_cw) || std::isnan(cfg.rho_hw)) {
    double max_price = 0.0;
    for (const double p : series.price_e()) max_price = std::max(max_price, p);
    const double rho = 10.0 * max_price;
    if (std::isnan(cfg.rho_cw)) cfg.rho_cw = rho;
    if (std::isnan(cfg.rho_hw)) cfg.rho_hw = rho;
  }

  ClosedLoopResult res;
  res.rho_cw_used = cfg.rho_cw;
  res.rho_hw_used = cfg.rho_hw;
  res.hours = span_hours;
  res.weekly_costs.assign((span_hours + 167) / 168, 0.0);
  res.hourly.reserve(span_hours);

  PlantState state;
  state.e_cw = cfg.start_soc * cfg.e_cw_cap;
  state.e_hw = cfg.start_soc * cfg.e_hw_cap;

  const auto snap = [](double v, double lo, double hi) {
    if (v < lo && v > lo - kSocSnapTol) return lo;
    if (v > hi && v < hi + kSocSnapTol) return hi;
    return v;
  };

  for (long t = 0; t < span_hours; ++t) {
    const double sigma_t = static_cast<double>(cfg.month_hours - (t % cfg.month_hours));
    const ForecastWindow fc = series.window(t, cfg.horizon);
    const LpProblem lp = build_mpc_lp(cfg, state, fc, backoff, sigma_t);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
      if (options.lp_dump_path) {
        std::ofstream os(*options.lp_dump_path);
        if (os) write_lp_file(lp, os);
      }
      std::ostringstream os;
      os << "MPC solve failed at hour " << t << ": status " << to_string(sol.status)
         << " (SOC cw=" << state.e_cw << " hw=" << state.e_hw << ", ul/ol cw=" << state.ul_cw
         << "/" << state.ol_cw << " hw=" << state.ul_hw << "/" << state.ol_hw << ")";
      if (options.lp_dump_path) os << "; LP dumped to " << *options.lp_dump_path;
      throw SimulationError(os.str(), t);
    }
    const ControlAction action = extract_first_action(lp, sol);
    const StepResult step = plant_step(state, action, series.realized(t), cfg);

    const double e_cw_next = snap(step.e_next_cw, 0.0, cfg.e_cw_cap);
    const double e_hw_next = snap(step.e_next_hw, 0.0, cfg.e_hw_cap);
    const BackoffUpdate up_cw = apply_backoff_update(e_cw_next, backoff.cw, cfg.e_cw_cap);
    const BackoffUpdate up_hw = apply_backoff_update(e_hw_next, backoff.hw, cfg.e_hw_cap);

    // committed first-hour slacks pay carried debt down; violations add to it
    const double ul_cw = std::max(0.0, state.ul_cw - action.s_un_cw) + up_cw.ul_add;
    const double ol_cw = std::max(0.0, state.ol_cw - action.s_ov_cw) + up_cw.ol_add;
    const double ul_hw = std::max(0.0, state.ul_hw - action.s_un_hw) + up_hw.ul_add;
    const double ol_hw = std::max(0.0, state.ol_hw - action.s_ov_hw) + up_hw.ol_add;

    const double cost_slack = cfg.rho_cw * (ul_cw + ol_cw) + cfg.rho_hw * (ul_hw + ol_hw);

    double cost_demand_hour = 0.0;
    const double peak = std::max(state.peak_kw, step.r_e);
    const bool month_end = (t + 1) % cfg.month_hours == 0;
    const bool sim_end = t + 1 == span_hours;
    if (month_end || sim_end) {
      // the accrued peak of an open month is charged in full at the end of
      // the simulated span
      cost_demand_hour = cfg.price_demand * peak;
    }

    if (up_cw.ul_add > 0) res.violations.push_back({t, 'c', 'd', up_cw.ul_add});
    if (up_cw.ol_add > 0) res.violations.push_back({t, 'c', 'o', up_cw.ol_add});
    if (up_hw.ul_add > 0) res.violations.push_back({t, 'h', 'd', up_hw.ul_add});
    if (up_hw.ol_add > 0) res.violations.push_back({t, 'h', 'o', up_hw.ol_add});

    HourRecord rec;
    rec.hour = t;
    rec.soc_cw = up_cw.soc;
    rec.soc_hw = up_hw.soc;
    rec.r_e = step.r_e;
    rec.r_w = step.r_w;
    rec.r_ng = step.r_ng;
    rec.price_e = series.realized(t).price_e;
    rec.cost_elec = step.cost_elec;
    rec.cost_water = step.cost_water;
    rec.cost_gas = step.cost_gas;
    rec.cost_demand = cost_demand_hour;
    rec.cost_slack = cost_slack;
    rec.ul_cw = ul_cw;
    rec.ul_hw = ul_hw;
    rec.ol_cw = ol_cw;
    rec.ol_hw = ol_hw;
    rec.peak_kw = peak;
    rec.lp_iterations = sol.iterations;
    res.hourly.push_back(rec);

    res.cost_electricity += step.cost_elec;
    res.cost_water += step.cost_water;
    res.cost_gas += step.cost_gas;
    res.cost_demand += cost_demand_hour;
    res.cost_slack_penalty += cost_slack;
    res.weekly_costs[t / 168] +=
        step.cost_elec + step.cost_water + step.cost_gas + cost_demand_hour + cost_slack;

    state.e_cw = up_cw.soc;
    state.e_hw = up_hw.soc;
    state.ul_cw = ul_cw;
    state.ol_cw = ol_cw;
    state.ul_hw = ul_hw;
    state.ol_hw = ol_hw;
    state.peak_kw = month_end ? 0.0 : peak;
    state.hour = t + 1;
  }

  res.total_cost = res.cost_electricity + res.cost_demand + res.cost_water + res.cost_gas +
                   res.cost_slack_penalty;
  return res;
}

}  // namespace mpctune
