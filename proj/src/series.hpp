#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plant.hpp"

namespace mpctune {

struct HourData {
  double load_e = 0.0;
  double load_cw = 0.0;
  double load_hw = 0.0;
  double price_e = 0.0;
};

// Realized hourly disturbances plus the forecast series the controller sees.
// Forecasts are derived from the realized data so that
// realized = forecast * (1 + eps) holds per hour with seeded noise; with zero
// noise the forecast equals the realization exactly.
class DisturbanceSeries {
 public:
  // CSV columns: hour, L_e, L_cw, L_hw, price_e (header required).
  static DisturbanceSeries from_csv(const std::string& path);

  // In-memory construction; vectors must be equal-length and loads >= 0.
  static DisturbanceSeries from_values(std::vector<double> load_e, std::vector<double> load_cw,
                                       std::vector<double> load_hw, std::vector<double> price_e);

  // Desk-scale synthetic profiles: daily/weekly load and TOU price shapes with
  // seeded jitter. Deterministic for a given (hours, seed).
  static DisturbanceSeries synthetic_desk(long hours, uint64_t seed);

  // (Re)derives the forecast series. Must be called before window().
  void derive_forecasts(double noise_std, uint64_t seed);

  ForecastWindow window(long t, int horizon) const;
  HourData realized(long t) const;
  long hours() const { return static_cast<long>(load_e_.size()); }
  bool has_forecasts() const { return !fc_load_e_.empty(); }

  void write_csv(const std::string& path) const;
  uint64_t content_hash() const;  // realized data only

  const std::vector<double>& load_e() const { return load_e_; }
  const std::vector<double>& load_cw() const { return load_cw_; }
  const std::vector<double>& load_hw() const { return load_hw_; }
  const std::vector<double>& price_e() const { return price_e_; }
  const std::vector<double>& forecast_load_cw() const { return fc_load_cw_; }

 private:
  std::vector<double> load_e_, load_cw_, load_hw_, price_e_;
  std::vector<double> fc_load_e_, fc_load_cw_, fc_load_hw_, fc_price_e_;
};

}  // namespace mpctune
