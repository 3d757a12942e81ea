#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sim.hpp"

namespace mpctune {

// Closed-loop cost sampled on a rectangular back-off grid, persisted so the
// expensive sweep runs once and tuning experiments replay from the file.
struct CostGrid {
  std::vector<double> knots_cw;  // strictly increasing, within [0, 0.5]
  std::vector<double> knots_hw;
  Eigen::MatrixXd values;  // values(i, j) = cost at (knots_cw[i], knots_hw[j])
  std::vector<std::pair<int, int>> holes;  // unfilled cells when incomplete
  bool complete = true;

  // provenance
  uint64_t config_hash = 0;
  uint64_t series_hash = 0;
  long span_hours = 0;

  void validate() const;
  double min_value() const;
  std::pair<double, double> argmin() const;  // knot coordinates of the minimum
};

// Runs `simulate` at every knot combination. `parallel` > 1 fans the cells
// out over threads; results are independent of scheduling. A failing cell
// leaves a hole and marks the grid incomplete instead of throwing.
CostGrid grid_evaluate(const PlantConfig& config, const DisturbanceSeries& series,
                       const std::vector<double>& knots_cw, const std::vector<double>& knots_hw,
                       long span_hours, int parallel = 1);

// Bilinear interpolation; exact at knots, DomainError outside the hull.
double interpolate(const CostGrid& grid, double beta_cw, double beta_hw);

// Deterministic 2-D validation surfaces on the unit square:
//   "quadratic"  convex bowl, minimum 1.0 at (0.3, 0.7)
//   "two_minima" global minimum near (0.75, 0.25), shallower local minimum
//                near (0.25, 0.70)
//   "constant"   7.0 everywhere
double synthetic_surface(const std::string& name, double u0, double u1);
bool synthetic_surface_exists(const std::string& name);

void save_grid(const CostGrid& grid, const std::string& path);
CostGrid load_grid(const std::string& path);
void write_grid_csv(const CostGrid& grid, const std::string& path);  // long format

}  // namespace mpctune
