#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gp.hpp"

namespace mpctune {

// Axis-aligned search box (the tuning domain).
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;
  double diameter() const { return (upper - lower).norm(); }
};

struct BoConfig {
  double kappa = 2.6;
  int n_init = 3;
  int max_iter = 10;
  int restarts = 16;
  uint64_t seed = 0;
  KernelParams kernel;
  double early_stop_rel_tol = 0.0;  // 0 disables early stopping
  void validate() const;
};

struct BoSample {
  Eigen::VectorXd x;    // physical coordinates
  double value = 0.0;
  double best_so_far = 0.0;
  double seconds = 0.0;  // wall time of the objective evaluation (not part of the deterministic trace)
};

struct BoIterationMeta {
  int n_data = 0;          // training set size of the GP fitted this iteration
  double jitter = 0.0;
  Eigen::VectorXd acq_point;  // acquisition minimizer, physical coordinates
  double acq_value = 0.0;
  bool duplicate_guard = false;
};

struct BoTrace {
  Box bounds;
  BoConfig config;
  std::vector<BoSample> samples;       // initial design first, then one per iteration
  std::vector<BoIterationMeta> iterations;
  bool aborted = false;
  std::string abort_reason;

  const BoSample& best() const;
  std::vector<double> best_so_far() const;
};

// Lower confidence bound mu(xi) - kappa * sigma(xi) at a query in unit
// coordinates (the model's native space). De-standardized scale.
double lcb(const GpModel& model, const Eigen::VectorXd& xi_unit, double kappa);

// Minimizes the LCB over the unit box with `restarts` seeded LHS starts plus
// any `extra_starts`, each polished by projected L-BFGS with central
// finite-difference gradients. Returns the best point found (never fails:
// falls back to the best evaluated start).
Eigen::VectorXd minimize_acquisition(const GpModel& model, double kappa, int restarts,
                                     uint64_t seed,
                                     const std::vector<Eigen::VectorXd>& extra_starts = {});

// The black-box tuning objective, called with physical coordinates.
using Objective = std::function<double(const Eigen::VectorXd&)>;

// Full BO loop: LHS initial design, then fit / minimize LCB / evaluate /
// append for max_iter rounds. Deterministic given (config, objective). A
// non-finite objective value aborts and returns the partial trace with
// `aborted` set. `parallel_init` evaluates the initial design on threads;
// the trace is identical either way.
BoTrace run_bo(const Objective& objective, const Box& bounds, const BoConfig& config,
               bool parallel_init = false);

}  // namespace mpctune
