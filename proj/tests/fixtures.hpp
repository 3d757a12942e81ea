#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "gp.hpp"
#include "lp.hpp"
#include "plant.hpp"
#include "rng.hpp"
#include "series.hpp"

namespace fixtures {

// Direct evaluation of the GP posterior on the standardized scale, using an
// explicit matrix inverse. Kept independent of GpModel's Cholesky path.
struct GpPosteriorOracle {
  Eigen::MatrixXd x;
  Eigen::VectorXd y_std;
  mpctune::KernelParams params;

  std::pair<double, double> posterior(const Eigen::VectorXd& xi) const {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd k = mpctune::kernel_matrix(x, x, params);
    k.diagonal().array() += params.noise;
    const Eigen::MatrixXd kinv = k.fullPivLu().inverse();
    Eigen::VectorXd kv(n);
    for (int i = 0; i < n; ++i) {
      kv(i) = mpctune::matern((x.row(i).transpose() - xi).norm(), params);
    }
    const double mean = kv.dot(kinv * y_std);
    const double var = 1.0 + params.noise - kv.dot(kinv * kv);
    return {mean, var};
  }
};

// Standardization convention shared with GpModel::fit (population std).
inline std::pair<double, double> standardize_stats(const Eigen::VectorXd& y) {
  if (y.size() == 1) return {0.0, 1.0};
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().mean());
  return {mean, sd > 1e-12 ? sd : 1.0};
}

// Brute-force LP oracle: enumerates all vertices (intersections of n active
// constraints among rows and bounds), filters feasible ones, returns the
// minimum objective. Only for small box-bounded problems.
struct VertexEnumerationResult {
  bool feasible = false;
  double objective = 0.0;
  Eigen::VectorXd x;
};

inline VertexEnumerationResult enumerate_lp_minimum(const mpctune::LpProblem& p,
                                                    double feas_tol = 1e-7) {
  const int n = p.num_vars();
  struct Plane {
    Eigen::RowVectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < p.num_eq(); ++i) planes.push_back({p.a_eq.row(i), p.b_eq(i)});
  const int n_eq = static_cast<int>(planes.size());
  for (int i = 0; i < p.num_ub(); ++i) planes.push_back({p.a_ub.row(i), p.b_ub(i)});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.lb(j))) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
      a(j) = 1.0;
      planes.push_back({a, p.lb(j)});
    }
    if (std::isfinite(p.ub(j))) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
      a(j) = 1.0;
      planes.push_back({a, p.ub(j)});
    }
  }
  const int np = static_cast<int>(planes.size());

  VertexEnumerationResult best;
  const auto feasible = [&](const Eigen::VectorXd& x) {
    for (int i = 0; i < p.num_eq(); ++i) {
      if (std::abs(p.a_eq.row(i).dot(x) - p.b_eq(i)) > feas_tol * (1.0 + std::abs(p.b_eq(i))))
        return false;
    }
    for (int i = 0; i < p.num_ub(); ++i) {
      if (p.a_ub.row(i).dot(x) - p.b_ub(i) > feas_tol * (1.0 + std::abs(p.b_ub(i)))) return false;
    }
    for (int j = 0; j < n; ++j) {
      if (x(j) < p.lb(j) - feas_tol || x(j) > p.ub(j) + feas_tol) return false;
    }
    return true;
  };

  // choose n planes (equalities always active), iterate over combinations
  std::vector<int> pick(n);
  const std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) {
        a.row(i) = planes[pick[i]].a;
        b(i) = planes[pick[i]].b;
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!x.allFinite()) return;
      if (!feasible(x)) return;
      const double obj = p.c.dot(x);
      if (!best.feasible || obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        best.x = x;
      }
      return;
    }
    const int forced = n_eq - depth;  // remaining equality planes that must be taken
    for (int i = start; i < np - (n - depth - 1); ++i) {
      if (i < n_eq && i != depth) continue;  // equalities taken in order, all of them
      if (forced > 0 && i >= n_eq) return;   // cannot skip an equality
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (n_eq <= n) rec(0, 0);
  return best;
}

// Random box-bounded LP with ub rows; roughly 75% feasible by construction.
inline mpctune::LpProblem random_lp(uint64_t seed) {
  mpctune::Rng rng(seed);
  const int n = 2 + static_cast<int>(rng.integer(5));  // 2..6
  const int m = 1 + static_cast<int>(rng.integer(8));  // 1..8
  mpctune::LpProblem p;
  p.c.resize(n);
  for (int j = 0; j < n; ++j) p.c(j) = rng.uniform(-2.0, 2.0);
  p.a_ub.resize(m, n);
  p.b_ub.resize(m);
  p.lb.resize(n);
  p.ub.resize(n);
  for (int j = 0; j < n; ++j) {
    const double lo = rng.uniform(-3.0, 0.0);
    p.lb(j) = lo;
    p.ub(j) = lo + rng.uniform(0.5, 5.0);
  }
  Eigen::VectorXd interior(n);
  for (int j = 0; j < n; ++j) interior(j) = p.lb(j) + rng.uniform(0.2, 0.8) * (p.ub(j) - p.lb(j));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.a_ub(i, j) = rng.uniform(-1.0, 1.0);
    const double ax = p.a_ub.row(i).dot(interior);
    if (rng.uniform() < 0.75) {
      p.b_ub(i) = ax + rng.uniform(0.0, 2.0);  // keeps `interior` feasible
    } else {
      p.b_ub(i) = ax - rng.uniform(0.5, 3.0);  // may cut the box away entirely
    }
  }
  return p;
}

// Desk-scale fixture tuned so that the acceptance-suite grid sweep stays
// affordable on one core: shorter horizon, weekly billing with the demand
// rate scaled to the billing period (4.5 $/kW-month ~ 1.0 $/kW-week).
inline mpctune::PlantConfig desk_test_config(int horizon = 24) {
  mpctune::PlantConfig c = mpctune::desk_plant_config();
  c.horizon = horizon;
  c.month_hours = 168;
  c.price_demand = 1.0;
  return c;
}

inline mpctune::DisturbanceSeries desk_series(long hours, double noise_std, uint64_t noise_seed,
                                              uint64_t profile_seed = 11) {
  auto s = mpctune::DisturbanceSeries::synthetic_desk(hours, profile_seed);
  s.derive_forecasts(noise_std, noise_seed);
  return s;
}

// Flat series for hand-checkable scenarios (forecasts exact).
inline mpctune::DisturbanceSeries flat_series(long hours, double le, double lcw, double lhw,
                                              double price) {
  std::vector<double> e(hours, le), cw(hours, lcw), hw(hours, lhw), pe(hours, price);
  auto s = mpctune::DisturbanceSeries::from_values(std::move(e), std::move(cw), std::move(hw),
                                                   std::move(pe));
  s.derive_forecasts(0.0, 0);
  return s;
}

}  // namespace fixtures
