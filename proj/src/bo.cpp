#include "bo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <limits>

#include "lhs.hpp"
#include "rng.hpp"

namespace mpctune {

namespace {

constexpr double kFdStep = 1e-6;        // central-difference step, unit coordinates
constexpr double kDuplicateTol = 1e-9;  // unit-coordinate duplicate guard

Eigen::VectorXd clamp_unit(Eigen::VectorXd u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::clamp(u(i), 0.0, 1.0);
  return u;
}

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    p(i) = xi + kFdStep;
    const double fp = f(p);
    p(i) = xi - kFdStep;
    const double fm = f(p);
    p(i) = xi;
    g(i) = (fp - fm) / (2.0 * kFdStep);
  }
  return g;
}

// Projected L-BFGS on the unit box with Armijo backtracking. Small and
// deterministic; the acquisition surface is cheap so gradients are numeric.
struct LbfgsResult {
  Eigen::VectorXd x;
  double fx;
};

LbfgsResult lbfgs_box_min(const ScalarFn& f, const Eigen::VectorXd& x0, int max_iter = 100) {
  const int mem = 6;
  Eigen::VectorXd x = clamp_unit(x0);
  double fx = f(x);
  Eigen::VectorXd g = fd_gradient(f, x);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  for (int it = 0; it < max_iter; ++it) {
    if ((x - clamp_unit(x - g)).norm() <= 1e-10) break;  // projected-gradient stationarity

    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      alpha[i] = rho * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const auto& sb = s_hist.back();
      const auto& yb = y_hist.back();
      q *= sb.dot(yb) / yb.dot(yb);
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      const double beta = rho * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(g) > -1e-14) dir = -g;  // keep a descent direction

    double step = 1.0;
    Eigen::VectorXd xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = clamp_unit(x + step * dir);
      const Eigen::VectorXd dx = xn - x;
      if (dx.norm() < 1e-14) break;
      fn = f(xn);
      if (fn <= fx + 1e-4 * g.dot(dx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::VectorXd gn = fd_gradient(f, xn);
    const Eigen::VectorXd sv = xn - x;
    const Eigen::VectorXd yv = gn - g;
    if (sv.dot(yv) > 1e-12) {
      s_hist.push_back(sv);
      y_hist.push_back(yv);
      if (static_cast<int>(s_hist.size()) > mem) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  return {x, fx};
}

struct Candidate {
  Eigen::VectorXd x;
  double value;
};

// All polished minimizers plus raw starts, sorted by acquisition value
// (ties by insertion order, so results are deterministic).
std::vector<Candidate> acquisition_candidates(const GpModel& model, double kappa, int restarts,
                                              uint64_t seed,
                                              const std::vector<Eigen::VectorXd>& extra_starts) {
  const ScalarFn f = [&](const Eigen::VectorXd& u) { return lcb(model, u, kappa); };
  std::vector<Eigen::VectorXd> starts;
  const Eigen::MatrixXd base = latin_hypercube(restarts, model.dim(), seed);
  starts.reserve(restarts + extra_starts.size());
  for (int i = 0; i < restarts; ++i) starts.push_back(base.row(i).transpose());
  for (const auto& e : extra_starts) starts.push_back(clamp_unit(e));

  std::vector<Candidate> out;
  out.reserve(2 * starts.size());
  for (const auto& s0 : starts) {
    out.push_back({s0, f(s0)});
    const LbfgsResult r = lbfgs_box_min(f, s0);
    out.push_back({r.x, r.fx});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  return out;
}

}  // namespace

void Box::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw InputError("Box: empty or mismatched bounds");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) throw InputError("Box: lower must be < upper per dimension");
    if (!std::isfinite(lower(i)) || !std::isfinite(upper(i)))
      throw InputError("Box: bounds must be finite");
  }
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
  }
  return true;
}

Eigen::VectorXd Box::to_unit(const Eigen::VectorXd& x) const {
  return (x - lower).cwiseQuotient(upper - lower);
}

Eigen::VectorXd Box::from_unit(const Eigen::VectorXd& u) const {
  return lower + u.cwiseProduct(upper - lower);
}

void BoConfig::validate() const {
  if (!(kappa >= 0.0)) throw ConfigError("BO kappa must be >= 0");
  if (n_init < 1) throw ConfigError("BO n_init must be >= 1");
  if (max_iter < 1) throw ConfigError("BO max_iter must be >= 1");
  if (restarts < 1) throw ConfigError("BO restarts must be >= 1");
  if (!(early_stop_rel_tol >= 0.0)) throw ConfigError("BO early_stop_rel_tol must be >= 0");
  kernel.validate();
}

const BoSample& BoTrace::best() const {
  if (samples.empty()) throw InputError("BoTrace::best: empty trace");
  size_t bi = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].value < samples[bi].value) bi = i;
  }
  return samples[bi];
}

std::vector<double> BoTrace::best_so_far() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.best_so_far);
  return out;
}

double lcb(const GpModel& model, const Eigen::VectorXd& xi_unit, double kappa) {
  const auto p = model.posterior(xi_unit);
  return p.mean - kappa * std::sqrt(p.variance);
}

Eigen::VectorXd minimize_acquisition(const GpModel& model, double kappa, int restarts,
                                     uint64_t seed,
                                     const std::vector<Eigen::VectorXd>& extra_starts) {
  if (restarts < 1) throw InputError("minimize_acquisition: restarts must be >= 1");
  return acquisition_candidates(model, kappa, restarts, seed, extra_starts).front().x;
}

BoTrace run_bo(const Objective& objective, const Box& bounds, const BoConfig& config,
               bool parallel_init) {
  bounds.validate();
  config.validate();
  const int d = bounds.dim();

  BoTrace trace;
  trace.bounds = bounds;
  trace.config = config;

  Eigen::MatrixXd x_unit(config.n_init + config.max_iter, d);
  Eigen::VectorXd y(config.n_init + config.max_iter);
  int n = 0;
  double best = std::numeric_limits<double>::infinity();
  int best_idx = 0;

  const auto eval_physical = [&](const Eigen::VectorXd& unit) {
    const auto t0 = std::chrono::steady_clock::now();
    const double v = objective(bounds.from_unit(unit));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::pair<double, double>(v, secs);
  };

  const auto append = [&](const Eigen::VectorXd& unit, double value, double secs) {
    x_unit.row(n) = unit.transpose();
    y(n) = value;
    if (value < best) {
      best = value;
      best_idx = n;
    }
    ++n;
    trace.samples.push_back({bounds.from_unit(unit), value, best, secs});
  };

  // initial design
  const Eigen::MatrixXd init = latin_hypercube(config.n_init, d, derive_seed(config.seed, 0));
  std::vector<std::pair<double, double>> init_vals(config.n_init);
  if (parallel_init && config.n_init > 1) {
    std::vector<std::future<std::pair<double, double>>> futs;
    futs.reserve(config.n_init);
    for (int i = 0; i < config.n_init; ++i) {
      futs.push_back(std::async(std::launch::async, eval_physical,
                                Eigen::VectorXd(init.row(i).transpose())));
    }
    for (int i = 0; i < config.n_init; ++i) init_vals[i] = futs[i].get();
  } else {
    for (int i = 0; i < config.n_init; ++i) init_vals[i] = eval_physical(init.row(i).transpose());
  }
  for (int i = 0; i < config.n_init; ++i) {
    if (!std::isfinite(init_vals[i].first)) {
      trace.aborted = true;
      trace.abort_reason = "objective returned a non-finite value in the initial design";
      for (int j = 0; j < i; ++j) {
        append(init.row(j).transpose(), init_vals[j].first, init_vals[j].second);
      }
      return trace;
    }
  }
  for (int i = 0; i < config.n_init; ++i) {
    append(init.row(i).transpose(), init_vals[i].first, init_vals[i].second);
  }

  for (int iter = 0; iter < config.max_iter; ++iter) {
    const GpModel model = GpModel::fit(x_unit.topRows(n), y.head(n), config.kernel);
    const Eigen::VectorXd incumbent = x_unit.row(best_idx).transpose();
    const uint64_t iter_seed = derive_seed(config.seed, 1000 + static_cast<uint64_t>(iter));
    const auto candidates =
        acquisition_candidates(model, config.kappa, config.restarts, iter_seed, {incumbent});

    const auto is_duplicate = [&](const Eigen::VectorXd& u) {
      for (int i = 0; i < n; ++i) {
        if ((x_unit.row(i).transpose() - u).norm() < kDuplicateTol) return true;
      }
      return false;
    };

    Eigen::VectorXd next = candidates.front().x;
    double next_acq = candidates.front().value;
    bool guarded = false;
    if (is_duplicate(next)) {
      guarded = true;
      bool found = false;
      for (const auto& c : candidates) {
        if (!is_duplicate(c.x)) {
          next = c.x;
          next_acq = c.value;
          found = true;
          break;
        }
      }
      if (!found) {
        // pathological: every candidate coincides with a sample; take the
        // unit point farthest from the data among a fresh LHS batch
        const Eigen::MatrixXd fresh =
            latin_hypercube(std::max(config.restarts, 8), d, derive_seed(config.seed, 5000 + iter));
        double best_dist = -1.0;
        for (Eigen::Index i = 0; i < fresh.rows(); ++i) {
          double dmin = std::numeric_limits<double>::infinity();
          for (int j = 0; j < n; ++j) {
            dmin = std::min(dmin, (x_unit.row(j) - fresh.row(i)).norm());
          }
          if (dmin > best_dist) {
            best_dist = dmin;
            next = fresh.row(i).transpose();
          }
        }
        next_acq = lcb(model, next, config.kappa);
      }
    }

    trace.iterations.push_back(
        {n, model.jitter(), bounds.from_unit(next), next_acq, guarded});

    const auto [value, secs] = eval_physical(next);
    if (!std::isfinite(value)) {
      trace.aborted = true;
      trace.abort_reason = "objective returned a non-finite value at iteration " +
                           std::to_string(iter);
      return trace;
    }
    const double prev_best = best;
    append(next, value, secs);

    if (config.early_stop_rel_tol > 0.0 && iter + 1 < config.max_iter) {
      const double improvement = prev_best - best;
      if (improvement < config.early_stop_rel_tol * std::abs(prev_best)) break;
    }
  }
  return trace;
}

}  // namespace mpctune
