#include "mpctune.h"

#include <cstring>
#include <string>
#include <vector>

#include "bo.hpp"
#include "config.hpp"
#include "emit.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "series.hpp"
#include "sim.hpp"

struct mpctune_config {
  mpctune::AppConfig cfg;
};
struct mpctune_series {
  mpctune::DisturbanceSeries s;
};
struct mpctune_result {
  mpctune::ClosedLoopResult r;
};
struct mpctune_grid {
  mpctune::CostGrid g;
};
struct mpctune_trace {
  mpctune::BoTrace t;
  std::vector<std::string> dim_names;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

int fail(int code, const std::string& msg) {
  set_error(msg);
  return code;
}

// runs fn, translating exceptions to status codes
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const mpctune::ConfigError& e) {
    return fail(MPCTUNE_ERR_CONFIG, e.what());
  } catch (const mpctune::InputError& e) {
    return fail(MPCTUNE_ERR_CONFIG, e.what());
  } catch (const mpctune::DomainError& e) {
    return fail(MPCTUNE_ERR_ARGUMENT, e.what());
  } catch (const mpctune::NumericalError& e) {
    return fail(MPCTUNE_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(MPCTUNE_ERR_NUMERIC, e.what());
  }
}

bool null_arg(const void* p) { return p == nullptr; }

mpctune::BoConfig to_bo_config(const mpctune_bo_options& o) {
  mpctune::BoConfig c;
  c.kappa = o.kappa;
  c.n_init = o.n_init;
  c.max_iter = o.max_iter;
  c.restarts = o.restarts;
  c.seed = o.seed;
  c.kernel.lengthscale = o.lengthscale;
  c.kernel.nu = o.nu;
  c.kernel.noise = o.noise;
  return c;
}

int run_tune(const mpctune::Objective& objective, const mpctune::Box& bounds,
             const mpctune::BoConfig& cfg, std::vector<std::string> dim_names,
             mpctune_trace** out) {
  mpctune::BoTrace trace = mpctune::run_bo(objective, bounds, cfg);
  const bool aborted = trace.aborted;
  auto* handle = new mpctune_trace{std::move(trace), std::move(dim_names)};
  *out = handle;
  if (aborted) return fail(MPCTUNE_ERR_PARTIAL, handle->t.abort_reason);
  return MPCTUNE_OK;
}

}  // namespace

extern "C" {

const char* mpctune_version(void) { return "0.1.0"; }

const char* mpctune_last_error(void) { return g_last_error.c_str(); }

/* --- configuration ------------------------------------------------------ */

int mpctune_config_load(const char* path, mpctune_config** out) {
  if (null_arg(path) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mpctune_config{mpctune::load_config(path)};
    return MPCTUNE_OK;
  });
}

int mpctune_config_default(mpctune_config** out) {
  if (null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::AppConfig cfg;
    cfg.plant = mpctune::desk_plant_config();
    *out = new mpctune_config{cfg};
    return MPCTUNE_OK;
  });
}

int mpctune_config_write(const mpctune_config* cfg, const char* path) {
  if (null_arg(cfg) || null_arg(path)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::write_config(cfg->cfg, path);
    return MPCTUNE_OK;
  });
}

int mpctune_config_set_horizon(mpctune_config* cfg, int hours) {
  if (null_arg(cfg)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  if (hours < 1) return fail(MPCTUNE_ERR_ARGUMENT, "horizon must be >= 1");
  cfg->cfg.plant.horizon = hours;
  return MPCTUNE_OK;
}

int mpctune_config_get_horizon(const mpctune_config* cfg, int* out) {
  if (null_arg(cfg) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = cfg->cfg.plant.horizon;
  return MPCTUNE_OK;
}

int mpctune_config_hash(const mpctune_config* cfg, uint64_t* out) {
  if (null_arg(cfg) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = mpctune::config_hash(cfg->cfg);
  return MPCTUNE_OK;
}

void mpctune_config_free(mpctune_config* cfg) { delete cfg; }

/* --- disturbance series -------------------------------------------------- */

int mpctune_series_load_csv(const char* path, const mpctune_config* cfg, mpctune_series** out) {
  if (null_arg(path) || null_arg(cfg) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = mpctune::DisturbanceSeries::from_csv(path);
    s.derive_forecasts(cfg->cfg.plant.forecast_noise_std, cfg->cfg.plant.forecast_seed);
    *out = new mpctune_series{std::move(s)};
    return MPCTUNE_OK;
  });
}

int mpctune_series_generate(const mpctune_config* cfg, long hours, uint64_t seed,
                            mpctune_series** out) {
  if (null_arg(cfg) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = mpctune::DisturbanceSeries::synthetic_desk(hours, seed);
    s.derive_forecasts(cfg->cfg.plant.forecast_noise_std, cfg->cfg.plant.forecast_seed);
    *out = new mpctune_series{std::move(s)};
    return MPCTUNE_OK;
  });
}

int mpctune_series_write_csv(const mpctune_series* s, const char* path) {
  if (null_arg(s) || null_arg(path)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    s->s.write_csv(path);
    return MPCTUNE_OK;
  });
}

int mpctune_series_hours(const mpctune_series* s, long* out) {
  if (null_arg(s) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = s->s.hours();
  return MPCTUNE_OK;
}

int mpctune_series_hash(const mpctune_series* s, uint64_t* out) {
  if (null_arg(s) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = s->s.content_hash();
  return MPCTUNE_OK;
}

void mpctune_series_free(mpctune_series* s) { delete s; }

/* --- closed-loop simulation ---------------------------------------------- */

int mpctune_simulate(const mpctune_config* cfg, const mpctune_series* s, double beta_cw,
                     double beta_hw, long span_hours, mpctune_result** out) {
  if (null_arg(cfg) || null_arg(s) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const mpctune::BackoffTerms beta{beta_cw, beta_hw};
    *out = new mpctune_result{mpctune::simulate(cfg->cfg.plant, s->s, beta, span_hours)};
    return MPCTUNE_OK;
  });
}

int mpctune_result_total_cost(const mpctune_result* r, double* out) {
  if (null_arg(r) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = r->r.total_cost;
  return MPCTUNE_OK;
}

int mpctune_result_breakdown(const mpctune_result* r, double* electricity, double* demand,
                             double* water, double* gas, double* slack_penalty) {
  if (null_arg(r)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  if (electricity) *electricity = r->r.cost_electricity;
  if (demand) *demand = r->r.cost_demand;
  if (water) *water = r->r.cost_water;
  if (gas) *gas = r->r.cost_gas;
  if (slack_penalty) *slack_penalty = r->r.cost_slack_penalty;
  return MPCTUNE_OK;
}

int mpctune_result_violations(const mpctune_result* r, long* out) {
  if (null_arg(r) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = static_cast<long>(r->r.violations.size());
  return MPCTUNE_OK;
}

int mpctune_result_write(const mpctune_result* r, const char* dir) {
  if (null_arg(r) || null_arg(dir)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::write_result_files(r->r, dir);
    return MPCTUNE_OK;
  });
}

void mpctune_result_free(mpctune_result* r) { delete r; }

/* --- cost grid ------------------------------------------------------------ */

int mpctune_grid_build(const mpctune_config* cfg, const mpctune_series* s, const double* knots_cw,
                       int n_cw, const double* knots_hw, int n_hw, long span_hours, int parallel,
                       mpctune_grid** out) {
  if (null_arg(cfg) || null_arg(s) || null_arg(knots_cw) || null_arg(knots_hw) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  if (n_cw < 2 || n_hw < 2) return fail(MPCTUNE_ERR_ARGUMENT, "need >= 2 knots per dimension");
  return guarded([&]() -> int {
    const std::vector<double> kc(knots_cw, knots_cw + n_cw);
    const std::vector<double> kh(knots_hw, knots_hw + n_hw);
    mpctune::CostGrid g =
        mpctune::grid_evaluate(cfg->cfg.plant, s->s, kc, kh, span_hours, parallel);
    g.config_hash = mpctune::config_hash(cfg->cfg);
    const bool complete = g.complete;
    *out = new mpctune_grid{std::move(g)};
    if (!complete) return fail(MPCTUNE_ERR_PARTIAL, "grid has unevaluated cells");
    return MPCTUNE_OK;
  });
}

int mpctune_grid_save(const mpctune_grid* g, const char* path) {
  if (null_arg(g) || null_arg(path)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::save_grid(g->g, path);
    return MPCTUNE_OK;
  });
}

int mpctune_grid_write_csv(const mpctune_grid* g, const char* path) {
  if (null_arg(g) || null_arg(path)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::write_grid_csv(g->g, path);
    return MPCTUNE_OK;
  });
}

int mpctune_grid_load(const char* path, mpctune_grid** out) {
  if (null_arg(path) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mpctune_grid{mpctune::load_grid(path)};
    return MPCTUNE_OK;
  });
}

int mpctune_grid_check(const mpctune_grid* g, const mpctune_config* cfg,
                       const mpctune_series* s) {
  if (null_arg(g) || null_arg(cfg)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  const uint64_t ch = mpctune::config_hash(cfg->cfg);
  if (g->g.config_hash != ch) {
    return fail(MPCTUNE_ERR_CONFIG, "grid provenance mismatch: built with a different config");
  }
  if (s != nullptr && g->g.series_hash != s->s.content_hash()) {
    return fail(MPCTUNE_ERR_CONFIG, "grid provenance mismatch: built with a different series");
  }
  return MPCTUNE_OK;
}

int mpctune_grid_value(const mpctune_grid* g, double beta_cw, double beta_hw, double* out) {
  if (null_arg(g) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = mpctune::interpolate(g->g, beta_cw, beta_hw);
    return MPCTUNE_OK;
  });
}

int mpctune_grid_min(const mpctune_grid* g, double* beta_cw, double* beta_hw, double* value) {
  if (null_arg(g)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto [bc, bh] = g->g.argmin();
    if (beta_cw) *beta_cw = bc;
    if (beta_hw) *beta_hw = bh;
    if (value) *value = g->g.min_value();
    return MPCTUNE_OK;
  });
}

int mpctune_grid_complete(const mpctune_grid* g, int* out) {
  if (null_arg(g) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = g->g.complete ? 1 : 0;
  return MPCTUNE_OK;
}

void mpctune_grid_free(mpctune_grid* g) { delete g; }

/* --- tuning ---------------------------------------------------------------- */

int mpctune_bo_options_init(const mpctune_config* cfg, mpctune_bo_options* out) {
  if (null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  mpctune::BoSettings s;
  if (cfg != nullptr) s = cfg->cfg.bo;
  out->kappa = s.kappa;
  out->n_init = s.n_init;
  out->max_iter = s.max_iter;
  out->restarts = s.restarts;
  out->seed = s.seed;
  out->lengthscale = s.lengthscale;
  out->nu = s.nu;
  out->noise = s.noise;
  return MPCTUNE_OK;
}

int mpctune_tune_callback(mpctune_objective_fn fn, void* user, const double* lower,
                          const double* upper, int dim, const mpctune_bo_options* opts,
                          mpctune_trace** out) {
  if (null_arg(reinterpret_cast<const void*>(fn)) || null_arg(lower) || null_arg(upper) ||
      null_arg(opts) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  if (dim < 1) return fail(MPCTUNE_ERR_ARGUMENT, "dim must be >= 1");
  return guarded([&] {
    mpctune::Box box;
    box.lower = Eigen::Map<const Eigen::VectorXd>(lower, dim);
    box.upper = Eigen::Map<const Eigen::VectorXd>(upper, dim);
    const mpctune::Objective obj = [&](const Eigen::VectorXd& x) {
      return fn(x.data(), dim, user);
    };
    std::vector<std::string> names;
    for (int i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
    return run_tune(obj, box, to_bo_config(*opts), std::move(names), out);
  });
}

int mpctune_tune_grid(const mpctune_grid* g, const mpctune_bo_options* opts,
                      mpctune_trace** out) {
  if (null_arg(g) || null_arg(opts) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    g->g.validate();
    if (!g->g.complete) throw mpctune::DomainError("cannot tune against an incomplete grid");
    mpctune::Box box;
    box.lower = Eigen::Vector2d(g->g.knots_cw.front(), g->g.knots_hw.front());
    box.upper = Eigen::Vector2d(g->g.knots_cw.back(), g->g.knots_hw.back());
    const mpctune::Objective obj = [&](const Eigen::VectorXd& x) {
      return mpctune::interpolate(g->g, x(0), x(1));
    };
    return run_tune(obj, box, to_bo_config(*opts), {"beta_cw", "beta_hw"}, out);
  });
}

int mpctune_tune_live(const mpctune_config* cfg, const mpctune_series* s, long span_hours,
                      const mpctune_bo_options* opts, mpctune_trace** out) {
  if (null_arg(cfg) || null_arg(s) || null_arg(opts) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::Box box;
    box.lower = Eigen::Vector2d(0.0, 0.0);
    box.upper = Eigen::Vector2d(0.5, 0.5);
    const mpctune::Objective obj = [&](const Eigen::VectorXd& x) {
      const mpctune::BackoffTerms beta{x(0), x(1)};
      return mpctune::simulate(cfg->cfg.plant, s->s, beta, span_hours).total_cost;
    };
    return run_tune(obj, box, to_bo_config(*opts), {"beta_cw", "beta_hw"}, out);
  });
}

int mpctune_tune_synthetic(const char* name, const mpctune_bo_options* opts,
                           mpctune_trace** out) {
  if (null_arg(name) || null_arg(opts) || null_arg(out))
    return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string nm(name);
    if (!mpctune::synthetic_surface_exists(nm)) {
      throw mpctune::ConfigError("unknown synthetic surface '" + nm + "'");
    }
    mpctune::Box box;
    box.lower = Eigen::Vector2d(0.0, 0.0);
    box.upper = Eigen::Vector2d(1.0, 1.0);
    const mpctune::Objective obj = [nm](const Eigen::VectorXd& x) {
      return mpctune::synthetic_surface(nm, x(0), x(1));
    };
    return run_tune(obj, box, to_bo_config(*opts), {"x0", "x1"}, out);
  });
}

int mpctune_trace_size(const mpctune_trace* t, int* out) {
  if (null_arg(t) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = static_cast<int>(t->t.samples.size());
  return MPCTUNE_OK;
}

int mpctune_trace_dim(const mpctune_trace* t, int* out) {
  if (null_arg(t) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = t->t.bounds.dim();
  return MPCTUNE_OK;
}

int mpctune_trace_sample(const mpctune_trace* t, int i, double* x, double* value,
                         double* best_so_far) {
  if (null_arg(t)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  if (i < 0 || i >= static_cast<int>(t->t.samples.size()))
    return fail(MPCTUNE_ERR_ARGUMENT, "sample index out of range");
  const auto& s = t->t.samples[i];
  if (x) {
    for (Eigen::Index k = 0; k < s.x.size(); ++k) x[k] = s.x(k);
  }
  if (value) *value = s.value;
  if (best_so_far) *best_so_far = s.best_so_far;
  return MPCTUNE_OK;
}

int mpctune_trace_best(const mpctune_trace* t, double* x, double* value) {
  if (null_arg(t)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& b = t->t.best();
    if (x) {
      for (Eigen::Index k = 0; k < b.x.size(); ++k) x[k] = b.x(k);
    }
    if (value) *value = b.value;
    return MPCTUNE_OK;
  });
}

int mpctune_trace_aborted(const mpctune_trace* t, int* out) {
  if (null_arg(t) || null_arg(out)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  *out = t->t.aborted ? 1 : 0;
  return MPCTUNE_OK;
}

int mpctune_trace_write(const mpctune_trace* t, const char* dir, int with_gp_snapshots) {
  if (null_arg(t) || null_arg(dir)) return fail(MPCTUNE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    mpctune::write_trace_files(t->t, dir, t->dim_names);
    if (with_gp_snapshots != 0 && !t->t.iterations.empty()) {
      mpctune::write_gp_snapshots_csv(t->t, dir, t->dim_names);
    }
    return MPCTUNE_OK;
  });
}

void mpctune_trace_free(mpctune_trace* t) { delete t; }

}  // extern "C"
