#include <doctest.h>

#include <mpctune.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace {
std::string tmp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

struct ConfigGuard {
  mpctune_config* h = nullptr;
  ~ConfigGuard() { mpctune_config_free(h); }
};
struct SeriesGuard {
  mpctune_series* h = nullptr;
  ~SeriesGuard() { mpctune_series_free(h); }
};
}  // namespace

TEST_CASE("version and null-argument handling") {
  CHECK(std::strlen(mpctune_version()) > 0);
  CHECK(mpctune_config_load(nullptr, nullptr) == MPCTUNE_ERR_ARGUMENT);
  CHECK(std::strlen(mpctune_last_error()) > 0);
  CHECK(mpctune_series_hours(nullptr, nullptr) == MPCTUNE_ERR_ARGUMENT);
  mpctune_config_free(nullptr);  // no-op
  mpctune_trace_free(nullptr);
}

TEST_CASE("config lifecycle") {
  ConfigGuard cfg;
  REQUIRE(mpctune_config_default(&cfg.h) == MPCTUNE_OK);
  int horizon = 0;
  CHECK(mpctune_config_get_horizon(cfg.h, &horizon) == MPCTUNE_OK);
  CHECK(horizon == 48);
  CHECK(mpctune_config_set_horizon(cfg.h, 12) == MPCTUNE_OK);
  CHECK(mpctune_config_set_horizon(cfg.h, 0) == MPCTUNE_ERR_ARGUMENT);

  const auto dir = tmp_dir("mpctune_capi_cfg");
  const std::string path = dir + "/test.cfg";
  REQUIRE(mpctune_config_write(cfg.h, path.c_str()) == MPCTUNE_OK);
  ConfigGuard back;
  REQUIRE(mpctune_config_load(path.c_str(), &back.h) == MPCTUNE_OK);
  uint64_t h1 = 0, h2 = 0;
  mpctune_config_hash(cfg.h, &h1);
  mpctune_config_hash(back.h, &h2);
  CHECK(h1 == h2);

  mpctune_config* bad = nullptr;
  CHECK(mpctune_config_load("/no/such/file.cfg", &bad) == MPCTUNE_ERR_CONFIG);
  CHECK(bad == nullptr);
  std::filesystem::remove_all(dir);
}

TEST_CASE("series, simulate, result accessors and files") {
  ConfigGuard cfg;
  REQUIRE(mpctune_config_default(&cfg.h) == MPCTUNE_OK);
  REQUIRE(mpctune_config_set_horizon(cfg.h, 12) == MPCTUNE_OK);
  SeriesGuard series;
  REQUIRE(mpctune_series_generate(cfg.h, 120, 5, &series.h) == MPCTUNE_OK);
  long hours = 0;
  CHECK(mpctune_series_hours(series.h, &hours) == MPCTUNE_OK);
  CHECK(hours == 120);

  const auto dir = tmp_dir("mpctune_capi_sim");
  const std::string csv = dir + "/series.csv";
  REQUIRE(mpctune_series_write_csv(series.h, csv.c_str()) == MPCTUNE_OK);
  SeriesGuard loaded;
  REQUIRE(mpctune_series_load_csv(csv.c_str(), cfg.h, &loaded.h) == MPCTUNE_OK);
  uint64_t h1 = 0, h2 = 0;
  mpctune_series_hash(series.h, &h1);
  mpctune_series_hash(loaded.h, &h2);
  CHECK(h1 == h2);

  mpctune_result* result = nullptr;
  REQUIRE(mpctune_simulate(cfg.h, series.h, 0.1, 0.1, 72, &result) == MPCTUNE_OK);
  double total = 0, elec = 0, demand = 0, water = 0, gas = 0, slack = 0;
  CHECK(mpctune_result_total_cost(result, &total) == MPCTUNE_OK);
  CHECK(mpctune_result_breakdown(result, &elec, &demand, &water, &gas, &slack) == MPCTUNE_OK);
  CHECK(total == doctest::Approx(elec + demand + water + gas + slack).epsilon(1e-12));
  CHECK(total > 0.0);
  long violations = -1;
  CHECK(mpctune_result_violations(result, &violations) == MPCTUNE_OK);
  CHECK(violations >= 0);
  CHECK(mpctune_result_write(result, dir.c_str()) == MPCTUNE_OK);
  CHECK(std::filesystem::exists(dir + "/result.json"));
  CHECK(std::filesystem::exists(dir + "/hourly.csv"));
  mpctune_result_free(result);

  // beta outside [0, 0.5] is a config error
  mpctune_result* bad = nullptr;
  CHECK(mpctune_simulate(cfg.h, series.h, 0.9, 0.1, 24, &bad) == MPCTUNE_ERR_CONFIG);
  // span beyond the series is rejected
  CHECK(mpctune_simulate(cfg.h, series.h, 0.1, 0.1, 500, &bad) == MPCTUNE_ERR_CONFIG);
  std::filesystem::remove_all(dir);
}

TEST_CASE("grid build, io, provenance and interpolation") {
  ConfigGuard cfg;
  REQUIRE(mpctune_config_default(&cfg.h) == MPCTUNE_OK);
  REQUIRE(mpctune_config_set_horizon(cfg.h, 6) == MPCTUNE_OK);
  SeriesGuard series;
  REQUIRE(mpctune_series_generate(cfg.h, 40, 5, &series.h) == MPCTUNE_OK);

  const double knots[] = {0.0, 0.25, 0.5};
  mpctune_grid* grid = nullptr;
  REQUIRE(mpctune_grid_build(cfg.h, series.h, knots, 3, knots, 3, 12, 1, &grid) == MPCTUNE_OK);
  int complete = 0;
  CHECK(mpctune_grid_complete(grid, &complete) == MPCTUNE_OK);
  CHECK(complete == 1);

  double v_knot = 0;
  CHECK(mpctune_grid_value(grid, 0.25, 0.25, &v_knot) == MPCTUNE_OK);
  double bc = 0, bh = 0, bv = 0;
  CHECK(mpctune_grid_min(grid, &bc, &bh, &bv) == MPCTUNE_OK);
  CHECK(bv <= v_knot);
  double outside = 0;
  CHECK(mpctune_grid_value(grid, 0.6, 0.1, &outside) == MPCTUNE_ERR_ARGUMENT);

  const auto dir = tmp_dir("mpctune_capi_grid");
  const std::string path = dir + "/grid.json";
  REQUIRE(mpctune_grid_save(grid, path.c_str()) == MPCTUNE_OK);
  mpctune_grid* loaded = nullptr;
  REQUIRE(mpctune_grid_load(path.c_str(), &loaded) == MPCTUNE_OK);
  CHECK(mpctune_grid_check(loaded, cfg.h, series.h) == MPCTUNE_OK);

  // a different config must be refused
  ConfigGuard other;
  REQUIRE(mpctune_config_default(&other.h) == MPCTUNE_OK);
  REQUIRE(mpctune_config_set_horizon(other.h, 7) == MPCTUNE_OK);
  CHECK(mpctune_grid_check(loaded, other.h, series.h) == MPCTUNE_ERR_CONFIG);

  mpctune_grid_free(grid);
  mpctune_grid_free(loaded);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tune: callback objective, trace accessors, partial abort") {
  mpctune_bo_options opts;
  REQUIRE(mpctune_bo_options_init(nullptr, &opts) == MPCTUNE_OK);
  CHECK(opts.kappa == doctest::Approx(2.6));
  CHECK(opts.n_init == 3);
  CHECK(opts.max_iter == 10);
  opts.max_iter = 5;
  opts.seed = 4;

  const double lo[2] = {0.0, 0.0};
  const double hi[2] = {1.0, 1.0};

  SUBCASE("quadratic callback") {
    const auto quad = [](const double* x, int, void*) {
      return (x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.6) * (x[1] - 0.6);
    };
    mpctune_trace* trace = nullptr;
    REQUIRE(mpctune_tune_callback(quad, nullptr, lo, hi, 2, &opts, &trace) == MPCTUNE_OK);
    int size = 0, dim = 0, aborted = 1;
    CHECK(mpctune_trace_size(trace, &size) == MPCTUNE_OK);
    CHECK(size == 8);
    CHECK(mpctune_trace_dim(trace, &dim) == MPCTUNE_OK);
    CHECK(dim == 2);
    CHECK(mpctune_trace_aborted(trace, &aborted) == MPCTUNE_OK);
    CHECK(aborted == 0);
    double x[2], value = 0, best = 0;
    CHECK(mpctune_trace_sample(trace, 0, x, &value, &best) == MPCTUNE_OK);
    CHECK(value == best);
    CHECK(mpctune_trace_sample(trace, 99, x, &value, &best) == MPCTUNE_ERR_ARGUMENT);
    CHECK(mpctune_trace_best(trace, x, &value) == MPCTUNE_OK);
    CHECK(value <= 0.25);

    const auto dir = tmp_dir("mpctune_capi_trace");
    CHECK(mpctune_trace_write(trace, dir.c_str(), 1) == MPCTUNE_OK);
    CHECK(std::filesystem::exists(dir + "/trace.json"));
    CHECK(std::filesystem::exists(dir + "/trace.csv"));
    CHECK(std::filesystem::exists(dir + "/gp_snapshots.csv"));
    mpctune_trace_free(trace);
    std::filesystem::remove_all(dir);
  }

  SUBCASE("non-finite objective yields a partial trace") {
    const auto nan_after = [](const double*, int, void* user) {
      int& calls = *static_cast<int*>(user);
      return ++calls > 4 ? std::nan("") : 1.0 * calls;
    };
    int calls = 0;
    mpctune_trace* trace = nullptr;
    CHECK(mpctune_tune_callback(nan_after, &calls, lo, hi, 2, &opts, &trace) ==
          MPCTUNE_ERR_PARTIAL);
    REQUIRE(trace != nullptr);
    int aborted = 0, size = 0;
    mpctune_trace_aborted(trace, &aborted);
    mpctune_trace_size(trace, &size);
    CHECK(aborted == 1);
    CHECK(size == 4);
    mpctune_trace_free(trace);
  }

  SUBCASE("synthetic surfaces by name") {
    mpctune_trace* trace = nullptr;
    REQUIRE(mpctune_tune_synthetic("quadratic", &opts, &trace) == MPCTUNE_OK);
    double x[2], value = 0;
    CHECK(mpctune_trace_best(trace, x, &value) == MPCTUNE_OK);
    CHECK(value >= 1.0);  // documented minimum value
    mpctune_trace_free(trace);
    mpctune_trace* bad = nullptr;
    CHECK(mpctune_tune_synthetic("nope", &opts, &bad) == MPCTUNE_ERR_CONFIG);
  }
}

TEST_CASE("tune against a grid stays inside the knot hull") {
  ConfigGuard cfg;
  REQUIRE(mpctune_config_default(&cfg.h) == MPCTUNE_OK);
  REQUIRE(mpctune_config_set_horizon(cfg.h, 6) == MPCTUNE_OK);
  SeriesGuard series;
  REQUIRE(mpctune_series_generate(cfg.h, 40, 5, &series.h) == MPCTUNE_OK);
  const double knots[] = {0.05, 0.2, 0.45};
  mpctune_grid* grid = nullptr;
  REQUIRE(mpctune_grid_build(cfg.h, series.h, knots, 3, knots, 3, 12, 1, &grid) == MPCTUNE_OK);
  mpctune_bo_options opts;
  mpctune_bo_options_init(cfg.h, &opts);
  opts.max_iter = 4;
  mpctune_trace* trace = nullptr;
  REQUIRE(mpctune_tune_grid(grid, &opts, &trace) == MPCTUNE_OK);
  int size = 0;
  mpctune_trace_size(trace, &size);
  for (int i = 0; i < size; ++i) {
    double x[2], v, b;
    REQUIRE(mpctune_trace_sample(trace, i, x, &v, &b) == MPCTUNE_OK);
    CHECK(x[0] >= 0.05);
    CHECK(x[0] <= 0.45);
    CHECK(x[1] >= 0.05);
    CHECK(x[1] <= 0.45);
  }
  mpctune_trace_free(trace);
  mpctune_grid_free(grid);
}
