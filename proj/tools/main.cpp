// mpctune command-line tool. Talks to the core exclusively through the
// public C API; everything here is flag parsing, file orchestration and the
// run manifest.

#include <mpctune.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPartial = 4;

int exit_code_for(int status) {
  switch (status) {
    case MPCTUNE_OK: return kExitOk;
    case MPCTUNE_ERR_ARGUMENT:
    case MPCTUNE_ERR_CONFIG: return kExitConfig;
    case MPCTUNE_ERR_PARTIAL: return kExitPartial;
    default: return kExitNumeric;
  }
}

[[noreturn]] void die(int status, const std::string& context) {
  std::fprintf(stderr, "mpctune: %s: %s\n", context.c_str(), mpctune_last_error());
  std::exit(exit_code_for(status));
}

// RAII wrappers around the C handles
template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  operator T*() const { return ptr; }
};
using ConfigHandle = Handle<mpctune_config, mpctune_config_free>;
using SeriesHandle = Handle<mpctune_series, mpctune_series_free>;
using ResultHandle = Handle<mpctune_result, mpctune_result_free>;
using GridHandle = Handle<mpctune_grid, mpctune_grid_free>;
using TraceHandle = Handle<mpctune_trace, mpctune_trace_free>;

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      std::fprintf(stderr, "mpctune: invalid %s entry '%s'\n", what.c_str(), item.c_str());
      std::exit(kExitConfig);
    }
  }
  if (out.empty()) {
    std::fprintf(stderr, "mpctune: empty %s list\n", what.c_str());
    std::exit(kExitConfig);
  }
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string series_path;
  std::string out_dir;
  long span_hours = 672;
  int parallel = 1;
  bool force = false;
};

// one manifest per run; reruns with identical parameter sets reproduce
// identical data files
void write_manifest(const std::string& out_dir, const std::string& command,
                    nlohmann::json params, const std::string& started,
                    const std::vector<std::string>& outputs) {
  params["command"] = command;
  params["version"] = mpctune_version();
  params["started"] = started;
  params["finished"] = iso_now();
  params["out_dir"] = out_dir;
  params["outputs"] = outputs;
  std::filesystem::create_directories(out_dir);
  std::ofstream os(std::filesystem::path(out_dir) / "manifest.json");
  os << params.dump(2) << "\n";
}

nlohmann::json provenance_json(const mpctune_config* cfg, const mpctune_series* series,
                               const CommonArgs& args) {
  nlohmann::json j;
  if (cfg != nullptr) {
    uint64_t h = 0;
    mpctune_config_hash(cfg, &h);
    j["config_path"] = args.config_path;
    j["config_hash"] = h;
  }
  if (series != nullptr) {
    uint64_t h = 0;
    mpctune_series_hash(series, &h);
    j["series_path"] = args.series_path;
    j["series_hash"] = h;
  }
  return j;
}

int cmd_simulate(const CommonArgs& args, const std::string& beta_text) {
  const std::string started = iso_now();
  const auto beta = parse_list(beta_text, "--beta");
  if (beta.size() != 2) {
    std::fprintf(stderr, "mpctune: --beta expects two comma-separated values\n");
    return kExitConfig;
  }
  ConfigHandle cfg;
  if (int rc = mpctune_config_load(args.config_path.c_str(), cfg.out()); rc != MPCTUNE_OK)
    die(rc, "loading config");
  SeriesHandle series;
  if (int rc = mpctune_series_load_csv(args.series_path.c_str(), cfg, series.out());
      rc != MPCTUNE_OK)
    die(rc, "loading series");

  ResultHandle result;
  if (int rc = mpctune_simulate(cfg, series, beta[0], beta[1], args.span_hours, result.out());
      rc != MPCTUNE_OK)
    die(rc, "simulating");
  if (int rc = mpctune_result_write(result, args.out_dir.c_str()); rc != MPCTUNE_OK)
    die(rc, "writing result files");

  double total = 0, elec = 0, demand = 0, water = 0, gas = 0, slack = 0;
  long violations = 0;
  mpctune_result_total_cost(result, &total);
  mpctune_result_breakdown(result, &elec, &demand, &water, &gas, &slack);
  mpctune_result_violations(result, &violations);
  std::printf("simulated %ld h at beta=(%g, %g): total $%.2f "
              "(elec %.2f, demand %.2f, water %.2f, gas %.2f, slack %.2f), %ld violations\n",
              args.span_hours, beta[0], beta[1], total, elec, demand, water, gas, slack,
              violations);

  nlohmann::json params = provenance_json(cfg, series, args);
  params["beta"] = beta;
  params["span_hours"] = args.span_hours;
  write_manifest(args.out_dir, "simulate", params, started,
                 {"result.json", "hourly.csv", "weekly.csv", "violations.csv"});
  return kExitOk;
}

int cmd_grid(const CommonArgs& args, const std::string& knots_text) {
  const std::string started = iso_now();
  std::vector<double> knots_cw, knots_hw;
  const auto semi = knots_text.find(';');
  if (semi == std::string::npos) {
    knots_cw = parse_list(knots_text, "--knots");
    knots_hw = knots_cw;
  } else {
    knots_cw = parse_list(knots_text.substr(0, semi), "--knots");
    knots_hw = parse_list(knots_text.substr(semi + 1), "--knots");
  }

  ConfigHandle cfg;
  if (int rc = mpctune_config_load(args.config_path.c_str(), cfg.out()); rc != MPCTUNE_OK)
    die(rc, "loading config");
  SeriesHandle series;
  if (int rc = mpctune_series_load_csv(args.series_path.c_str(), cfg, series.out());
      rc != MPCTUNE_OK)
    die(rc, "loading series");

  const auto grid_path = std::filesystem::path(args.out_dir) / "grid.json";

  // cache: an existing grid with matching provenance short-circuits the sweep
  if (!args.force && std::filesystem::exists(grid_path)) {
    GridHandle cached;
    if (mpctune_grid_load(grid_path.string().c_str(), cached.out()) == MPCTUNE_OK &&
        mpctune_grid_check(cached, cfg, series) == MPCTUNE_OK) {
      int complete = 0;
      mpctune_grid_complete(cached, &complete);
      if (complete != 0) {
        std::printf("grid cache hit: %s matches the active config/series (use --force to rebuild)\n",
                    grid_path.string().c_str());
        nlohmann::json params = provenance_json(cfg, series, args);
        params["knots_cw"] = knots_cw;
        params["knots_hw"] = knots_hw;
        params["span_hours"] = args.span_hours;
        params["cached"] = true;
        write_manifest(args.out_dir, "grid", params, started, {"grid.json", "grid.csv"});
        return kExitOk;
      }
    }
  }

  GridHandle grid;
  const int rc = mpctune_grid_build(cfg, series, knots_cw.data(),
                                    static_cast<int>(knots_cw.size()), knots_hw.data(),
                                    static_cast<int>(knots_hw.size()), args.span_hours,
                                    args.parallel, grid.out());
  if (rc != MPCTUNE_OK && rc != MPCTUNE_ERR_PARTIAL) die(rc, "building grid");
  std::filesystem::create_directories(args.out_dir);
  if (int wrc = mpctune_grid_save(grid, grid_path.string().c_str()); wrc != MPCTUNE_OK)
    die(wrc, "writing grid.json");
  const auto csv_path = std::filesystem::path(args.out_dir) / "grid.csv";
  if (int wrc = mpctune_grid_write_csv(grid, csv_path.string().c_str()); wrc != MPCTUNE_OK)
    die(wrc, "writing grid.csv");

  nlohmann::json params = provenance_json(cfg, series, args);
  params["knots_cw"] = knots_cw;
  params["knots_hw"] = knots_hw;
  params["span_hours"] = args.span_hours;
  params["parallel"] = args.parallel;
  params["cached"] = false;
  params["complete"] = rc == MPCTUNE_OK;
  write_manifest(args.out_dir, "grid", params, started, {"grid.json", "grid.csv"});

  if (rc == MPCTUNE_ERR_PARTIAL) {
    std::fprintf(stderr, "mpctune: grid is PARTIAL (some simulations failed); "
                         "grid.json is marked incomplete\n");
    return kExitPartial;
  }
  double bc = 0, bh = 0, bv = 0;
  mpctune_grid_min(grid, &bc, &bh, &bv);
  std::printf("grid complete: %zu x %zu cells, minimum $%.2f at beta=(%g, %g)\n",
              knots_cw.size(), knots_hw.size(), bv, bc, bh);
  return kExitOk;
}

struct TuneArgs {
  std::string objective = "live";
  double kappa = -1.0;  // negative -> take from config
  int init = -1;
  int iters = -1;
  int restarts = -1;
  long long seed = -1;
};

int cmd_tune(const CommonArgs& args, const TuneArgs& targs) {
  const std::string started = iso_now();

  ConfigHandle cfg;
  if (!args.config_path.empty()) {
    if (int rc = mpctune_config_load(args.config_path.c_str(), cfg.out()); rc != MPCTUNE_OK)
      die(rc, "loading config");
  } else if (int rc = mpctune_config_default(cfg.out()); rc != MPCTUNE_OK) {
    die(rc, "building default config");
  }

  mpctune_bo_options opts;
  mpctune_bo_options_init(cfg, &opts);
  if (targs.kappa >= 0.0) opts.kappa = targs.kappa;
  if (targs.init > 0) opts.n_init = targs.init;
  if (targs.iters > 0) opts.max_iter = targs.iters;
  if (targs.restarts > 0) opts.restarts = targs.restarts;
  if (targs.seed >= 0) opts.seed = static_cast<uint64_t>(targs.seed);

  SeriesHandle series;
  GridHandle grid;
  TraceHandle trace;
  int rc = MPCTUNE_OK;
  nlohmann::json extra;

  if (targs.objective == "live") {
    if (args.series_path.empty()) {
      std::fprintf(stderr, "mpctune: --objective live requires --series\n");
      return kExitConfig;
    }
    if (int src = mpctune_series_load_csv(args.series_path.c_str(), cfg, series.out());
        src != MPCTUNE_OK)
      die(src, "loading series");
    rc = mpctune_tune_live(cfg, series, args.span_hours, &opts, trace.out());
    extra["span_hours"] = args.span_hours;
  } else if (targs.objective.rfind("grid:", 0) == 0) {
    const std::string path = targs.objective.substr(5);
    if (int grc = mpctune_grid_load(path.c_str(), grid.out()); grc != MPCTUNE_OK)
      die(grc, "loading grid");
    if (!args.series_path.empty()) {
      if (int src = mpctune_series_load_csv(args.series_path.c_str(), cfg, series.out());
          src != MPCTUNE_OK)
        die(src, "loading series");
    }
    if (!args.config_path.empty() || series.ptr != nullptr) {
      if (!args.force) {
        if (int crc = mpctune_grid_check(grid, cfg, series); crc != MPCTUNE_OK)
          die(crc, "checking grid provenance (pass --force to override)");
      }
    }
    rc = mpctune_tune_grid(grid, &opts, trace.out());
    extra["grid_file"] = path;
  } else if (targs.objective.rfind("synthetic:", 0) == 0) {
    const std::string name = targs.objective.substr(10);
    rc = mpctune_tune_synthetic(name.c_str(), &opts, trace.out());
    extra["surface"] = name;
  } else {
    std::fprintf(stderr, "mpctune: --objective must be live, grid:<file> or synthetic:<name>\n");
    return kExitConfig;
  }

  if (rc != MPCTUNE_OK && rc != MPCTUNE_ERR_PARTIAL) die(rc, "tuning");
  const bool partial = rc == MPCTUNE_ERR_PARTIAL;
  if (partial) {
    std::fprintf(stderr, "mpctune: objective failed mid-run; writing the partial trace\n");
  }

  // GP snapshots need at least one completed iteration
  if (int wrc = mpctune_trace_write(trace, args.out_dir.c_str(), partial ? 0 : 1);
      wrc != MPCTUNE_OK)
    die(wrc, "writing trace files");

  nlohmann::json params = provenance_json(cfg, series, args);
  params["objective"] = targs.objective;
  params["bo"] = {
      {"kappa", opts.kappa},       {"n_init", opts.n_init},   {"max_iter", opts.max_iter},
      {"restarts", opts.restarts}, {"seed", opts.seed},       {"lengthscale", opts.lengthscale},
      {"nu", opts.nu},             {"noise", opts.noise},
  };
  for (auto& [k, v] : extra.items()) params[k] = v;
  params["partial"] = partial;
  write_manifest(args.out_dir, "tune", params, started,
                 partial ? std::vector<std::string>{"trace.json", "trace.csv"}
                         : std::vector<std::string>{"trace.json", "trace.csv", "gp_snapshots.csv"});

  if (!partial) {
    int dim = 0, size = 0;
    mpctune_trace_dim(trace, &dim);
    mpctune_trace_size(trace, &size);
    std::vector<double> x(dim, 0.0);
    double best = 0;
    mpctune_trace_best(trace, x.data(), &best);
    std::printf("tuning done: %d evaluations, best %.6g at (", size, best);
    for (int i = 0; i < dim; ++i) std::printf("%s%g", i ? ", " : "", x[i]);
    std::printf(")\n");
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_gen_series(const CommonArgs& args, long hours, long long seed) {
  const std::string started = iso_now();
  ConfigHandle cfg;
  if (!args.config_path.empty()) {
    if (int rc = mpctune_config_load(args.config_path.c_str(), cfg.out()); rc != MPCTUNE_OK)
      die(rc, "loading config");
  } else if (int rc = mpctune_config_default(cfg.out()); rc != MPCTUNE_OK) {
    die(rc, "building default config");
  }
  SeriesHandle series;
  if (int rc = mpctune_series_generate(cfg, hours, static_cast<uint64_t>(seed), series.out());
      rc != MPCTUNE_OK)
    die(rc, "generating series");
  std::filesystem::create_directories(args.out_dir);
  const auto path = std::filesystem::path(args.out_dir) / "series.csv";
  if (int rc = mpctune_series_write_csv(series, path.string().c_str()); rc != MPCTUNE_OK)
    die(rc, "writing series");
  std::printf("wrote %ld hours to %s\n", hours, path.string().c_str());

  nlohmann::json params = provenance_json(cfg, series, args);
  params["hours"] = hours;
  params["seed"] = seed;
  write_manifest(args.out_dir, "gen-series", params, started, {"series.csv"});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop MPC back-off tuning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mpctune_version()));

  CommonArgs common;
  std::string beta_text = "0.1,0.1";
  std::string knots_text;
  TuneArgs targs;
  long gen_hours = 672 + 48;
  long long gen_seed = 11;

  auto add_common = [&](CLI::App* sub, bool need_config, bool need_series) {
    auto* c = sub->add_option("--config", common.config_path, "plant config file");
    if (need_config) c->required();
    auto* s = sub->add_option("--series", common.series_path, "disturbance series CSV");
    if (need_series) s->required();
    sub->add_option("--out", common.out_dir, "output directory")->required();
    sub->add_option("--span-hours", common.span_hours, "simulated hours");
  };

  auto* sim = app.add_subcommand("simulate", "run one closed-loop simulation");
  add_common(sim, true, true);
  sim->add_option("--beta", beta_text, "back-off fractions beta_cw,beta_hw");

  auto* grid = app.add_subcommand("grid", "sweep a back-off grid of simulations");
  add_common(grid, true, true);
  grid->add_option("--knots", knots_text, "knot list(s), e.g. '0,0.125,0.25;0,0.25,0.5'")
      ->required();
  grid->add_option("--parallel", common.parallel, "worker threads for the sweep");
  grid->add_flag("--force", common.force, "rebuild even if a matching grid.json exists");

  auto* tune = app.add_subcommand("tune", "tune the back-off terms");
  add_common(tune, false, false);
  tune->add_option("--objective", targs.objective, "live | grid:<file> | synthetic:<name>");
  tune->add_option("--kappa", targs.kappa, "confidence-bound weight");
  tune->add_option("--init", targs.init, "initial design size");
  tune->add_option("--iters", targs.iters, "adaptive iterations");
  tune->add_option("--restarts", targs.restarts, "acquisition restarts");
  tune->add_option("--seed", targs.seed, "random seed");
  tune->add_flag("--force", common.force, "skip grid provenance checks");

  auto* gen = app.add_subcommand("gen-series", "write a synthetic disturbance series CSV");
  gen->add_option("--config", common.config_path, "plant config file");
  gen->add_option("--out", common.out_dir, "output directory")->required();
  gen->add_option("--hours", gen_hours, "series length in hours");
  gen->add_option("--seed", gen_seed, "profile seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (sim->parsed()) return cmd_simulate(common, beta_text);
  if (grid->parsed()) return cmd_grid(common, knots_text);
  if (tune->parsed()) return cmd_tune(common, targs);
  if (gen->parsed()) return cmd_gen_series(common, gen_hours, gen_seed);
  return kExitConfig;
}
