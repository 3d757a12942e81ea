#include "emit.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "util.hpp"

namespace mpctune {

namespace {
std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}
}  // namespace

void write_result_files(const ClosedLoopResult& r, const std::string& dir) {
  nlohmann::json j;
  j["hours"] = r.hours;
  j["total_cost"] = r.total_cost;
  j["breakdown"] = {
      {"electricity", r.cost_electricity}, {"demand", r.cost_demand},
      {"water", r.cost_water},             {"gas", r.cost_gas},
      {"slack_penalty", r.cost_slack_penalty},
  };
  j["weekly_costs"] = r.weekly_costs;
  j["violation_count"] = r.violations.size();
  j["rho_cw"] = r.rho_cw_used;
  j["rho_hw"] = r.rho_hw_used;
  {
    auto out = open_out(dir, "result.json");
    out << j.dump(2) << "\n";
  }
  {
    auto out = open_out(dir, "hourly.csv");
    out << "hour,soc_cw,soc_hw,r_e,r_w,r_ng,price_e,cost_elec,cost_water,cost_gas,"
           "cost_demand,cost_slack,ul_cw,ul_hw,ol_cw,ol_hw,peak_kw\n";
    for (const auto& h : r.hourly) {
      const double cols[] = {h.soc_cw, h.soc_hw,     h.r_e,        h.r_w,     h.r_ng,
                             h.price_e, h.cost_elec, h.cost_water, h.cost_gas, h.cost_demand,
                             h.cost_slack, h.ul_cw,  h.ul_hw,      h.ol_cw,   h.ol_hw,
                             h.peak_kw};
      out << h.hour;
      for (const double c : cols) out << "," << fmt_double(c);
      out << "\n";
    }
  }
  {
    auto out = open_out(dir, "weekly.csv");
    out << "week,cost\n";
    for (size_t w = 0; w < r.weekly_costs.size(); ++w) {
      out << w << "," << fmt_double(r.weekly_costs[w]) << "\n";
    }
  }
  {
    auto out = open_out(dir, "violations.csv");
    out << "hour,tank,kind,magnitude_kwh\n";
    for (const auto& v : r.violations) {
      out << v.hour << "," << (v.tank == 'c' ? "cw" : "hw") << ","
          << (v.kind == 'o' ? "overflow" : "dryup") << "," << fmt_double(v.magnitude) << "\n";
    }
  }
}

namespace {
nlohmann::json trace_json(const BoTrace& t) {
  nlohmann::json j;
  j["bounds"] = {
      {"lower", std::vector<double>(t.bounds.lower.begin(), t.bounds.lower.end())},
      {"upper", std::vector<double>(t.bounds.upper.begin(), t.bounds.upper.end())},
  };
  j["config"] = {
      {"kappa", t.config.kappa},     {"n_init", t.config.n_init},
      {"max_iter", t.config.max_iter}, {"restarts", t.config.restarts},
      {"seed", t.config.seed},
      {"kernel",
       {{"lengthscale", t.config.kernel.lengthscale},
        {"nu", t.config.kernel.nu},
        {"noise", t.config.kernel.noise}}},
  };
  nlohmann::json samples = nlohmann::json::array();
  for (size_t i = 0; i < t.samples.size(); ++i) {
    const auto& s = t.samples[i];
    samples.push_back({
        {"iteration", i},
        {"x", std::vector<double>(s.x.begin(), s.x.end())},
        {"value", s.value},
        {"best_so_far", s.best_so_far},
    });
  }
  j["samples"] = samples;
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& m : t.iterations) {
    iters.push_back({
        {"n_data", m.n_data},
        {"jitter", m.jitter},
        {"acq_point", std::vector<double>(m.acq_point.begin(), m.acq_point.end())},
        {"acq_value", m.acq_value},
        {"duplicate_guard", m.duplicate_guard},
    });
  }
  j["iterations"] = iters;
  j["aborted"] = t.aborted;
  if (t.aborted) j["abort_reason"] = t.abort_reason;
  return j;
}
}  // namespace

std::string trace_canonical_json(const BoTrace& trace) { return trace_json(trace).dump(2); }

void write_trace_files(const BoTrace& trace, const std::string& dir,
                       const std::vector<std::string>& dim_names) {
  {
    auto out = open_out(dir, "trace.json");
    out << trace_canonical_json(trace) << "\n";
  }
  {
    auto out = open_out(dir, "trace.csv");
    out << "iteration";
    for (const auto& n : dim_names) out << "," << n;
    out << ",objective,best_so_far,seconds\n";
    for (size_t i = 0; i < trace.samples.size(); ++i) {
      const auto& s = trace.samples[i];
      out << i;
      for (Eigen::Index k = 0; k < s.x.size(); ++k) out << "," << fmt_double(s.x(k));
      out << "," << fmt_double(s.value) << "," << fmt_double(s.best_so_far) << ","
          << fmt_double(s.seconds) << "\n";
    }
  }
}

void write_gp_snapshots_csv(const BoTrace& trace, const std::string& dir,
                            const std::vector<std::string>& dim_names, int grid_n) {
  if (trace.bounds.dim() != 2) throw InputError("gp snapshots: only 2-D traces supported");
  auto out = open_out(dir, "gp_snapshots.csv");
  out << "iteration,n_data," << dim_names[0] << "," << dim_names[1] << ",post_mean,post_sigma\n";
  for (size_t it = 0; it < trace.iterations.size(); ++it) {
    const int n = trace.iterations[it].n_data;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x.row(i) = trace.bounds.to_unit(trace.samples[i].x).transpose();
      y(i) = trace.samples[i].value;
    }
    const GpModel model = GpModel::fit(x, y, trace.config.kernel);
    for (int a = 0; a < grid_n; ++a) {
      for (int b = 0; b < grid_n; ++b) {
        Eigen::Vector2d u(a / double(grid_n - 1), b / double(grid_n - 1));
        const auto p = model.posterior(u);
        const Eigen::VectorXd phys = trace.bounds.from_unit(u);
        out << it << "," << n << "," << fmt_double(phys(0)) << "," << fmt_double(phys(1)) << ","
            << fmt_double(p.mean) << "," << fmt_double(std::sqrt(p.variance)) << "\n";
      }
    }
  }
}

void write_grid_files(const CostGrid& grid, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_grid(grid, (std::filesystem::path(dir) / "grid.json").string());
  write_grid_csv(grid, (std::filesystem::path(dir) / "grid.csv").string());
}

}  // namespace mpctune
