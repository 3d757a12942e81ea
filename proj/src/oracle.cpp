#include "oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "util.hpp"

namespace mpctune {

void CostGrid::validate() const {
  if (knots_cw.size() < 2 || knots_hw.size() < 2)
    throw InputError("CostGrid: need at least 2 knots per dimension");
  for (const auto* ks : {&knots_cw, &knots_hw}) {
    for (size_t i = 0; i < ks->size(); ++i) {
      const double k = (*ks)[i];
      if (!(k >= 0.0 && k <= 0.5)) throw InputError("CostGrid: knots must lie in [0, 0.5]");
      if (i > 0 && !((*ks)[i - 1] < k)) throw InputError("CostGrid: knots must be strictly increasing");
    }
  }
  if (values.rows() != static_cast<Eigen::Index>(knots_cw.size()) ||
      values.cols() != static_cast<Eigen::Index>(knots_hw.size()))
    throw InputError("CostGrid: value matrix shape mismatch");
}

double CostGrid::min_value() const {
  if (!complete) throw DomainError("CostGrid: incomplete grid");
  return values.minCoeff();
}

std::pair<double, double> CostGrid::argmin() const {
  if (!complete) throw DomainError("CostGrid: incomplete grid");
  Eigen::Index i = 0, j = 0;
  values.minCoeff(&i, &j);
  return {knots_cw[i], knots_hw[j]};
}

CostGrid grid_evaluate(const PlantConfig& config, const DisturbanceSeries& series,
                       const std::vector<double>& knots_cw, const std::vector<double>& knots_hw,
                       long span_hours, int parallel) {
  CostGrid g;
  g.knots_cw = knots_cw;
  g.knots_hw = knots_hw;
  g.values.setZero(knots_cw.size(), knots_hw.size());
  g.span_hours = span_hours;
  g.series_hash = series.content_hash();
  g.validate();

  const int ni = static_cast<int>(knots_cw.size());
  const int nj = static_cast<int>(knots_hw.size());
  const int cells = ni * nj;
  std::vector<uint8_t> failed(cells, 0);

  const auto eval_cell = [&](int cell) {
    const int i = cell / nj;
    const int j = cell % nj;
    try {
      const BackoffTerms beta{knots_cw[i], knots_hw[j]};
      g.values(i, j) = simulate(config, series, beta, span_hours).total_cost;
    } catch (const std::exception&) {
      failed[cell] = 1;
    }
  };

  if (parallel <= 1) {
    for (int cell = 0; cell < cells; ++cell) eval_cell(cell);
  } else {
    std::atomic<int> next{0};
    const int workers = std::min(parallel, cells);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int cell = next.fetch_add(1); cell < cells; cell = next.fetch_add(1)) {
          eval_cell(cell);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (int cell = 0; cell < cells; ++cell) {
    if (failed[cell]) {
      g.holes.emplace_back(cell / nj, cell % nj);
      g.complete = false;
    }
  }
  return g;
}

namespace {
int locate_cell(const std::vector<double>& knots, double x) {
  if (x < knots.front() || x > knots.back()) return -1;
  // rightmost interval containing x; x == last knot maps to the last cell
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  int idx = static_cast<int>(it - knots.begin()) - 1;
  if (idx >= static_cast<int>(knots.size()) - 1) idx = static_cast<int>(knots.size()) - 2;
  return idx;
}
}  // namespace

double interpolate(const CostGrid& grid, double beta_cw, double beta_hw) {
  grid.validate();
  if (!grid.complete) throw DomainError("interpolate: grid is incomplete");
  const int i = locate_cell(grid.knots_cw, beta_cw);
  const int j = locate_cell(grid.knots_hw, beta_hw);
  if (i < 0 || j < 0) {
    std::ostringstream os;
    os << "interpolate: (" << beta_cw << ", " << beta_hw << ") outside the knot hull";
    throw DomainError(os.str());
  }
  const double x0 = grid.knots_cw[i], x1 = grid.knots_cw[i + 1];
  const double y0 = grid.knots_hw[j], y1 = grid.knots_hw[j + 1];
  const double u = (beta_cw - x0) / (x1 - x0);
  const double v = (beta_hw - y0) / (y1 - y0);
  return (1 - u) * (1 - v) * grid.values(i, j) + u * (1 - v) * grid.values(i + 1, j) +
         (1 - u) * v * grid.values(i, j + 1) + u * v * grid.values(i + 1, j + 1);
}

double synthetic_surface(const std::string& name, double u0, double u1) {
  if (name == "quadratic") {
    const double a = u0 - 0.3, b = u1 - 0.7;
    return 1.0 + 4.0 * (a * a + 1.3 * b * b);
  }
  if (name == "two_minima") {
    const auto bump = [](double x, double y, double cx, double cy, double s) {
      const double dx = x - cx, dy = y - cy;
      return std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
    };
    return 1.0 - 1.0 * bump(u0, u1, 0.75, 0.25, 0.15) - 0.6 * bump(u0, u1, 0.25, 0.70, 0.15);
  }
  if (name == "constant") return 7.0;
  throw ConfigError("unknown synthetic surface '" + name + "'");
}

bool synthetic_surface_exists(const std::string& name) {
  return name == "quadratic" || name == "two_minima" || name == "constant";
}

void save_grid(const CostGrid& grid, const std::string& path) {
  nlohmann::json j;
  j["format"] = "mpctune-grid-v1";
  j["knots_cw"] = grid.knots_cw;
  j["knots_hw"] = grid.knots_hw;
  std::vector<std::vector<double>> rows(grid.values.rows());
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    rows[i].assign(grid.values.row(i).begin(), grid.values.row(i).end());
  }
  j["values"] = rows;
  j["complete"] = grid.complete;
  if (!grid.complete) {
    std::vector<std::vector<int>> holes;
    for (const auto& [a, b] : grid.holes) holes.push_back({a, b});
    j["holes"] = holes;
  }
  j["provenance"] = {
      {"config_hash", grid.config_hash},
      {"series_hash", grid.series_hash},
      {"span_hours", grid.span_hours},
  };
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write grid file: " + path);
  out << j.dump(2) << "\n";
}

CostGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grid file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "mpctune-grid-v1") {
      throw ConfigError("grid file " + path + ": unsupported format tag");
    }
    CostGrid g;
    g.knots_cw = j.at("knots_cw").get<std::vector<double>>();
    g.knots_hw = j.at("knots_hw").get<std::vector<double>>();
    const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    g.values.resize(g.knots_cw.size(), g.knots_hw.size());
    if (rows.size() != g.knots_cw.size()) throw ConfigError("grid file: row count mismatch");
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != g.knots_hw.size()) throw ConfigError("grid file: column count mismatch");
      for (size_t c = 0; c < rows[i].size(); ++c) g.values(i, c) = rows[i][c];
    }
    g.complete = j.at("complete").get<bool>();
    if (j.contains("holes")) {
      for (const auto& h : j.at("holes")) g.holes.emplace_back(h.at(0).get<int>(), h.at(1).get<int>());
    }
    const auto& prov = j.at("provenance");
    g.config_hash = prov.at("config_hash").get<uint64_t>();
    g.series_hash = prov.at("series_hash").get<uint64_t>();
    g.span_hours = prov.at("span_hours").get<long>();
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grid file " + path + ": " + e.what());
  }
}

void write_grid_csv(const CostGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write grid csv: " + path);
  out << "beta_cw,beta_hw,cost\n";
  for (size_t i = 0; i < grid.knots_cw.size(); ++i) {
    for (size_t j = 0; j < grid.knots_hw.size(); ++j) {
      const bool hole = std::find(grid.holes.begin(), grid.holes.end(),
                                  std::make_pair(static_cast<int>(i), static_cast<int>(j))) !=
                        grid.holes.end();
      out << fmt_double(grid.knots_cw[i]) << "," << fmt_double(grid.knots_hw[j]) << ",";
      if (hole) {
        out << "nan";
      } else {
        out << fmt_double(grid.values(i, j));
      }
      out << "\n";
    }
  }
}

}  // namespace mpctune
