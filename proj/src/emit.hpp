#pragma once

#include <string>
#include <vector>

#include "bo.hpp"
#include "oracle.hpp"
#include "sim.hpp"

namespace mpctune {

// Closed-loop result -> <dir>/result.json, hourly.csv, weekly.csv, violations.csv.
// Deterministic byte-for-byte for identical results.
void write_result_files(const ClosedLoopResult& result, const std::string& dir);

// BO trace -> <dir>/trace.json (deterministic fields only) and trace.csv
// (iteration, coordinates, objective, best_so_far, seconds). `dim_names`
// labels the coordinate columns.
void write_trace_files(const BoTrace& trace, const std::string& dir,
                       const std::vector<std::string>& dim_names);

// Per-iteration GP posterior mean/sigma on a grid_n x grid_n grid over the
// tuning box, replayed from the trace -> <dir>/gp_snapshots.csv.
void write_gp_snapshots_csv(const BoTrace& trace, const std::string& dir,
                            const std::vector<std::string>& dim_names, int grid_n = 50);

void write_grid_files(const CostGrid& grid, const std::string& dir);

std::string trace_canonical_json(const BoTrace& trace);  // timing excluded

}  // namespace mpctune
