#pragma once

#include "qlm/config.hpp"
#include "qlm/field_propagator.hpp"
#include "qlm/joint.hpp"

#include <optional>

namespace qlm {

// One labeled row of the time-series output; column set is fixed per run.
struct TimeSeriesRecord {
    double t = 0.0;
    std::vector<std::pair<std::string, double>> values;
};

struct RunResult {
    std::string directory;
    std::vector<TimeSeriesRecord> records;

    std::optional<FieldStateGrid> field_grid;      // parametric grid path, final
    std::optional<GaussianFieldState> field_gauss; // parametric Gaussian path, final
    std::optional<Factorization> joint_final;      // joint oracle, factorized final
    std::optional<ComparisonReport> comparison;    // solver = both

    std::vector<std::pair<double, ComparisonReport>> sweep_reports;
    double sweep_slope = 0.0; // log-log slope of total infidelity vs beta

    double field_fidelity_to_initial = 0.0; // parametric field vs G0
    double electron_volkov_fidelity = 0.0;  // center-sample vs closed form (free U)
};

// Executes the configured pipelines, writes records.tsv, checkpoints/ and
// summary.txt into the output directory (atomically, deterministic bytes),
// and returns the in-memory results.
RunResult run_scenario(const ScenarioConfig& cfg);

// Rewrites recorded data as plain two-or-more-column plot files under
// <run_dir>/plots. Quantities: var_q, mean_n, d12, infidelity.
void emit_plot_data(const std::string& run_dir, const std::string& quantity);

// QLM_THREADS environment variable (>= 1). The propagators are single-stream;
// sweep points are the unit of process-level parallelism.
int thread_count();

} // namespace qlm
