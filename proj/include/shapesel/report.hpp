#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace shapesel {

/// One dataset/forecaster line of a results table (summary.csv layout).
struct ResultRow {
    std::string dataset;
    std::string forecaster;
    double no_drop_mse = 0.0;
    double random_mse = 0.0;
    double shapelet_mse = 0.0;
};

/// 100 * (baseline - value) / baseline
double reduction_pct(double baseline, double value);

struct ReductionSummary {
    std::string forecaster;
    std::vector<std::string> datasets;
    std::vector<double> reduction_pct;          // shapelet vs no-drop
    std::vector<double> margin_over_random_pct;  // shapelet vs random
    double mean_reduction_pct = 0.0;
    double max_margin_over_random_pct = 0.0;
    std::string max_margin_dataset;
};

/// Groups rows by forecaster (in first-seen order) and averages the
/// per-dataset reductions.
std::vector<ReductionSummary> summarize_reductions(std::span<const ResultRow> rows);

/// Reads a CSV with at least dataset,forecaster,no_drop_mse,random_mse,shapelet_mse.
std::vector<ResultRow> load_result_rows(const std::filesystem::path& path);

std::string format_reductions(std::span<const ReductionSummary> summaries);

/// Recomputes every summary.csv number from the per-seed per-window error
/// files of an emitted run directory. Returns human-readable mismatches.
std::vector<std::string> cross_check_run(const std::filesystem::path& dir, double rel_tol = 1e-12);

}  // namespace shapesel
