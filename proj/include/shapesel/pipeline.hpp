#pragma once

// End-to-end selective forecasting run: forecasts on the validation split,
// threshold, high-error filtering, shapelet learning, distance matching on
// the test split, discard, and selective evaluation, repeated per seed.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapesel/data.hpp"
#include "shapesel/distance.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/select.hpp"
#include "shapesel/sidl.hpp"
#include "shapesel/synth.hpp"

namespace shapesel {

enum class ForecasterKind { Baseline, External };

struct RunConfig {
    std::string dataset_name;
    std::filesystem::path data_path;  // empty when `synth` is set
    std::string column = "OT";
    std::optional<SynthSpec> synth;
    bool synth_burst_explicit = false;  // otherwise the burst spans one horizon (fl)

    SplitSpec split = SplitSpec::default_fractions();
    std::size_t sl = 512;
    std::size_t fl = 96;
    std::size_t val_stride = 1;
    std::size_t test_stride = 1;

    ForecasterKind forecaster = ForecasterKind::Baseline;
    double ridge = 1e-3;
    std::string primary_name = "primary";
    std::filesystem::path val_predictions;
    std::filesystem::path test_predictions;
    std::string secondary_name = "secondary";
    std::filesystem::path secondary_test_predictions;  // optional

    double delta = 2.0;
    double dp = 0.2;

    bool use_grid_search = true;
    SidlGrid grid;  // empty axes fall back to SidlGrid::defaults(sl)
    SidlConfig sidl;
    std::size_t folds = 3;
    bool znorm_samples = true;
    std::size_t max_samples = 0;  // 0 keeps every high-error context
    std::size_t top_k = 5;
    double dedup_threshold = 1.0;

    std::vector<std::uint64_t> seeds = {0, 1, 2};
    std::filesystem::path output_dir;

    /// Throws ConfigInvalid / FileNotFound for unusable settings.
    void validate() const;
    SidlGrid effective_grid() const;
    std::vector<std::pair<std::string, std::string>> snapshot() const;
};

/// Parses a `key = value` run-config file. Relative paths resolve against
/// the file's directory. Unknown keys are rejected.
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies one `key = value` setting (same keys as the config file).
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

struct ForecasterEval {
    std::string forecaster;
    EvaluationReport no_drop;
    EvaluationReport random;
    EvaluationReport shapelet;
};

struct SeedRun {
    std::uint64_t seed = 0;
    SidlConfig chosen;
    std::vector<GridCell> grid;
    Dictionary dictionary;
    ShapeletSet shapelets;
    std::optional<DistanceMatrix> distances;  // absent when no shapelets were learned
    Selection shapelet_selection;
    Selection random_selection;
    std::vector<ForecasterEval> evals;
};

struct SummaryRow {
    std::string forecaster;
    double no_drop_mse = 0.0;
    double random_mse = 0.0;
    double shapelet_mse = 0.0;
    double coverage = 1.0;
    double random_mse_retained = 0.0;
    double shapelet_mse_retained = 0.0;
};

struct RunReport {
    std::string dataset;
    SplitBounds bounds;
    std::size_t val_windows = 0;
    std::size_t test_windows = 0;
    double dp = 0.0;
    ThresholdSpec threshold;
    std::size_t high_error_count = 0;
    std::vector<std::string> forecasters;
    std::vector<ErrorVector> test_errors;  // parallel to `forecasters`
    std::vector<SeedRun> seeds;
    std::vector<SummaryRow> summary;  // seed averages, parallel to `forecasters`
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> config;
};

/// Data, windows and per-window errors shared by every later stage.
struct PreparedInputs {
    std::string dataset;
    SplitBounds bounds;
    WindowSet val;
    WindowSet test;
    ErrorVector val_errors;                 // primary forecaster
    std::vector<std::string> names;         // primary first, then secondary
    std::vector<ErrorVector> test_errors;  // parallel to `names`
};

struct SeedShapelets {
    std::uint64_t seed = 0;
    SidlConfig chosen;
    std::vector<GridCell> grid;
    Dictionary dictionary;
    ShapeletSet shapelets;
    std::optional<DistanceMatrix> distances;
};

struct LearnedShapelets {
    ThresholdSpec threshold;
    std::size_t high_error_count = 0;
    std::vector<SeedShapelets> seeds;
    std::vector<std::string> warnings;
};

/// Loads or generates the series, splits, windows and forecasts it.
PreparedInputs prepare_inputs(const RunConfig& config);

/// Threshold, high-error filtering, grid search and dictionary learning per
/// seed, then distances of every test context to the learned shapelets.
LearnedShapelets learn_shapelets(const RunConfig& config, const PreparedInputs& inputs);

/// Discard and random selection at `dp`, evaluated for every forecaster.
RunReport evaluate_selection(const RunConfig& config, const PreparedInputs& inputs, const LearnedShapelets& learned,
                             double dp);

/// Runs every stage; writes all artifacts when `config.output_dir` is set.
RunReport run_pipeline(const RunConfig& config);

enum class AblationAxis { Delta, DropPercentage };

AblationAxis parse_ablation_axis(const std::string& name);
std::string_view to_string(AblationAxis axis);

/// One report per value. Shapelets are re-learned per delta and reused
/// across drop percentages.
std::vector<RunReport> run_ablation(const RunConfig& config, AblationAxis axis, const std::vector<double>& values);

/// Writes summary.csv, per_seed.csv, run.txt and per-seed artifacts.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

/// `axis,value,forecaster,no_drop_mse,random_mse,shapelet_mse,coverage,...`
void emit_ablation(const std::vector<RunReport>& reports, AblationAxis axis, const std::vector<double>& values,
                   const std::filesystem::path& path);

}  // namespace shapesel
