#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shapesel {

struct ErrorVector;
struct DistanceMatrix;

/// tau = mean_err + delta * std_err
struct ThresholdSpec {
    double mean_err = 0.0;
    double std_err = 0.0;
    double delta = 0.0;
    double tau = 0.0;
};

ThresholdSpec compute_threshold(double mean_err, double std_err, double delta);

/// Indices with error strictly above tau, in index order.
std::vector<std::size_t> filter_high_error(const ErrorVector& errors, double tau);

enum class SelectionMethod { Shapelet, Random };

std::string_view to_string(SelectionMethod m);

/// Partition of window indices 0..n-1 into dropped and retained (both sorted).
struct Selection {
    std::vector<std::size_t> dropped;
    std::vector<std::size_t> retained;
    double dp = 0.0;
    SelectionMethod method = SelectionMethod::Shapelet;
    std::optional<std::uint64_t> seed;

    std::size_t size() const noexcept { return dropped.size() + retained.size(); }
    std::vector<bool> dropped_mask() const;
};

/// floor(dp * n), guarded against representation error in dp * n.
std::size_t drop_count(double dp, std::size_t n);

/// Drops the floor(dp * n) windows closest to any shapelet; ties by index.
Selection discard(double dp, const DistanceMatrix& d_mat);

/// Same, from a plain vector of per-window minimum distances.
Selection discard_by_distance(double dp, std::span<const double> min_distances);

Selection random_selection(double dp, std::size_t n, std::uint64_t seed);

/// No-drop selection over n windows.
Selection keep_all(std::size_t n, SelectionMethod method = SelectionMethod::Shapelet);

struct WindowOutcome {
    std::size_t index;
    double error;
    bool dropped;
};

struct EvaluationReport {
    double mse_zeroed = 0.0;    // dropped errors count as 0, averaged over all n
    double mse_retained = 0.0;  // average over retained windows only
    double coverage = 1.0;
    bool no_retained = false;   // mse_retained is 0 by convention when set
    std::vector<WindowOutcome> per_window;
    std::vector<std::pair<std::string, std::string>> provenance;
};

EvaluationReport selective_mse(const ErrorVector& errors, const Selection& sel);

/// `window_index,min_distance,dropped`
void write_selection(const std::filesystem::path& path, const Selection& sel, std::span<const double> min_distances);

}  // namespace shapesel
