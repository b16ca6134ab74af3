#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace shapesel {

class WindowSet;
struct ShapeletSet;

/// Below this population std a sequence z-normalises to all zeros.
inline constexpr double kFlatStd = 1e-12;

std::vector<double> znorm(std::span<const double> v);

double znorm_ed(std::span<const double> a, std::span<const double> b);

struct Match {
    double distance;
    std::size_t position;
};

/// Minimum z-normalised distance of `shapelet` against every length-q
/// subsequence of `context`. Ties resolve to the smallest position.
Match sliding_min_distance(std::span<const double> context, std::span<const double> shapelet);

struct WindowMin {
    double distance;
    std::size_t shapelet;
    std::size_t position;
};

/// Row-major n_windows x n_shapelets matrix of sliding-minimum distances.
struct DistanceMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::size_t> positions;
    std::vector<WindowMin> per_window_min;

    double at(std::size_t i, std::size_t k) const { return values[i * cols + k]; }
    std::size_t position(std::size_t i, std::size_t k) const { return positions[i * cols + k]; }
    std::vector<double> min_distances() const;
};

/// Distances are taken against window contexts only.
DistanceMatrix build_distance_matrix(const WindowSet& windows, const ShapeletSet& shapelets);

/// `window_index,shapelet_index,distance,position`
void write_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& m);

}  // namespace shapesel
