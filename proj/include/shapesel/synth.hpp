#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shapesel/data.hpp"

namespace shapesel {

/// Planted-motif generator: a base signal plus white noise, where each
/// planted motif is immediately followed by a burst of high-variance noise
/// one horizon long.
struct SynthSpec {
    std::size_t length = 20000;
    std::string base = "sine";  // "sine" | "ar1"
    std::vector<double> motif;  // defaults to default_motif(32) when empty
    double motif_rate = 0.3;    // fraction of the series covered by motif + burst segments
    double burst_std = 0.5;
    double noise_std = 0.1;
    std::size_t burst_length = 96;
    double sine_period = 50.0;
    double sine_amplitude = 1.0;
    double ar_coef = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
};

/// A sharp decline followed by a spike; starts at 0, dips to about -2, ends at 2.
std::vector<double> default_motif(std::size_t q);

struct PlantedSeries {
    TimeSeries series;
    std::vector<double> clean;  // base signal with motifs, before noise
    std::vector<std::size_t> motif_starts;
    std::size_t motif_length;
    std::size_t burst_length;

    /// True when [begin, end) intersects any burst segment.
    bool overlaps_burst(std::size_t begin, std::size_t end) const;
};

PlantedSeries generate_planted(const SynthSpec& spec);

/// Writes `value` CSV plus a `motif_start,burst_start,burst_end` file.
void write_planted(const std::filesystem::path& series_csv, const std::filesystem::path& truth_csv,
                   const PlantedSeries& planted);

}  // namespace shapesel
