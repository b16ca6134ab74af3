#include "shapesel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "shapesel/error.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

void SynthSpec::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::SpecInvalid, what); };
    const std::size_t q = motif.empty() ? 32 : motif.size();
    if (length == 0) fail("length must be positive");
    if (base != "sine" && base != "ar1") fail("base must be 'sine' or 'ar1'");
    if (!(q * 10 < length)) fail("motif length must be below length / 10");
    if (!(motif_rate >= 0.0 && motif_rate < 1.0)) fail("motif_rate must lie in [0, 1)");
    if (!(noise_std >= 0.0)) fail("noise_std must be non-negative");
    if (!(burst_std > noise_std)) fail("burst_std must exceed noise_std");
    if (burst_length == 0) fail("burst_length must be positive");
    if (!(sine_period > 0.0)) fail("sine_period must be positive");
    if (!(std::abs(ar_coef) < 1.0)) fail("ar_coef must lie in (-1, 1)");
    for (double v : motif) {
        if (!std::isfinite(v)) fail("motif values must be finite");
    }
}

std::vector<double> default_motif(std::size_t q) {
    std::vector<double> m(q);
    if (q == 1) {
        return {0.0};
    }
    const std::size_t fall = std::max<std::size_t>(1, (3 * q) / 4);
    for (std::size_t i = 0; i < q; ++i) {
        if (i < fall) {
            m[i] = 1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(fall);
        } else {
            const double u = static_cast<double>(i - fall + 1) / static_cast<double>(q - fall);
            m[i] = -1.0 + 4.0 * u;
        }
    }
    // Peak-to-peak from -1 to 3: shift so it ends back near the series level.
    for (double& v : m) {
        v -= 1.0;
    }
    return m;
}

bool PlantedSeries::overlaps_burst(std::size_t begin, std::size_t end) const {
    for (std::size_t s : motif_starts) {
        const std::size_t b0 = s + motif_length;
        const std::size_t b1 = b0 + burst_length;
        if (begin < b1 && b0 < end) {
            return true;
        }
    }
    return false;
}

PlantedSeries generate_planted(const SynthSpec& spec) {
    spec.validate();
    const std::vector<double> motif = spec.motif.empty() ? default_motif(32) : spec.motif;
    const std::size_t q = motif.size();
    const std::size_t seg = q + spec.burst_length;
    const std::size_t n = spec.length;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> values(n);
    if (spec.base == "sine") {
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = spec.sine_amplitude *
                        std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / spec.sine_period + phase);
        }
    } else {
        double state = 0.0;
        const double innovation = std::sqrt(1.0 - spec.ar_coef * spec.ar_coef);
        for (std::size_t i = 0; i < n; ++i) {
            state = spec.ar_coef * state + innovation * gauss(rng);
            values[i] = state;
        }
    }

    // One placement per equal-width bin keeps segments disjoint and inside the series.
    const auto placements = static_cast<std::size_t>(std::floor(spec.motif_rate * static_cast<double>(n) /
                                                                 static_cast<double>(seg)));
    std::vector<std::size_t> starts;
    starts.reserve(placements);
    for (std::size_t b = 0; b < placements; ++b) {
        const std::size_t lo = b * n / placements;
        const std::size_t hi = (b + 1) * n / placements;
        std::uniform_int_distribution<std::size_t> pick(lo, hi - seg);
        starts.push_back(pick(rng));
    }

    std::vector<bool> in_burst(n, false);
    for (std::size_t s : starts) {
        std::copy(motif.begin(), motif.end(), values.begin() + static_cast<std::ptrdiff_t>(s));
        for (std::size_t j = s + q; j < s + seg; ++j) {
            in_burst[j] = true;
        }
    }
    std::vector<double> clean = values;
    for (std::size_t i = 0; i < n; ++i) {
        values[i] += (in_burst[i] ? spec.burst_std : spec.noise_std) * gauss(rng);
    }

    return PlantedSeries{TimeSeries(std::move(values), "value"), std::move(clean), std::move(starts), q,
                         spec.burst_length};
}

void write_planted(const std::filesystem::path& series_csv, const std::filesystem::path& truth_csv,
                   const PlantedSeries& planted) {
    std::string out = "value\n";
    for (double v : planted.series.values()) {
        out += text::format_double(v);
        out += '\n';
    }
    text::write_file(series_csv, out);

    std::string truth = "motif_start,burst_start,burst_end\n";
    for (std::size_t s : planted.motif_starts) {
        const std::size_t b = s + planted.motif_length;
        truth += std::to_string(s) + ',' + std::to_string(b) + ',' + std::to_string(b + planted.burst_length) + '\n';
    }
    text::write_file(truth_csv, truth);
}

}  // namespace shapesel
