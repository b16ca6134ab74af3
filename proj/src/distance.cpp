#include "shapesel/distance.hpp"

#include <cmath>
#include <limits>

#include "shapesel/data.hpp"
#include "shapesel/error.hpp"
#include "shapesel/sidl.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

namespace {

struct Moments {
    double mean;
    double std;
};

Moments moments(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / n)};
}

// Squared distance between znorm(sub) and an already z-normalised sequence.
double znorm_sq_distance(std::span<const double> sub, std::span<const double> normed) {
    const Moments m = moments(sub);
    double acc = 0.0;
    if (m.std < kFlatStd) {
        for (double b : normed) {
            acc += b * b;
        }
        return acc;
    }
    const double inv = 1.0 / m.std;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const double d = (sub[i] - m.mean) * inv - normed[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

std::vector<double> znorm(std::span<const double> v) {
    std::vector<double> out(v.size(), 0.0);
    if (v.empty()) {
        return out;
    }
    const Moments m = moments(v);
    if (m.std < kFlatStd) {
        return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = (v[i] - m.mean) / m.std;
    }
    return out;
}

double znorm_ed(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::LengthMismatch, "znorm_ed needs equal lengths, got " + std::to_string(a.size()) +
                                                   " and " + std::to_string(b.size()));
    }
    if (a.empty()) {
        throw Error(ErrorKind::InvalidArgument, "znorm_ed needs non-empty sequences");
    }
    const auto nb = znorm(b);
    return std::sqrt(znorm_sq_distance(a, nb));
}

Match sliding_min_distance(std::span<const double> context, std::span<const double> shapelet) {
    if (shapelet.empty()) {
        throw Error(ErrorKind::InvalidArgument, "shapelet must be non-empty");
    }
    if (shapelet.size() > context.size()) {
        throw Error(ErrorKind::ShapeletTooLong, "shapelet of length " + std::to_string(shapelet.size()) +
                                                    " exceeds context of length " + std::to_string(context.size()));
    }
    const auto ns = znorm(shapelet);
    const std::size_t q = shapelet.size();
    Match best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t j = 0; j + q <= context.size(); ++j) {
        const double d2 = znorm_sq_distance(context.subspan(j, q), ns);
        if (d2 < best.distance) {
            best = {d2, j};
        }
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

std::vector<double> DistanceMatrix::min_distances() const {
    std::vector<double> out;
    out.reserve(per_window_min.size());
    for (const auto& m : per_window_min) {
        out.push_back(m.distance);
    }
    return out;
}

DistanceMatrix build_distance_matrix(const WindowSet& windows, const ShapeletSet& shapelets) {
    if (shapelets.shapelets.empty()) {
        throw Error(ErrorKind::EmptyShapeletSet, "cannot match against an empty shapelet set");
    }
    DistanceMatrix m;
    m.rows = windows.size();
    m.cols = shapelets.shapelets.size();
    m.values.resize(m.rows * m.cols);
    m.positions.resize(m.rows * m.cols);
    m.per_window_min.reserve(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto ctx = windows.context(i);
        WindowMin row_min{std::numeric_limits<double>::infinity(), 0, 0};
        for (std::size_t k = 0; k < m.cols; ++k) {
            const Match match = sliding_min_distance(ctx, shapelets.shapelets[k].values);
            m.values[i * m.cols + k] = match.distance;
            m.positions[i * m.cols + k] = match.position;
            if (match.distance < row_min.distance) {
                row_min = {match.distance, k, match.position};
            }
        }
        m.per_window_min.push_back(row_min);
    }
    return m;
}

void write_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& m) {
    std::string out = "window_index,shapelet_index,distance,position\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t k = 0; k < m.cols; ++k) {
            out += std::to_string(i) + ',' + std::to_string(k) + ',' + text::format_double(m.at(i, k)) + ',' +
                   std::to_string(m.position(i, k)) + '\n';
        }
    }
    text::write_file(path, out);
}

}  // namespace shapesel
