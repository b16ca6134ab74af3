#include "shapesel/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shapesel/distance.hpp"
#include "shapesel/error.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

ThresholdSpec compute_threshold(double mean_err, double std_err, double delta) {
    if (!(std_err >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "standard deviation must be non-negative");
    }
    return ThresholdSpec{mean_err, std_err, delta, mean_err + delta * std_err};
}

std::vector<std::size_t> filter_high_error(const ErrorVector& errors, double tau) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < errors.errors.size(); ++i) {
        if (errors.errors[i] > tau) {
            out.push_back(i);
        }
    }
    return out;
}

std::string_view to_string(SelectionMethod m) {
    return m == SelectionMethod::Shapelet ? "shapelet" : "random";
}

std::vector<bool> Selection::dropped_mask() const {
    std::vector<bool> mask(size(), false);
    for (std::size_t i : dropped) {
        mask[i] = true;
    }
    return mask;
}

std::size_t drop_count(double dp, std::size_t n) {
    if (!(dp >= 0.0 && dp <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "drop percentage must lie in [0, 1]");
    }
    const double exact = dp * static_cast<double>(n);
    // 0.3 * 10 evaluates to 2.9999999999999996; snap near-integers first.
    const double nearest = std::round(exact);
    const double value = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest : std::floor(exact);
    return std::min(n, static_cast<std::size_t>(value));
}

namespace {

Selection partition(std::size_t n, std::vector<std::size_t> dropped, double dp, SelectionMethod method,
                    std::optional<std::uint64_t> seed) {
    std::sort(dropped.begin(), dropped.end());
    Selection sel;
    sel.dp = dp;
    sel.method = method;
    sel.seed = seed;
    sel.retained.reserve(n - dropped.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < dropped.size() && dropped[j] == i) {
            ++j;
        } else {
            sel.retained.push_back(i);
        }
    }
    sel.dropped = std::move(dropped);
    return sel;
}

}  // namespace

Selection discard_by_distance(double dp, std::span<const double> min_distances) {
    const std::size_t n = min_distances.size();
    const std::size_t m = drop_count(dp, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return min_distances[a] < min_distances[b]; });
    order.resize(m);
    return partition(n, std::move(order), dp, SelectionMethod::Shapelet, std::nullopt);
}

Selection discard(double dp, const DistanceMatrix& d_mat) {
    const auto mins = d_mat.min_distances();
    return discard_by_distance(dp, mins);
}

Selection random_selection(double dp, std::size_t n, std::uint64_t seed) {
    const std::size_t m = drop_count(dp, n);
    // Partial Fisher-Yates: the first m slots are a uniform sample without replacement.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(m);
    return partition(n, std::move(pool), dp, SelectionMethod::Random, seed);
}

Selection keep_all(std::size_t n, SelectionMethod method) {
    return partition(n, {}, 0.0, method, std::nullopt);
}

EvaluationReport selective_mse(const ErrorVector& errors, const Selection& sel) {
    const std::size_t n = errors.errors.size();
    if (sel.size() != n) {
        throw Error(ErrorKind::IndexMismatch, "selection covers " + std::to_string(sel.size()) +
                                                  " windows but the error vector has " + std::to_string(n));
    }
    const auto mask = sel.dropped_mask();
    for (std::size_t i : sel.retained) {
        if (i >= n || mask[i]) {
            throw Error(ErrorKind::IndexMismatch, "selection is not a partition of 0.." + std::to_string(n));
        }
    }
    EvaluationReport r;
    r.per_window.reserve(n);
    double retained_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.per_window.push_back(WindowOutcome{i, errors.errors[i], mask[i]});
        if (!mask[i]) {
            retained_sum += errors.errors[i];
        }
    }
    const std::size_t kept = sel.retained.size();
    r.mse_zeroed = n > 0 ? retained_sum / static_cast<double>(n) : 0.0;
    r.mse_retained = kept > 0 ? retained_sum / static_cast<double>(kept) : 0.0;
    r.no_retained = kept == 0;
    r.coverage = n > 0 ? static_cast<double>(kept) / static_cast<double>(n) : 1.0;
    r.provenance = {{"method", std::string(to_string(sel.method))},
                    {"dp", text::format_double(sel.dp)},
                    {"std_convention", "population"}};
    if (sel.seed) {
        r.provenance.emplace_back("seed", std::to_string(*sel.seed));
    }
    return r;
}

void write_selection(const std::filesystem::path& path, const Selection& sel, std::span<const double> min_distances) {
    const auto mask = sel.dropped_mask();
    std::string out = "window_index,min_distance,dropped\n";
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out += std::to_string(i) + ',';
        out += i < min_distances.size() ? text::format_double(min_distances[i]) : std::string("nan");
        out += mask[i] ? ",1\n" : ",0\n";
    }
    text::write_file(path, out);
}

}  // namespace shapesel
