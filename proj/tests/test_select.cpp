#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shapesel/distance.hpp"
#include "shapesel/error.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/select.hpp"
#include "shapesel/text.hpp"

using namespace shapesel;

namespace {

void check_partition(const Selection& s, std::size_t n, double dp) {
    CHECK(s.size() == n);
    CHECK(s.dropped.size() == drop_count(dp, n));
    std::vector<std::size_t> all = s.dropped;
    all.insert(all.end(), s.retained.begin(), s.retained.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    CHECK(std::is_sorted(s.dropped.begin(), s.dropped.end()));
    CHECK(std::is_sorted(s.retained.begin(), s.retained.end()));
}

}  // namespace

TEST_CASE("compute_threshold") {
    const ThresholdSpec t = compute_threshold(0.4506, 0.6129, 2.0);
    CHECK(t.tau == 0.4506 + 2.0 * 0.6129);
    CHECK(std::abs(t.tau - 1.6764) < 1e-12);
    CHECK(compute_threshold(0.3, 0.2, 0.0).tau == 0.3);
    CHECK(compute_threshold(0.3, 0.0, 5.0).tau == 0.3);
    CHECK_THROWS_AS(compute_threshold(0.3, -0.1, 1.0), Error);
}

TEST_CASE("filter_high_error") {
    const ErrorVector e = ErrorVector::from_errors({1.0, 2.0, 3.0});
    CHECK(filter_high_error(e, 2.0) == std::vector<std::size_t>{2});
    CHECK(filter_high_error(e, 3.0).empty());
    CHECK(filter_high_error(e, -1.0) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("drop_count") {
    CHECK(drop_count(0.2, 100) == 20);
    CHECK(drop_count(0.3, 10) == 3);
    CHECK(drop_count(0.7, 10) == 7);
    CHECK(drop_count(0.25, 10) == 2);
    CHECK(drop_count(0.0, 10) == 0);
    CHECK(drop_count(1.0, 10) == 10);
    CHECK(drop_count(0.2, 3777) == 755);
    CHECK_THROWS_AS(drop_count(1.5, 10), Error);
    CHECK_THROWS_AS(drop_count(-0.1, 10), Error);
}

TEST_CASE("discard") {
    const std::vector<double> d{3.0, 1.0, 2.0, 5.0, 4.0};
    const Selection s = discard_by_distance(0.4, d);
    CHECK(s.dropped == std::vector<std::size_t>{1, 2});
    CHECK(s.retained == std::vector<std::size_t>{0, 3, 4});
    CHECK(s.method == SelectionMethod::Shapelet);
    CHECK(discard_by_distance(0.0, d).dropped.empty());
    CHECK(discard_by_distance(1.0, d).dropped.size() == 5);
    CHECK(discard_by_distance(0.4, std::vector<double>{1.0, 0.5, 1.0, 0.5, 1.0}).dropped ==
          std::vector<std::size_t>{1, 3});
    CHECK(discard_by_distance(0.2, std::vector<double>{2.0, 1.0, 1.0, 1.0, 1.0}).dropped ==
          std::vector<std::size_t>{1});

    DistanceMatrix m;
    m.rows = 5;
    m.cols = 1;
    m.values = d;
    m.positions.assign(5, 0);
    for (std::size_t i = 0; i < 5; ++i) m.per_window_min.push_back(WindowMin{d[i], 0, 0});
    CHECK(discard(0.4, m).dropped == std::vector<std::size_t>{1, 2});

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng() % 60;
        std::vector<double> dist(n);
        for (double& v : dist) v = static_cast<double>(rng() % 10);
        const double dp = static_cast<double>(rng() % 11) / 10.0;
        const Selection sel = discard_by_distance(dp, dist);
        check_partition(sel, n, dp);
        // Every dropped window is at least as close as every retained one.
        for (std::size_t a : sel.dropped) {
            for (std::size_t b : sel.retained) {
                CHECK((dist[a] < dist[b] || (dist[a] == dist[b] && a < b)));
            }
        }
    }
}

TEST_CASE("random_selection") {
    CHECK(random_selection(0.0, 10, 1).dropped.empty());
    const Selection a = random_selection(0.2, 100, 77);
    const Selection b = random_selection(0.2, 100, 77);
    CHECK(a.dropped == b.dropped);
    CHECK(a.method == SelectionMethod::Random);
    REQUIRE(a.seed.has_value());
    CHECK(*a.seed == 77);
    check_partition(a, 100, 0.2);
    CHECK(random_selection(0.5, 0, 3).size() == 0);

    std::vector<int> hits(100, 0);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        for (std::size_t i : random_selection(0.2, 100, seed).dropped) ++hits[i];
    }
    for (int h : hits) {
        const double f = h / 10000.0;
        CHECK(f >= 0.18);
        CHECK(f <= 0.22);
    }
}

TEST_CASE("selective_mse") {
    const ErrorVector e = ErrorVector::from_errors({2.0, 4.0});
    const EvaluationReport none = selective_mse(e, keep_all(2));
    CHECK(none.mse_zeroed == 3.0);
    CHECK(none.mse_retained == 3.0);
    CHECK(none.coverage == 1.0);

    Selection one;
    one.dropped = {1};
    one.retained = {0};
    one.dp = 0.5;
    const EvaluationReport r = selective_mse(e, one);
    CHECK(r.mse_zeroed == 1.0);
    CHECK(r.mse_retained == 2.0);
    CHECK(r.coverage == 0.5);
    REQUIRE(r.per_window.size() == 2);
    CHECK(r.per_window[1].dropped);
    CHECK(r.per_window[1].error == 4.0);

    const EvaluationReport all = selective_mse(e, discard_by_distance(1.0, std::vector<double>{1.0, 2.0}));
    CHECK(all.mse_zeroed == 0.0);
    CHECK(all.mse_retained == 0.0);
    CHECK(all.no_retained);

    CHECK_THROWS_AS(selective_mse(e, keep_all(3)), Error);
    try {
        selective_mse(e, keep_all(3));
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::IndexMismatch);
    }

    // Random 20% drop of a constant-MSE vector: zeroed MSE is exactly 0.8x.
    const ErrorVector ettm1 = ErrorVector::from_errors(std::vector<double>(1000, 0.0275));
    CHECK(std::abs(selective_mse(ettm1, random_selection(0.2, 1000, 3)).mse_zeroed - 0.0220) < 1e-12);
}

TEST_CASE("selection invariants on random error vectors") {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> expo(1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<double> errs(n);
        for (double& v : errs) v = expo(rng);
        const ErrorVector e = ErrorVector::from_errors(errs);
        std::vector<double> dist(n);
        for (double& v : dist) v = expo(rng);
        double prev = INFINITY;
        for (int k = 0; k <= 5; ++k) {
            const double dp = k / 10.0;
            const Selection sel = discard_by_distance(dp, dist);
            const EvaluationReport r = selective_mse(e, sel);
            double kept = 0.0;
            double dropped = 0.0;
            for (std::size_t i : sel.retained) kept += errs[i];
            for (std::size_t i : sel.dropped) dropped += errs[i];
            CHECK(std::abs(r.mse_zeroed - kept / static_cast<double>(n)) < 1e-12);
            if (!sel.retained.empty()) {
                CHECK(std::abs(r.mse_retained - kept / static_cast<double>(sel.retained.size())) < 1e-12);
            }
            CHECK(r.coverage == static_cast<double>(sel.retained.size()) / static_cast<double>(n));
            CHECK(r.mse_zeroed <= prev);
            prev = r.mse_zeroed;
            // Beats a random drop of equal size in expectation iff the dropped mean exceeds the overall mean.
            if (!sel.dropped.empty()) {
                const double expected_random = (1.0 - static_cast<double>(sel.dropped.size()) / n) * e.mean;
                const bool beats = r.mse_zeroed < expected_random - 1e-12;
                const bool above = dropped / static_cast<double>(sel.dropped.size()) > e.mean + 1e-12;
                CHECK(beats == above);
            }
        }
    }
}

TEST_CASE("write_selection layout") {
    const auto dir = oracle::scratch_dir("select_io");
    const Selection s = discard_by_distance(0.4, std::vector<double>{3.0, 1.0, 2.0, 5.0, 4.0});
    write_selection(dir / "sel.csv", s, std::vector<double>{3.0, 1.0, 2.0, 5.0, 4.0});
    CHECK(text::read_file(dir / "sel.csv") ==
          "window_index,min_distance,dropped\n0,3,0\n1,1,1\n2,2,1\n3,5,0\n4,4,0\n");
    write_selection(dir / "rnd.csv", random_selection(0.4, 5, 1), {});
    const std::string rnd = text::read_file(dir / "rnd.csv");
    CHECK(text::lines(rnd).front() == "window_index,min_distance,dropped");
}
