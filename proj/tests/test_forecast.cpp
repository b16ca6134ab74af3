#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "shapesel/error.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/text.hpp"

using namespace shapesel;

namespace {

TimeSeries sine(std::size_t n, double period, double offset = 0.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = offset + std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    }
    return TimeSeries(v);
}

std::string prediction_rows(std::size_t n, std::size_t fl, std::size_t skip = SIZE_MAX, std::size_t short_row = SIZE_MAX) {
    std::string csv = "window_index";
    for (std::size_t j = 1; j <= fl; ++j) csv += ",v_" + std::to_string(j);
    csv += "\n";
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip) continue;
        csv += std::to_string(i);
        const std::size_t len = i == short_row ? fl - 1 : fl;
        for (std::size_t j = 0; j < len; ++j) csv += "," + std::to_string(0.5 * static_cast<double>(i + j));
        csv += "\n";
    }
    return csv;
}

}  // namespace

TEST_CASE("baseline reproduces a pure sinusoid") {
    const TimeSeries train = sine(600, 24.0);
    const BaselineModel m = fit_baseline(train, 48, 24);
    const TimeSeries full = sine(900, 24.0);
    const std::vector<double> tail(full.values().begin(), full.values().end());
    const TimeSeries held(std::vector<double>(tail.begin() + 600, tail.end()));
    const WindowSet w = make_windows(held, 48, 24, 1);
    const ErrorVector e = per_window_mse(predict(m, w), w);
    CHECK(e.mean < 1e-6);
}

TEST_CASE("baseline on a constant series forecasts the constant") {
    const TimeSeries flat(std::vector<double>(300, 3.0));
    const BaselineModel m = fit_baseline(flat, 20, 5);
    const WindowSet w = make_windows(flat, 20, 5, 3);
    const PredictionSet p = predict(m, w);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (double v : p[i]) CHECK(std::abs(v - 3.0) < 1e-9);
    }
}

TEST_CASE("baseline errors") {
    CHECK_THROWS_AS(fit_baseline(sine(71, 10.0), 48, 24), Error);
    try {
        fit_baseline(sine(71, 10.0), 48, 24);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SeriesTooShort);
    }
    // Constant data leaves the centred normal system all zero.
    try {
        fit_baseline(TimeSeries(std::vector<double>(100, 1.0)), 10, 2, 0.0);
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
    }
    std::mt19937_64 rng(3);
    CHECK_NOTHROW(fit_baseline(TimeSeries(oracle::random_vec(rng, 400)), 10, 2, 0.0));

    const BaselineModel m = fit_baseline(sine(400, 24.0), 30, 6);
    const WindowSet wrong = make_windows(sine(100, 24.0), 20, 6, 1);
    try {
        predict(m, wrong);
        FAIL("expected GeometryMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GeometryMismatch);
    }
}

TEST_CASE("predict is deterministic and beats last-value on in-distribution windows") {
    std::mt19937_64 rng(5);
    const TimeSeries clean = sine(1500, 30.0);
    std::vector<double> v(clean.values().begin(), clean.values().end());
    for (double& x : v) x += 0.05 * std::normal_distribution<double>(0.0, 1.0)(rng);
    const TimeSeries train(std::vector<double>(v.begin(), v.begin() + 1000));
    const TimeSeries test(std::vector<double>(v.begin() + 1000, v.end()));
    const BaselineModel m = fit_baseline(train, 60, 15);
    const WindowSet w = make_windows(test, 60, 15, 1);
    const PredictionSet a = predict(m, w);
    const PredictionSet b = predict(m, w);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::equal(a[i].begin(), a[i].end(), b[i].begin()));
    }
    double model = 0.0;
    double naive = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto ctx = w.context(i);
        const auto tgt = w.target(i);
        const oracle::Vec y(tgt.begin(), tgt.end());
        model += oracle::mse(oracle::Vec(a[i].begin(), a[i].end()), y);
        naive += oracle::mse(oracle::Vec(tgt.size(), ctx.back()), y);
    }
    CHECK(model < naive);
}

TEST_CASE("baseline is translation-equivariant") {
    std::mt19937_64 rng(9);
    auto v = oracle::random_vec(rng, 400);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] += 0.8 * v[i - 1];
    const double c = 17.5;
    auto shifted = v;
    for (double& x : shifted) x += c;
    const BaselineModel m0 = fit_baseline(TimeSeries(v), 16, 4);
    const BaselineModel m1 = fit_baseline(TimeSeries(shifted), 16, 4);
    const WindowSet w0 = make_windows(TimeSeries(v), 16, 4, 7);
    const WindowSet w1 = make_windows(TimeSeries(shifted), 16, 4, 7);
    const PredictionSet p0 = predict(m0, w0);
    const PredictionSet p1 = predict(m1, w1);
    for (std::size_t i = 0; i < p0.size(); ++i) {
        for (std::size_t j = 0; j < p0.horizon(); ++j) CHECK(std::abs(p1[i][j] - p0[i][j] - c) < 1e-9);
    }
}

TEST_CASE("per_window_mse") {
    const TimeSeries ts(std::vector<double>{0.0, 1.0, 1.0});
    const WindowSet w = make_windows(ts, 1, 2, 1);
    const ErrorVector e = per_window_mse(PredictionSet({{2.0, 3.0}}, 2, "hand"), w);
    REQUIRE(e.size() == 1);
    CHECK(e.errors[0] == 2.5);

    const ErrorVector perfect = per_window_mse(PredictionSet({{1.0, 1.0}}, 2, "perfect"), w);
    CHECK(perfect.errors[0] == 0.0);
    CHECK(perfect.mean == 0.0);
    CHECK(perfect.std == 0.0);

    try {
        per_window_mse(PredictionSet({{1.0, 1.0}, {1.0, 1.0}}, 2, "extra"), w);
        FAIL("expected CoverageMismatch");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::CoverageMismatch);
    }
}

TEST_CASE("per_window_mse agrees with a brute-force oracle; mean is the grand MSE") {
    std::mt19937_64 rng(21);
    const auto v = oracle::random_vec(rng, 300);
    const WindowSet w = make_windows(TimeSeries(v), 20, 8, 3);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < w.size(); ++i) rows.push_back(oracle::random_vec(rng, 8));
    const ErrorVector e = per_window_mse(PredictionSet(rows, 8, "random"), w);
    double grand = 0.0;
    std::vector<double> expected;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto t = w.target(i);
        expected.push_back(oracle::mse(rows[i], oracle::Vec(t.begin(), t.end())));
        for (std::size_t j = 0; j < 8; ++j) grand += (rows[i][j] - t[j]) * (rows[i][j] - t[j]);
        CHECK(e.errors[i] >= 0.0);
    }
    grand /= static_cast<double>(8 * w.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(e.errors[i] - expected[i]) < 1e-12);
    CHECK(std::abs(e.mean - grand) < 1e-12);
    CHECK(std::abs(e.mean - oracle::mean(expected)) < 1e-12);
    CHECK(std::abs(e.std - oracle::pop_std(expected)) < 1e-12);
}

TEST_CASE("external predictions") {
    const auto dir = oracle::scratch_dir("forecast_external");
    const WindowSet w = make_windows(sine(60, 12.0), 10, 4, 5);
    const std::size_t n = w.size();

    text::write_file(dir / "ok.csv", prediction_rows(n, 4));
    const PredictionSet p = load_external_predictions(dir / "ok.csv", w, "zs");
    CHECK(p.size() == n);
    CHECK(p[3][1] == 2.0);

    auto kind = [&](const std::string& file) {
        try {
            load_external_predictions(dir / file, w);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    text::write_file(dir / "missing.csv", prediction_rows(n, 4, 5));
    CHECK(kind("missing.csv") == ErrorKind::IndexMismatch);
    text::write_file(dir / "short.csv", prediction_rows(n, 4, SIZE_MAX, 2));
    CHECK(kind("short.csv") == ErrorKind::LengthMismatch);
    text::write_file(dir / "dup.csv", prediction_rows(n, 4) + "3,1,1,1,1\n");
    CHECK(kind("dup.csv") == ErrorKind::IndexMismatch);
    text::write_file(dir / "bad.csv", prediction_rows(n, 4) + "x,1,1,1,1\n");
    CHECK(kind("bad.csv") == ErrorKind::ParseError);
    CHECK(kind("absent.csv") == ErrorKind::FileNotFound);

    write_predictions(dir / "round.csv", p);
    const PredictionSet back = load_external_predictions(dir / "round.csv", w);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::equal(p[i].begin(), p[i].end(), back[i].begin()));
}
