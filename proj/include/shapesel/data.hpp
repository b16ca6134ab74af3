#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace shapesel {

/// Univariate series. Construction rejects empty input and non-finite values.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values, std::string name = {}, std::string resolution = {});

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::string& name() const noexcept { return name_; }
    const std::string& resolution() const noexcept { return resolution_; }

private:
    std::vector<double> values_;
    std::string name_;
    std::string resolution_;
};

/// Reads one named numeric column from a CSV file with a header row.
/// Data rows are indexed from 0 in ParseError reports.
TimeSeries load_series(const std::filesystem::path& path, const std::string& column);

struct SplitBounds {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    std::size_t total = 0;

    std::size_t train_size() const { return train_end; }
    std::size_t val_size() const { return val_end - train_end; }
    std::size_t test_size() const { return total - val_end; }
};

/// Either three fractions summing to one, or explicit train/val end indices
/// (the test split always runs to the end of the series).
class SplitSpec {
public:
    static SplitSpec fractions(double train, double val, double test);
    static SplitSpec boundaries(std::size_t train_end, std::size_t val_end);
    /// 12/4 months of hourly data for train/val; the remainder is test.
    static SplitSpec ett_hourly();
    /// 12/4 months of 15-minute data for train/val; the remainder is test.
    static SplitSpec ett_minutely();
    static SplitSpec default_fractions() { return fractions(0.7, 0.1, 0.2); }

    bool uses_fractions() const noexcept { return uses_fractions_; }
    double train_fraction() const noexcept { return train_; }
    double val_fraction() const noexcept { return val_; }
    double test_fraction() const noexcept { return test_; }

    SplitBounds resolve(std::size_t length) const;
    std::string describe() const;

private:
    SplitSpec() = default;

    bool uses_fractions_ = true;
    double train_ = 0.7;
    double val_ = 0.1;
    double test_ = 0.2;
    std::size_t train_end_ = 0;
    std::size_t val_end_ = 0;
};

struct SplitSeries {
    TimeSeries train;
    TimeSeries val;
    TimeSeries test;
    SplitBounds bounds;
};

/// Contiguous, order-preserving split. Every part must hold at least
/// `min_length` points (sl + fl), otherwise SplitTooSmall.
SplitSeries split_series(const TimeSeries& ts, const SplitSpec& spec, std::size_t min_length);

struct Window {
    std::size_t index;
    std::size_t start;
    std::span<const double> context;
    std::span<const double> target;
};

/// Fixed-geometry sliding windows over one split. Windows are views into a
/// shared copy of the source values, so copies of a WindowSet are cheap.
class WindowSet {
public:
    WindowSet(const TimeSeries& ts, std::size_t sl, std::size_t fl, std::size_t stride);

    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::size_t context_length() const noexcept { return sl_; }
    std::size_t horizon() const noexcept { return fl_; }
    std::size_t stride() const noexcept { return stride_; }

    std::size_t start(std::size_t i) const { return i * stride_; }
    std::span<const double> context(std::size_t i) const;
    std::span<const double> target(std::size_t i) const;
    Window window(std::size_t i) const;
    std::span<const double> source() const noexcept { return *source_; }

private:
    std::shared_ptr<const std::vector<double>> source_;
    std::size_t sl_;
    std::size_t fl_;
    std::size_t stride_;
    std::size_t count_;
};

WindowSet make_windows(const TimeSeries& ts, std::size_t sl, std::size_t fl, std::size_t stride);

/// floor((n - sl - fl) / stride) + 1, or 0 when n < sl + fl.
std::size_t window_count(std::size_t n, std::size_t sl, std::size_t fl, std::size_t stride);

}  // namespace shapesel
