#include "shapesel/data.hpp"

#include <cmath>
#include <sstream>

#include "shapesel/error.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

TimeSeries::TimeSeries(std::vector<double> values, std::string name, std::string resolution)
    : values_(std::move(values)), name_(std::move(name)), resolution_(std::move(resolution)) {
    if (values_.empty()) {
        throw Error(ErrorKind::InvalidArgument, "time series must hold at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorKind::NonFiniteInput, "non-finite value at position " + std::to_string(i), i);
        }
    }
}

TimeSeries load_series(const std::filesystem::path& path, const std::string& column) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::FileNotFound, "no such file '" + path.string() + "'");
    }
    const std::string contents = text::read_file(path);
    const auto rows = text::lines(contents);
    if (rows.empty()) {
        throw Error(ErrorKind::ColumnMissing, "'" + path.string() + "' has no header row");
    }

    const auto header = text::split(rows.front(), ',');
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto name = text::trim(header[i]);
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
            name = name.substr(1, name.size() - 2);
        }
        if (name == column) {
            col = i;
            break;
        }
    }
    if (col == header.size()) {
        throw Error(ErrorKind::ColumnMissing, "column '" + column + "' not found in '" + path.string() + "'");
    }

    // A trailing empty line is not a data row.
    std::size_t last = rows.size();
    while (last > 1 && text::trim(rows[last - 1]).empty()) {
        --last;
    }

    std::vector<double> values;
    values.reserve(last - 1);
    for (std::size_t r = 1; r < last; ++r) {
        const std::size_t data_row = r - 1;
        const auto fields = text::split(rows[r], ',');
        if (col >= fields.size()) {
            throw Error(ErrorKind::ParseError, "row " + std::to_string(data_row) + " has too few fields", data_row);
        }
        const auto v = text::parse_double(fields[col]);
        if (!v) {
            throw Error(ErrorKind::ParseError,
                        "row " + std::to_string(data_row) + " value '" + std::string(text::trim(fields[col])) +
                            "' is not a finite number",
                        data_row);
        }
        values.push_back(*v);
    }
    if (values.empty()) {
        throw Error(ErrorKind::ParseError, "'" + path.string() + "' has no data rows", 0);
    }
    return TimeSeries(std::move(values), column);
}

SplitSpec SplitSpec::fractions(double train, double val, double test) {
    for (double f : {train, val, test}) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw Error(ErrorKind::ConfigInvalid, "split fractions must lie in [0, 1]");
        }
    }
    if (std::abs(train + val + test - 1.0) > 1e-9) {
        throw Error(ErrorKind::ConfigInvalid, "split fractions must sum to 1");
    }
    SplitSpec s;
    s.uses_fractions_ = true;
    s.train_ = train;
    s.val_ = val;
    s.test_ = test;
    return s;
}

SplitSpec SplitSpec::boundaries(std::size_t train_end, std::size_t val_end) {
    if (!(0 < train_end && train_end < val_end)) {
        throw Error(ErrorKind::ConfigInvalid, "split boundaries must satisfy 0 < train_end < val_end");
    }
    SplitSpec s;
    s.uses_fractions_ = false;
    s.train_end_ = train_end;
    s.val_end_ = val_end;
    return s;
}

SplitSpec SplitSpec::ett_hourly() {
    constexpr std::size_t month = 30 * 24;
    return boundaries(12 * month, 16 * month);
}

SplitSpec SplitSpec::ett_minutely() {
    constexpr std::size_t month = 30 * 24 * 4;
    return boundaries(12 * month, 16 * month);
}

SplitBounds SplitSpec::resolve(std::size_t length) const {
    SplitBounds b;
    b.total = length;
    if (uses_fractions_) {
        // The epsilon keeps e.g. (0.7 + 0.1) * 100 from flooring to 79.
        const double n = static_cast<double>(length);
        const double eps = 1e-9 * std::max(1.0, n);
        b.train_end = static_cast<std::size_t>(std::floor(train_ * n + eps));
        b.val_end = static_cast<std::size_t>(std::floor((train_ + val_) * n + eps));
        b.train_end = std::min(b.train_end, length);
        b.val_end = std::min(std::max(b.val_end, b.train_end), length);
    } else {
        if (val_end_ >= length) {
            throw Error(ErrorKind::SplitTooSmall, "split boundary " + std::to_string(val_end_) +
                                                      " leaves no test data in a series of length " +
                                                      std::to_string(length));
        }
        b.train_end = train_end_;
        b.val_end = val_end_;
    }
    return b;
}

std::string SplitSpec::describe() const {
    std::ostringstream ss;
    if (uses_fractions_) {
        ss << "fractions(" << text::format_double(train_) << "," << text::format_double(val_) << ","
           << text::format_double(test_) << ")";
    } else {
        ss << "boundaries(" << train_end_ << "," << val_end_ << ")";
    }
    return ss.str();
}

namespace {

TimeSeries slice(const TimeSeries& ts, std::size_t begin, std::size_t end, const char* part) {
    const auto v = ts.values();
    std::string name = ts.name().empty() ? std::string(part) : ts.name() + ":" + part;
    return TimeSeries(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(begin),
                                          v.begin() + static_cast<std::ptrdiff_t>(end)),
                      std::move(name), ts.resolution());
}

}  // namespace

SplitSeries split_series(const TimeSeries& ts, const SplitSpec& spec, std::size_t min_length) {
    const SplitBounds b = spec.resolve(ts.size());
    const std::size_t need = std::max<std::size_t>(min_length, 1);
    const std::pair<const char*, std::size_t> parts[] = {
        {"train", b.train_size()}, {"val", b.val_size()}, {"test", b.test_size()}};
    for (const auto& [name, size] : parts) {
        if (size < need) {
            throw Error(ErrorKind::SplitTooSmall, std::string(name) + " split has " + std::to_string(size) +
                                                      " points, needs at least " + std::to_string(need));
        }
    }
    return SplitSeries{slice(ts, 0, b.train_end, "train"), slice(ts, b.train_end, b.val_end, "val"),
                       slice(ts, b.val_end, b.total, "test"), b};
}

std::size_t window_count(std::size_t n, std::size_t sl, std::size_t fl, std::size_t stride) {
    if (stride == 0 || n < sl + fl) {
        return 0;
    }
    return (n - sl - fl) / stride + 1;
}

WindowSet::WindowSet(const TimeSeries& ts, std::size_t sl, std::size_t fl, std::size_t stride)
    : source_(std::make_shared<const std::vector<double>>(ts.values().begin(), ts.values().end())),
      sl_(sl),
      fl_(fl),
      stride_(stride),
      count_(0) {
    if (sl == 0 || fl == 0 || stride == 0) {
        throw Error(ErrorKind::InvalidArgument, "sl, fl and stride must be positive");
    }
    if (ts.size() < sl + fl) {
        throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(ts.size()) +
                                                   " cannot host a window of length " + std::to_string(sl + fl));
    }
    count_ = window_count(ts.size(), sl, fl, stride);
}

std::span<const double> WindowSet::context(std::size_t i) const {
    return std::span<const double>(*source_).subspan(start(i), sl_);
}

std::span<const double> WindowSet::target(std::size_t i) const {
    return std::span<const double>(*source_).subspan(start(i) + sl_, fl_);
}

Window WindowSet::window(std::size_t i) const {
    if (i >= count_) {
        throw Error(ErrorKind::IndexMismatch, "window index " + std::to_string(i) + " out of range");
    }
    return Window{i, start(i), context(i), target(i)};
}

WindowSet make_windows(const TimeSeries& ts, std::size_t sl, std::size_t fl, std::size_t stride) {
    return WindowSet(ts, sl, fl, stride);
}

}  // namespace shapesel
