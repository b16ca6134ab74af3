#include "shapesel/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shapesel/error.hpp"

namespace shapesel::text {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = line.find(sep, begin);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(begin));
            break;
        }
        out.push_back(line.substr(begin, pos - begin));
        begin = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view field) {
    field = trim(field);
    if (field.empty()) {
        return std::nullopt;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_int(std::string_view field) {
    field = trim(field);
    if (field.empty()) {
        return std::nullopt;
    }
    long long value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, ptr);
}

std::string join(std::span<const double> values, char sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += format_double(values[i]);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error(ErrorKind::IoError, "short write to '" + path.string() + "'");
    }
}

std::vector<std::string_view> lines(std::string_view contents) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (begin < contents.size()) {
        auto pos = contents.find('\n', begin);
        if (pos == std::string_view::npos) {
            pos = contents.size();
        }
        auto line = contents.substr(begin, pos - begin);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        out.push_back(line);
        begin = pos + 1;
    }
    return out;
}

}  // namespace shapesel::text
