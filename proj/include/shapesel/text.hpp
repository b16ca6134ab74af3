#pragma once

// Small text helpers shared by the CSV readers/writers and the run-config
// parser. Number formatting is shortest round-trip so emitted files are
// byte-stable for a given value.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shapesel::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);

/// Parses a full field as a finite double; nullopt on empty/garbage/non-finite.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

std::string join(std::span<const double> values, char sep = ',');

/// Reads a whole file; throws Error(FileNotFound) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes a whole file; throws Error(IoError) on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits file contents into lines, tolerating CRLF and a trailing newline.
std::vector<std::string_view> lines(std::string_view contents);

}  // namespace shapesel::text
