#pragma once
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace icefreq::csv {

// Minimal CSV handling for the plain numeric tables this project reads and
// writes: comma separated, no quoting, empty field = missing.

std::vector<std::string> split_line(const std::string& line);

// All lines of a file, stripped of trailing '\r'; throws Error when the file
// cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::optional<double> parse_optional_double(const std::string& field,
                                            const std::string& context);
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

// Shortest representation that round-trips exactly (machine artifacts).
std::string format_full(double v);
// 6 significant digits (human-facing report tables).
std::string format_g6(double v);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace icefreq::csv
