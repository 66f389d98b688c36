#include "icefreq/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "icefreq/error.hpp"

namespace icefreq::csv {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::optional<double> parse_optional_double(const std::string& field,
                                            const std::string& context) {
  if (field.empty()) return std::nullopt;
  return parse_double(field, context);
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw Error("bad numeric field '" + field + "' (" + context + ")");
  return v;
}

long parse_long(const std::string& field, const std::string& context) {
  long v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw Error("bad integer field '" + field + "' (" + context + ")");
  return v;
}

std::string format_full(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("to_chars failed");
  return std::string(buf, ptr);
}

std::string format_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
  if (!out) throw Error("short write: " + path.string());
}

}  // namespace icefreq::csv
