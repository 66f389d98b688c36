#include "icefreq/station_io.hpp"

#include <sstream>

#include "icefreq/csv.hpp"
#include "icefreq/error.hpp"

namespace icefreq {

StationSeries load_station_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error("station csv: empty file " + path.string());
  if (lines[0] != "station_id,date,tmean_c,precip_mm")
    throw Error("station csv: bad header in " + path.string() +
                " (expected station_id,date,tmean_c,precip_mm)");
  std::string id;
  std::vector<DailyRecord> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(li + 1);
    const auto f = csv::split_line(lines[li]);
    if (f.size() != 4) throw Error("station csv: expected 4 fields (" + ctx + ")");
    if (id.empty()) id = f[0];
    else if (id != f[0])
      throw Error("station csv: mixed station ids '" + id + "' and '" + f[0] +
                  "' (" + ctx + ")");
    DailyRecord r;
    try {
      r.date = parse_date(f[1]);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (" + ctx + ")");
    }
    r.tmean = csv::parse_optional_double(f[2], ctx);
    r.precip = csv::parse_optional_double(f[3], ctx);
    if (r.precip && *r.precip < 0)
      throw Error("station csv: negative precipitation (" + ctx + ")");
    if (!records.empty() && !(records.back().date < r.date))
      throw Error("station csv: duplicate or out-of-order date " + f[1] + " (" + ctx + ")");
    records.push_back(r);
  }
  return StationSeries(id, std::move(records));
}

void save_station_csv(const std::filesystem::path& path, const StationSeries& s) {
  std::ostringstream os;
  os << "station_id,date,tmean_c,precip_mm\n";
  for (const auto& r : s.records()) {
    os << s.station_id() << ',' << to_string(r.date) << ',';
    if (r.tmean) os << csv::format_full(*r.tmean);
    os << ',';
    if (r.precip) os << csv::format_full(*r.precip);
    os << "\n";
  }
  csv::write_file(path, os.str());
}

std::map<int, int> load_flood_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines[0] != "year,flood")
    throw Error("flood csv: header must be year,flood in " + path.string());
  std::map<int, int> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(li + 1);
    const auto f = csv::split_line(lines[li]);
    if (f.size() != 2) throw Error("flood csv: expected 2 fields (" + ctx + ")");
    const int year = static_cast<int>(csv::parse_long(f[0], ctx));
    const long flood = csv::parse_long(f[1], ctx);
    if (flood != 0 && flood != 1) throw Error("flood csv: flood must be 0/1 (" + ctx + ")");
    if (!out.emplace(year, static_cast<int>(flood)).second)
      throw Error("flood csv: duplicate year " + std::to_string(year) + " (" + ctx + ")");
  }
  return out;
}

AuxTable load_aux_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error("aux csv: empty file " + path.string());
  const auto header = csv::split_line(lines[0]);
  if (header.size() < 2 || header[0] != "year")
    throw Error("aux csv: header must be year,<covariates> in " + path.string());
  AuxTable t;
  t.columns.assign(header.begin() + 1, header.end());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(li + 1);
    const auto f = csv::split_line(lines[li]);
    if (f.size() != header.size()) throw Error("aux csv: wrong field count (" + ctx + ")");
    const int year = static_cast<int>(csv::parse_long(f[0], ctx));
    std::vector<std::optional<double>> row;
    for (std::size_t j = 1; j < f.size(); ++j)
      row.push_back(csv::parse_optional_double(f[j], ctx));
    if (!t.rows.emplace(year, std::move(row)).second)
      throw Error("aux csv: duplicate year (" + ctx + ")");
  }
  return t;
}

}  // namespace icefreq
