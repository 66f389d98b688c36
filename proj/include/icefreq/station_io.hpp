#pragma once
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "icefreq/series.hpp"

namespace icefreq {

// Daily weather CSV: header station_id,date,tmean_c,precip_mm; ISO-8601
// dates; empty field = missing. Malformed rows are rejected with their line
// number; duplicate dates and negative precipitation are errors.
StationSeries load_station_csv(const std::filesystem::path& path);

void save_station_csv(const std::filesystem::path& path, const StationSeries& s);

// Flood indicator CSV: header year,flood with flood in {0,1}.
std::map<int, int> load_flood_csv(const std::filesystem::path& path);

// Auxiliary annual covariates: header year,<name>,... ; empty = missing.
struct AuxTable {
  std::vector<std::string> columns;
  std::map<int, std::vector<std::optional<double>>> rows;
};
AuxTable load_aux_csv(const std::filesystem::path& path);

}  // namespace icefreq
