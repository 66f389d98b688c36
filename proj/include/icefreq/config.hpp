#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "icefreq/series.hpp"

namespace icefreq {

struct StationRole {
  std::filesystem::path csv;
  std::optional<std::filesystem::path> donor_csv;
};

// Full run configuration; loaded from a JSON file. Defaults mirror the
// analysis this tool reproduces: Nov-Apr window, 1968-1971 excluded,
// B = 1000 bootstrap replicates, 1000 models x 1000 replicates projected,
// 20-year corridor window, {2.5, 25, 50, 75, 97.5}% quantiles.
struct RunConfig {
  StationRole gp, fv, fc;  // precipitation/melt station and two temperature stations
  std::filesystem::path floods_csv;
  std::optional<std::filesystem::path> aux_csv;

  MonthDay window_start{11, 1};
  MonthDay window_end{4, 30};
  int first_year = 0, last_year = 0;
  std::vector<int> excluded_years{1968, 1969, 1970, 1971};

  std::string precip_scaling = "percent";  // percent | zscore
  std::string ddf_scaling = "zscore";      // percent | zscore
  std::string melt_station = "gp";

  std::vector<std::string> candidates;        // stepwise order; default: all columns
  std::vector<std::string> selection_base;    // rows complete on these define the
                                              // analysis set; default: combination pair
  std::vector<std::string> model_covariates;  // fit stage fallback when select not run
  std::string combination_precip = "gp_precip_pct";
  std::string combination_ddf = "fv_ddf";

  std::size_t bootstrap_B = 1000;
  double ci_level = 0.95;

  std::size_t models = 1000;
  std::size_t replicates_per_model = 1000;
  std::size_t ma_window = 20;
  std::vector<double> quantile_levels{0.025, 0.25, 0.5, 0.75, 0.975};
  std::vector<int> reference_years{2030, 2050};
  std::vector<std::filesystem::path> scenario_csvs;
  bool include_historical = true;
  bool dump_sequences = false;
  std::optional<std::filesystem::path> ensemble_csv;  // reuse a frozen ensemble

  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = hardware concurrency

  std::string scaling_tag() const { return "precip=" + precip_scaling + ";ddf=" + ddf_scaling; }

  std::string raw_text;  // config file bytes, hashed into the manifest
};

RunConfig load_config(const std::filesystem::path& path);

// FNV-1a 64 over the raw config text (plus any seed override), hex encoded.
std::string config_hash(const RunConfig& c);

}  // namespace icefreq
