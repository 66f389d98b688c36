#pragma once
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "icefreq/date.hpp"
#include "icefreq/rng.hpp"
#include "icefreq/series.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
    dir_ = std::filesystem::temp_directory_path() /
           ("icefreq_" + tag + "_" + std::to_string(++counter) + "_" +
            std::to_string(static_cast<unsigned long long>(now)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Complete daily series with constant temperature and precipitation over a
// date range (inclusive).
inline icefreq::StationSeries constant_series(const std::string& id,
                                              icefreq::Date first, icefreq::Date last,
                                              double tmean, double precip) {
  std::vector<icefreq::DailyRecord> recs;
  for (icefreq::Date d = first; d <= last; ++d) recs.push_back({d, tmean, precip});
  return icefreq::StationSeries(id, std::move(recs));
}

}  // namespace testsupport
