#pragma once
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icefreq/firth.hpp"

namespace icefreq {

// One covariate row per breakup year plus the flood indicator. Optional
// covariates may be missing on some rows; models drop rows only when they
// actually use an incomplete column.
struct FeatureTable {
  std::vector<int> years;
  std::vector<int> flood;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> values;  // [column][row]

  std::size_t n_rows() const { return years.size(); }
  std::size_t col_index(const std::string& name) const;
  bool has_column(const std::string& name) const;
  void add_column(const std::string& name, std::vector<std::optional<double>> vals);

  // Rows (indices) on which every listed column is present.
  std::vector<std::size_t> complete_rows(std::span<const std::string> cols) const;

  // Design matrix over the given rows with the listed covariates.
  DesignMatrix design(std::span<const std::string> cols,
                      std::span<const std::size_t> rows) const;

  // CSV: header breakup_year,<columns...>,flood; empty field = missing.
  // Values are written in full precision so a load reproduces the table
  // exactly.
  void to_csv(const std::filesystem::path& path) const;
  static FeatureTable from_csv(const std::filesystem::path& path);
};

}  // namespace icefreq
