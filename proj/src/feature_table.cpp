#include "icefreq/feature_table.hpp"

#include <algorithm>
#include <sstream>

#include "icefreq/csv.hpp"
#include "icefreq/error.hpp"

namespace icefreq {

std::size_t FeatureTable::col_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("feature table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool FeatureTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

void FeatureTable::add_column(const std::string& name,
                              std::vector<std::optional<double>> vals) {
  if (vals.size() != n_rows()) throw Error("feature table: column length mismatch");
  if (has_column(name)) throw Error("feature table: duplicate column '" + name + "'");
  columns.push_back(name);
  values.push_back(std::move(vals));
}

std::vector<std::size_t> FeatureTable::complete_rows(
    std::span<const std::string> cols) const {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < n_rows(); ++r) {
    bool ok = true;
    for (const auto& c : cols)
      if (!values[col_index(c)][r]) {
        ok = false;
        break;
      }
    if (ok) idx.push_back(r);
  }
  return idx;
}

DesignMatrix FeatureTable::design(std::span<const std::string> cols,
                                  std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> covs(cols.size());
  std::vector<std::string> names(cols.begin(), cols.end());
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(flood[r]);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& col = values[col_index(cols[j])];
    covs[j].reserve(rows.size());
    for (std::size_t r : rows) {
      if (!col[r])
        throw Error("feature table: column '" + cols[j] + "' missing in year " +
                    std::to_string(years[r]));
      covs[j].push_back(*col[r]);
    }
  }
  return DesignMatrix::build(std::move(names), covs, std::move(y));
}

void FeatureTable::to_csv(const std::filesystem::path& path) const {
  std::ostringstream os;
  os << "breakup_year";
  for (const auto& c : columns) os << ',' << c;
  os << ",flood\n";
  for (std::size_t r = 0; r < n_rows(); ++r) {
    os << years[r];
    for (std::size_t j = 0; j < columns.size(); ++j) {
      os << ',';
      if (values[j][r]) os << csv::format_full(*values[j][r]);
    }
    os << ',' << flood[r] << "\n";
  }
  csv::write_file(path, os.str());
}

FeatureTable FeatureTable::from_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error("feature table csv: empty file " + path.string());
  const auto header = csv::split_line(lines[0]);
  if (header.size() < 2 || header.front() != "breakup_year" || header.back() != "flood")
    throw Error("feature table csv: header must be breakup_year,<covariates>,flood");
  FeatureTable t;
  t.columns.assign(header.begin() + 1, header.end() - 1);
  t.values.resize(t.columns.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = csv::split_line(lines[li]);
    const std::string ctx = path.string() + ":" + std::to_string(li + 1);
    if (f.size() != header.size())
      throw Error("feature table csv: wrong field count (" + ctx + ")");
    t.years.push_back(static_cast<int>(csv::parse_long(f.front(), ctx)));
    const long fl = csv::parse_long(f.back(), ctx);
    if (fl != 0 && fl != 1) throw Error("feature table csv: flood must be 0/1 (" + ctx + ")");
    t.flood.push_back(static_cast<int>(fl));
    for (std::size_t j = 0; j < t.columns.size(); ++j)
      t.values[j].push_back(csv::parse_optional_double(f[j + 1], ctx));
  }
  return t;
}

}  // namespace icefreq
