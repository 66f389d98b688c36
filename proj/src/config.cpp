#include "icefreq/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icefreq/error.hpp"

namespace icefreq {

using nlohmann::json;

namespace {

MonthDay parse_month_day(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2)
    throw Error(std::string("config: ") + what + " must be [month, day]");
  return MonthDay{j[0].get<unsigned>(), j[1].get<unsigned>()};
}

StationRole parse_station(const json& j, const std::filesystem::path& base,
                          const char* role) {
  if (!j.contains("csv")) throw Error(std::string("config: stations.") + role + ".csv missing");
  StationRole s;
  s.csv = base / j.at("csv").get<std::string>();
  if (j.contains("donor_csv")) s.donor_csv = base / j.at("donor_csv").get<std::string>();
  return s;
}

void check_scaling(const std::string& s, const char* what) {
  if (s != "percent" && s != "zscore")
    throw Error(std::string("config: ") + what + " must be 'percent' or 'zscore', got '" + s + "'");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();

  RunConfig c;
  c.raw_text = buf.str();
  json j;
  try {
    j = json::parse(c.raw_text);
  } catch (const json::exception& e) {
    throw Error("config parse error in " + path.string() + ": " + e.what());
  }

  // relative paths resolve against the config file's directory
  const std::filesystem::path base = path.parent_path();

  try {
    const json& st = j.at("stations");
    c.gp = parse_station(st.at("gp"), base, "gp");
    c.fv = parse_station(st.at("fv"), base, "fv");
    c.fc = parse_station(st.at("fc"), base, "fc");
    c.floods_csv = base / j.at("floods_csv").get<std::string>();
    if (j.contains("aux_csv")) c.aux_csv = base / j.at("aux_csv").get<std::string>();

    const json& yrs = j.at("years");
    c.first_year = yrs.at("first").get<int>();
    c.last_year = yrs.at("last").get<int>();
    if (yrs.contains("excluded")) c.excluded_years = yrs.at("excluded").get<std::vector<int>>();

    if (j.contains("window")) {
      c.window_start = parse_month_day(j.at("window").at("start"), "window.start");
      c.window_end = parse_month_day(j.at("window").at("end"), "window.end");
    }
    if (j.contains("scaling")) {
      const json& sc = j.at("scaling");
      if (sc.contains("precip")) c.precip_scaling = sc.at("precip").get<std::string>();
      if (sc.contains("ddf")) c.ddf_scaling = sc.at("ddf").get<std::string>();
    }
    check_scaling(c.precip_scaling, "scaling.precip");
    check_scaling(c.ddf_scaling, "scaling.ddf");
    if (j.contains("melt_station")) c.melt_station = j.at("melt_station").get<std::string>();
    if (c.melt_station != "gp" && c.melt_station != "fv" && c.melt_station != "fc")
      throw Error("config: melt_station must be gp, fv or fc, got '" + c.melt_station + "'");

    if (j.contains("candidates")) c.candidates = j.at("candidates").get<std::vector<std::string>>();
    if (j.contains("selection_base"))
      c.selection_base = j.at("selection_base").get<std::vector<std::string>>();
    if (j.contains("model_covariates"))
      c.model_covariates = j.at("model_covariates").get<std::vector<std::string>>();
    if (j.contains("combination")) {
      const json& cb = j.at("combination");
      if (cb.contains("precip")) c.combination_precip = cb.at("precip").get<std::string>();
      if (cb.contains("ddf")) c.combination_ddf = cb.at("ddf").get<std::string>();
    }

    if (j.contains("bootstrap")) {
      const json& b = j.at("bootstrap");
      if (b.contains("B")) c.bootstrap_B = b.at("B").get<std::size_t>();
      if (b.contains("ci_level")) c.ci_level = b.at("ci_level").get<double>();
    }

    if (j.contains("projection")) {
      const json& p = j.at("projection");
      if (p.contains("models")) c.models = p.at("models").get<std::size_t>();
      if (p.contains("replicates_per_model"))
        c.replicates_per_model = p.at("replicates_per_model").get<std::size_t>();
      if (p.contains("ma_window")) c.ma_window = p.at("ma_window").get<std::size_t>();
      if (p.contains("quantiles"))
        c.quantile_levels = p.at("quantiles").get<std::vector<double>>();
      if (p.contains("reference_years"))
        c.reference_years = p.at("reference_years").get<std::vector<int>>();
      if (p.contains("scenarios"))
        for (const auto& s : p.at("scenarios"))
          c.scenario_csvs.push_back(base / s.get<std::string>());
      if (p.contains("include_historical"))
        c.include_historical = p.at("include_historical").get<bool>();
      if (p.contains("dump_sequences"))
        c.dump_sequences = p.at("dump_sequences").get<bool>();
      if (p.contains("ensemble_csv"))
        c.ensemble_csv = base / p.at("ensemble_csv").get<std::string>();
    }

    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw Error("config error in " + path.string() + ": " + e.what());
  }

  if (c.first_year == 0 || c.last_year == 0 || c.first_year > c.last_year)
    throw Error("config: years.first/years.last invalid");
  return c;
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto eat = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  };
  eat(c.raw_text);
  if (c.seed) eat("seed=" + std::to_string(*c.seed));
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace icefreq
