#pragma once
// Synthetic end-to-end dataset: six weather stations (three targets with
// donor pairs), a flood indicator derived from the generated winters, an
// auxiliary covariate file, scenario forcings and a run configuration.
// Everything is deterministic in the seed.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "icefreq/csv.hpp"
#include "icefreq/date.hpp"
#include "icefreq/firth.hpp"
#include "icefreq/rng.hpp"

namespace testsupport {

struct FixtureOptions {
  int first_year = 1963;
  int last_year = 2020;
  int scenario_last = 2100;
  std::vector<std::string> gcms{"gcm-a", "gcm-b"};
  std::vector<std::string> rcps{"rcp45", "rcp85"};
  std::uint64_t data_seed = 424242;
  std::uint64_t run_seed = 777;
  std::size_t bootstrap_B = 120;
  std::size_t models = 50;
  std::size_t replicates = 60;
  int threads = 2;
  bool inject_gaps = true;
  bool unfillable_gap = false;  // one window day missing from target AND donor
  std::vector<std::string> candidates{"gp_precip_pct", "fv_ddf"};
};

struct Fixture {
  std::filesystem::path dir;
  std::filesystem::path config_path;
  // dates whose gp temperature/precipitation were removed but donor-covered
  std::vector<icefreq::Date> gp_tmean_gaps;
  std::vector<icefreq::Date> gp_precip_gaps;
  int unfillable_year = 0;
};

inline Fixture write_fixture(const std::filesystem::path& dir,
                             const FixtureOptions& opt = {}) {
  using namespace icefreq;
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Fixture fx;
  fx.dir = dir;

  Rng rng(opt.data_seed, rng::kTagTest);

  // per-winter anomalies indexed by breakup year
  std::map<int, double> wet, cold;
  for (int y = opt.first_year - 1; y <= opt.last_year + 1; ++y) {
    wet[y] = 0.7 + 0.6 * rng.u01();   // precipitation multiplier
    cold[y] = 6.0 * (rng.u01() - 0.5);  // additive winter chill, degC
  }

  const Date d0 = make_date(opt.first_year - 1, 7, 1);
  const Date d1 = make_date(opt.last_year, 6, 30);

  auto winter_year = [](Date d) {
    return month_of(d) >= 7 ? year_of(d) + 1 : year_of(d);
  };
  auto base_temp = [&](Date d, double station_offset) {
    const int doy = static_cast<int>(d - make_date(year_of(d), 1, 1)) + 1;
    const double seasonal =
        3.0 + 20.0 * std::cos(2.0 * 3.14159265358979 * (doy - 197) / 365.25);
    return seasonal + station_offset - cold[winter_year(d)];
  };

  struct Day {
    Date date;
    double tmean;
    double precip;
  };
  auto gen_station = [&](double toffset, double pscale, std::uint64_t salt) {
    std::vector<Day> days;
    Rng r(opt.data_seed ^ salt, rng::kTagTest);
    for (Date d = d0; d <= d1; ++d) {
      const double t = base_temp(d, toffset) + 3.0 * (r.u01() - 0.5);
      double p = 0.0;
      if (r.u01() < 0.45) p = pscale * wet[winter_year(d)] * (0.5 + 3.0 * r.u01());
      days.push_back({d, t, p});
    }
    return days;
  };

  const auto gp = gen_station(0.0, 1.0, 0x67);
  const auto bl = gen_station(1.5, 1.05, 0x62);
  const auto fv = gen_station(-3.0, 0.8, 0x66);
  const auto hl = gen_station(-1.8, 0.8, 0x68);
  const auto fc = gen_station(-5.0, 0.7, 0x63);
  const auto fsm = gen_station(-4.2, 0.7, 0x73);

  // choose gp gap dates (donor-covered) and optionally one unfillable day
  std::map<std::int32_t, int> gp_gap;  // serial -> 1 tmean, 2 precip, 3 unfillable
  if (opt.inject_gaps) {
    Rng gr(opt.data_seed ^ 0x9a9a, rng::kTagTest);
    for (const auto& day : gp) {
      const double u = gr.u01();
      if (u < 0.015) {
        gp_gap[day.date.serial] = 1;
        fx.gp_tmean_gaps.push_back(day.date);
      } else if (u < 0.03) {
        gp_gap[day.date.serial] = 2;
        fx.gp_precip_gaps.push_back(day.date);
      }
    }
  }
  if (opt.unfillable_gap) {
    fx.unfillable_year = opt.first_year + 3;
    const Date bad = make_date(fx.unfillable_year, 1, 20);
    gp_gap[bad.serial] = 3;
  }

  auto write_station = [&](const std::string& id, const std::vector<Day>& days,
                           const std::map<std::int32_t, int>* gaps) {
    std::string s = "station_id,date,tmean_c,precip_mm\n";
    for (const auto& day : days) {
      int g = 0;
      if (gaps) {
        const auto it = gaps->find(day.date.serial);
        if (it != gaps->end()) g = it->second;
      }
      s += id + ',' + to_string(day.date) + ',';
      if (g != 1 && g != 3) s += csv::format_full(day.tmean);
      s += ',';
      if (g != 2 && g != 3) s += csv::format_full(day.precip);
      s += '\n';
    }
    csv::write_file(dir / (id + ".csv"), s);
  };
  write_station("gp", gp, &gp_gap);
  // the unfillable day is missing from the donor as well
  std::map<std::int32_t, int> bl_gap;
  if (opt.unfillable_gap)
    bl_gap[make_date(fx.unfillable_year, 1, 20).serial] = 3;
  write_station("bl", bl, opt.unfillable_gap ? &bl_gap : nullptr);
  write_station("fv", fv, nullptr);
  write_station("hl", hl, nullptr);
  write_station("fc", fc, nullptr);
  write_station("fs", fsm, nullptr);

  // flood indicator driven by the winter anomalies
  {
    Rng fr(opt.data_seed ^ 0xF100D, rng::kTagTest);
    std::string s = "year,flood\n";
    for (int y = opt.first_year; y <= opt.last_year; ++y) {
      const double eta = -2.6 + 4.5 * (wet[y] - 1.0) + 0.45 * cold[y];
      s += std::to_string(y) + ',' +
           (fr.bernoulli(icefreq::logistic(eta)) ? "1" : "0") + '\n';
    }
    csv::write_file(dir / "floods.csv", s);
  }

  // auxiliary covariates with a few missing rows
  {
    Rng ar(opt.data_seed ^ 0xA0C, rng::kTagTest);
    std::string s = "year,freezeup_elev,hh_nov_flow\n";
    for (int y = opt.first_year; y <= opt.last_year; ++y) {
      s += std::to_string(y) + ',';
      if (ar.u01() > 0.08) s += csv::format_full(213.0 + 1.5 * ar.normal());
      s += ',';
      s += csv::format_full(1700.0 + 250.0 * ar.normal());
      s += '\n';
    }
    csv::write_file(dir / "aux.csv", s);
  }

  // scenario forcings in model units (percent precip, z-scored DDF)
  {
    Rng sr(opt.data_seed ^ 0x5CE2, rng::kTagTest);
    std::string s = "gcm,rcp,year,gp_precip_pct,fv_ddf,fc_ddf\n";
    s += "# scaling=precip=percent;ddf=zscore\n";
    for (const auto& gcm : opt.gcms) {
      const double wet_drift = 0.25 * (sr.u01() - 0.4);
      const double warm_rate = 1.5 + 2.0 * sr.u01();
      for (const auto& rcp : opt.rcps) {
        const double rcp_factor = rcp == "rcp85" ? 1.6 : 0.9;
        for (int y = opt.last_year + 1; y <= opt.scenario_last; ++y) {
          const double frac = static_cast<double>(y - opt.last_year) /
                              static_cast<double>(opt.scenario_last - opt.last_year);
          const double precip = 1.0 + wet_drift * frac + 0.10 * sr.normal();
          const double ddf = -warm_rate * rcp_factor * frac + 0.35 * sr.normal();
          s += gcm + ',' + rcp + ',' + std::to_string(y) + ',' +
               csv::format_full(precip) + ',' + csv::format_full(ddf) + ',' +
               csv::format_full(ddf + 0.2 * sr.normal()) + '\n';
        }
      }
    }
    csv::write_file(dir / "scenarios.csv", s);
  }

  // run configuration
  {
    std::string cands = "[";
    for (std::size_t i = 0; i < opt.candidates.size(); ++i)
      cands += (i ? ", " : "") + std::string("\"") + opt.candidates[i] + "\"";
    cands += "]";
    std::string s = R"({
  "stations": {
    "gp": {"csv": "gp.csv", "donor_csv": "bl.csv"},
    "fv": {"csv": "fv.csv", "donor_csv": "hl.csv"},
    "fc": {"csv": "fc.csv", "donor_csv": "fs.csv"}
  },
  "floods_csv": "floods.csv",
  "aux_csv": "aux.csv",
  "years": {"first": )" + std::to_string(opt.first_year) +
                    R"(, "last": )" + std::to_string(opt.last_year) +
                    R"(, "excluded": [1968, 1969, 1970, 1971]},
  "window": {"start": [11, 1], "end": [4, 30]},
  "scaling": {"precip": "percent", "ddf": "zscore"},
  "candidates": )" + cands + R"(,
  "bootstrap": {"B": )" + std::to_string(opt.bootstrap_B) + R"(, "ci_level": 0.95},
  "projection": {
    "models": )" + std::to_string(opt.models) + R"(,
    "replicates_per_model": )" + std::to_string(opt.replicates) + R"(,
    "ma_window": 20,
    "quantiles": [0.025, 0.25, 0.5, 0.75, 0.975],
    "reference_years": [2030, 2050],
    "scenarios": ["scenarios.csv"]
  },
  "seed": )" + std::to_string(opt.run_seed) + R"(,
  "threads": )" + std::to_string(opt.threads) + R"(
}
)";
    fx.config_path = dir / "config.json";
    csv::write_file(fx.config_path, s);
  }
  return fx;
}

}  // namespace testsupport
