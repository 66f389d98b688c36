#include "icefreq/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "icefreq/stats.hpp"

#include <json.hpp>

#include "icefreq/bootstrap.hpp"
#include "icefreq/csv.hpp"
#include "icefreq/feature_table.hpp"
#include "icefreq/features.hpp"
#include "icefreq/firth.hpp"
#include "icefreq/parallel.hpp"
#include "icefreq/projection.hpp"
#include "icefreq/rng.hpp"
#include "icefreq/selection.hpp"
#include "icefreq/station_io.hpp"

namespace icefreq {

using nlohmann::json;
namespace fs = std::filesystem;

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::features: return "features";
    case Stage::select: return "select";
    case Stage::fit: return "fit";
    case Stage::bootstrap: return "bootstrap";
    case Stage::project: return "project";
    case Stage::report: return "report";
  }
  return "?";
}

std::vector<Stage> parse_stages(const std::string& comma_list) {
  std::vector<Stage> out;
  std::istringstream ss(comma_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    bool found = false;
    for (Stage s : {Stage::features, Stage::select, Stage::fit, Stage::bootstrap,
                    Stage::project, Stage::report})
      if (stage_name(s) == tok) {
        out.push_back(s);
        found = true;
      }
    if (!found) throw Error("unknown stage '" + tok + "'");
  }
  return out;
}

namespace {

struct ProvenanceRow {
  std::string station, field;
  Date date;
  double value;
};

struct WaitRecord {
  std::string gcm, rcp;
  int reference_year;
  KmMedian median;
  double censored_fraction;
};

struct Context {
  explicit Context(const RunConfig& c) : cfg(c) {}

  const RunConfig& cfg;
  fs::path out;
  int threads = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;

  std::optional<FeatureTable> features;   // analysis rows (exclusions dropped)
  std::optional<FeatureTable> all_years;  // every computable year, for forcing
  std::optional<SelectionPath> path;
  std::optional<FittedModel> model;
  std::optional<DesignMatrix> design;
  std::optional<BootstrapEnsemble> ensemble;
  std::vector<WaitRecord> waits;
};

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

void require_seed(const Context& ctx, const char* stage) {
  if (!ctx.has_seed)
    throw Error(std::string(stage) + " is stochastic and needs an explicit seed "
                "(config key 'seed' or --seed)");
}

// ---------------------------------------------------------------- features

void scale_column(std::vector<std::optional<double>>& analysis,
                  std::vector<std::optional<double>>& all_years,
                  const std::string& mode, const std::string& name) {
  std::vector<double> baseline;
  for (const auto& v : analysis)
    if (v) baseline.push_back(*v);
  if (baseline.size() < 2)
    throw Error("column '" + name + "': fewer than 2 values to scale against");
  const double m = mean(baseline);
  double denom;
  if (mode == "percent") {
    if (m == 0) throw Error("column '" + name + "': zero baseline mean");
    for (auto& v : analysis)
      if (v) v = *v / m;
    for (auto& v : all_years)
      if (v) v = *v / m;
    return;
  }
  denom = sample_sd(baseline);
  if (denom == 0) throw Error("column '" + name + "': zero baseline variance");
  for (auto& v : analysis)
    if (v) v = (*v - m) / denom;
  for (auto& v : all_years)
    if (v) v = (*v - m) / denom;
}

void stage_features(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<ProvenanceRow> provenance;
  std::vector<std::string> incomplete;  // "year,column,reason"

  auto load_filled = [&](const StationRole& role, bool fill_precip_too)
      -> StationSeries {
    StationSeries s = load_station_csv(role.csv);
    if (!role.donor_csv) return s;
    const StationSeries donor = load_station_csv(*role.donor_csv);
    if (fill_precip_too) {
      FillResult fr = fill_gaps_precip(s, donor);
      for (const auto& f : fr.filled)
        provenance.push_back({s.station_id(), "precip_mm", f.date, f.value});
      s = std::move(fr.series);
    }
    FillResult ft = fill_gaps_temperature(s, donor);
    for (const auto& f : ft.filled)
      provenance.push_back({s.station_id(), "tmean_c", f.date, f.value});
    return std::move(ft.series);
  };

  const StationSeries gp = load_filled(cfg.gp, /*fill_precip_too=*/true);
  const StationSeries fv = load_filled(cfg.fv, false);
  const StationSeries fc = load_filled(cfg.fc, false);
  const StationSeries& melt_series =
      cfg.melt_station == "fv" ? fv : (cfg.melt_station == "fc" ? fc : gp);

  const std::map<int, int> floods = load_flood_csv(cfg.floods_csv);
  AuxTable aux;
  if (cfg.aux_csv) aux = load_aux_csv(*cfg.aux_csv);

  std::vector<int> years_all;
  for (int y = cfg.first_year; y <= cfg.last_year; ++y) years_all.push_back(y);

  auto compute_column = [&](const std::string& name, auto&& fn) {
    std::vector<std::optional<double>> col;
    for (int y : years_all) {
      try {
        col.push_back(fn(y));
      } catch (const Error& e) {
        std::string reason = e.what();
        std::replace(reason.begin(), reason.end(), ',', ';');
        incomplete.push_back(std::to_string(y) + "," + name + "," + reason);
        col.push_back(std::nullopt);
      }
    }
    return col;
  };

  auto gp_precip_all = compute_column("gp_precip_pct", [&](int y) {
    return winter_precip(gp, make_season_window(y, cfg.window_start, cfg.window_end));
  });
  auto fv_ddf_all = compute_column("fv_ddf", [&](int y) {
    return degree_days_freezing(fv, make_season_window(y, cfg.window_start, cfg.window_end));
  });
  auto fc_ddf_all = compute_column("fc_ddf", [&](int y) {
    return degree_days_freezing(fc, make_season_window(y, cfg.window_start, cfg.window_end));
  });
  auto melt_col = compute_column("melt_test", [&](int y) -> std::optional<double> {
    return melt_test(melt_series, y);  // nullopt = undefined, not an error
  });

  auto is_excluded = [&](int y) {
    return std::find(cfg.excluded_years.begin(), cfg.excluded_years.end(), y) !=
           cfg.excluded_years.end();
  };

  FeatureTable analysis, all;
  for (std::size_t i = 0; i < years_all.size(); ++i) {
    const int y = years_all[i];
    all.years.push_back(y);
    const auto fit = floods.find(y);
    all.flood.push_back(fit == floods.end() ? 0 : fit->second);
    if (is_excluded(y)) continue;
    if (fit == floods.end())
      throw Error("flood indicator missing for analysis year " + std::to_string(y));
    analysis.years.push_back(y);
    analysis.flood.push_back(fit->second);
  }

  auto add_split = [&](const std::string& name, std::vector<std::optional<double>> col_all) {
    std::vector<std::optional<double>> col_analysis;
    for (std::size_t i = 0; i < years_all.size(); ++i)
      if (!is_excluded(years_all[i])) col_analysis.push_back(col_all[i]);
    analysis.add_column(name, std::move(col_analysis));
    all.add_column(name, std::move(col_all));
  };
  add_split("gp_precip_pct", std::move(gp_precip_all));
  add_split("fv_ddf", std::move(fv_ddf_all));
  add_split("fc_ddf", std::move(fc_ddf_all));
  add_split("melt_test", std::move(melt_col));
  for (std::size_t j = 0; j < aux.columns.size(); ++j) {
    std::vector<std::optional<double>> col;
    for (int y : years_all) {
      const auto it = aux.rows.find(y);
      col.push_back(it == aux.rows.end() ? std::nullopt : it->second[j]);
    }
    add_split(aux.columns[j], std::move(col));
  }

  // scale against the analysis rows; the all-years table shares the same
  // baseline so projections stay in model units
  scale_column(analysis.values[analysis.col_index("gp_precip_pct")],
               all.values[all.col_index("gp_precip_pct")], cfg.precip_scaling,
               "gp_precip_pct");
  for (const char* ddf : {"fv_ddf", "fc_ddf"})
    scale_column(analysis.values[analysis.col_index(ddf)],
                 all.values[all.col_index(ddf)], cfg.ddf_scaling, ddf);

  analysis.to_csv(ctx.out / "features.csv");
  all.to_csv(ctx.out / "features_all_years.csv");

  std::ostringstream prov;
  prov << "station_id,date,field,value\n";
  for (const auto& p : provenance)
    prov << p.station << ',' << to_string(p.date) << ',' << p.field << ','
         << csv::format_full(p.value) << "\n";
  csv::write_file(ctx.out / "features_provenance.csv", prov.str());

  std::ostringstream inc;
  inc << "year,column,reason\n";
  for (const auto& line : incomplete) inc << line << "\n";
  csv::write_file(ctx.out / "features_incomplete.csv", inc.str());

  ctx.features = std::move(analysis);
  ctx.all_years = std::move(all);
}

const FeatureTable& need_features(Context& ctx) {
  if (!ctx.features) {
    const fs::path p = ctx.out / "features.csv";
    if (!fs::exists(p))
      throw Error("needs the features stage (no " + p.string() + ")");
    ctx.features = FeatureTable::from_csv(p);
  }
  return *ctx.features;
}

// ------------------------------------------------------------------ select

std::string beta_cells(const FittedModel& m, std::size_t width) {
  std::string s;
  for (std::size_t j = 0; j < width; ++j) {
    s += ',';
    if (j < m.beta.size()) s += csv::format_g6(m.beta[j]);
  }
  return s;
}

void stage_select(Context& ctx) {
  const FeatureTable& features = need_features(ctx);
  std::vector<std::string> candidates = ctx.cfg.candidates;
  if (candidates.empty()) candidates = features.columns;

  SelectionOptions opt;
  opt.base_columns = ctx.cfg.selection_base;
  if (opt.base_columns.empty())
    for (const auto& c : {ctx.cfg.combination_precip, ctx.cfg.combination_ddf})
      if (features.has_column(c)) opt.base_columns.push_back(c);

  SelectionPath path = forward_stepwise(features, candidates, opt);

  std::size_t maxk = 1;
  for (const auto& st : path.steps)
    for (const auto& c : st.candidates) maxk = std::max(maxk, c.model.beta.size());

  std::ostringstream ps;
  ps << "step,added,accepted,n,aicc";
  for (std::size_t j = 0; j < maxk; ++j) ps << ",beta_" << j;
  ps << "\n";
  for (std::size_t s = 0; s < path.steps.size(); ++s) {
    const auto& st = path.steps[s];
    ps << s << ',' << st.added << ',' << (s <= path.chosen ? 1 : 0) << ','
       << st.model.n << ',' << csv::format_g6(st.aicc) << beta_cells(st.model, maxk)
       << "\n";
  }
  csv::write_file(ctx.out / "selection_path.csv", ps.str());

  std::ostringstream cs;
  cs << "step,variable,n,comparable,skipped,aicc,new_coef_p";
  for (std::size_t j = 0; j < maxk; ++j) cs << ",beta_" << j;
  cs << ",note\n";
  auto emit_candidates = [&](std::size_t step, const std::vector<CandidateFit>& cands) {
    for (const auto& c : cands) {
      cs << step << ',' << c.name << ',' << c.n_rows << ',' << (c.comparable ? 1 : 0)
         << ',' << (c.skipped ? 1 : 0) << ',';
      if (!c.skipped) cs << csv::format_g6(c.aicc);
      cs << ',';
      if (std::isfinite(c.new_coef_p)) cs << csv::format_g6(c.new_coef_p);
      if (c.skipped)
        cs << beta_cells(FittedModel{}, maxk);
      else
        cs << beta_cells(c.model, maxk);
      std::string note = c.note;
      std::replace(note.begin(), note.end(), ',', ';');
      cs << ',' << note << "\n";
    }
  };
  for (std::size_t s = 1; s < path.steps.size(); ++s)
    emit_candidates(s, path.steps[s].candidates);
  if (!path.final_candidates.empty())
    emit_candidates(path.steps.size(), path.final_candidates);
  csv::write_file(ctx.out / "selection_candidates.csv", cs.str());

  // machine-readable summary so a later fit stage can pick up the chosen model
  {
    json js;
    js["base_columns"] = path.base_columns;
    std::vector<std::string> chosen_covs;
    for (std::size_t s = 1; s <= path.chosen; ++s) chosen_covs.push_back(path.steps[s].added);
    js["chosen_covariates"] = chosen_covs;
    js["chosen_aicc"] = path.steps[path.chosen].aicc;
    js["candidate_order"] = path.candidate_order;
    std::ofstream out(ctx.out / "selection.json", std::ios::binary);
    out << js.dump(2) << "\n";
  }

  // fixed combination menu over the configured precipitation/DDF pair
  if (features.has_column(ctx.cfg.combination_precip) &&
      features.has_column(ctx.cfg.combination_ddf)) {
    const auto combos = compare_combinations(features, ctx.cfg.combination_precip,
                                             ctx.cfg.combination_ddf);
    std::ostringstream os;
    os << "model,n,aicc,term,coef\n";
    for (const auto& c : combos)
      for (std::size_t j = 0; j < c.model.beta.size(); ++j)
        os << c.label << ',' << c.n_rows << ',' << csv::format_g6(c.aicc) << ','
           << c.model.names[j] << ',' << csv::format_g6(c.model.beta[j]) << "\n";
    csv::write_file(ctx.out / "combinations.csv", os.str());
  }

  ctx.path = std::move(path);
}

// --------------------------------------------------------------------- fit

json model_to_json(const FittedModel& m) {
  json j;
  j["names"] = m.names;
  j["beta"] = m.beta;
  j["loglik"] = m.loglik;
  j["penalized_loglik"] = m.penalized_loglik;
  j["aicc"] = m.aicc;
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["n"] = m.n;
  j["scaling"] = m.scaling;
  std::vector<std::vector<double>> cov(m.k(), std::vector<double>(m.k()));
  for (std::size_t i = 0; i < m.k(); ++i)
    for (std::size_t jj = 0; jj < m.k(); ++jj) cov[i][jj] = m.cov(i, jj);
  j["cov"] = cov;
  auto clean = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v)
      a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return a;
  };
  j["p_values"] = clean(m.p_values);
  j["wald_p"] = clean(m.wald_p);
  return j;
}

FittedModel model_from_json(const json& j) {
  FittedModel m;
  m.names = j.at("names").get<std::vector<std::string>>();
  m.beta = j.at("beta").get<std::vector<double>>();
  m.loglik = j.at("loglik").get<double>();
  m.penalized_loglik = j.at("penalized_loglik").get<double>();
  m.aicc = j.at("aicc").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.iterations = j.at("iterations").get<int>();
  m.n = j.at("n").get<std::size_t>();
  m.scaling = j.at("scaling").get<std::string>();
  const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
  m.cov = Mat(m.k(), m.k());
  for (std::size_t i = 0; i < m.k(); ++i)
    for (std::size_t jj = 0; jj < m.k(); ++jj) m.cov(i, jj) = cov[i][jj];
  for (const auto& v : j.at("p_values"))
    m.p_values.push_back(v.is_null() ? std::nan("") : v.get<double>());
  for (const auto& v : j.at("wald_p"))
    m.wald_p.push_back(v.is_null() ? std::nan("") : v.get<double>());
  return m;
}

void stage_fit(Context& ctx) {
  const FeatureTable& features = need_features(ctx);
  std::vector<std::string> covs;
  std::vector<std::size_t> rows;
  if (!ctx.cfg.model_covariates.empty()) {
    // explicit configuration wins over selection results
    covs = ctx.cfg.model_covariates;
    rows = features.complete_rows(covs);
  } else if (ctx.path) {
    // refit the chosen step's model on the selection row set
    const auto& names = ctx.path->steps[ctx.path->chosen].model.names;
    covs.assign(names.begin() + 1, names.end());
    rows = features.complete_rows(ctx.path->base_columns);
  } else if (fs::exists(ctx.out / "selection.json")) {
    std::ifstream in(ctx.out / "selection.json");
    json js;
    in >> js;
    covs = js.at("chosen_covariates").get<std::vector<std::string>>();
    rows = features.complete_rows(js.at("base_columns").get<std::vector<std::string>>());
  } else {
    covs = {"gp_precip_pct", "fv_ddf"};
    rows = features.complete_rows(covs);
  }
  DesignMatrix d = features.design(covs, rows);
  FittedModel m = fit_firth(d);
  compute_p_values(d, m);
  m.scaling = ctx.cfg.scaling_tag();

  json mj = model_to_json(m);
  std::vector<int> design_years;
  for (std::size_t r : rows) design_years.push_back(features.years[r]);
  mj["design_years"] = design_years;
  std::ofstream js(ctx.out / "model.json", std::ios::binary);
  js << mj.dump(2) << "\n";

  std::ostringstream os;
  os << "term,beta,se,plr_p,wald_p\n";
  for (std::size_t j = 0; j < m.k(); ++j) {
    os << m.names[j] << ',' << csv::format_g6(m.beta[j]) << ','
       << csv::format_g6(std::sqrt(m.cov(j, j))) << ',';
    if (std::isfinite(m.p_values[j])) os << csv::format_g6(m.p_values[j]);
    os << ',';
    if (std::isfinite(m.wald_p[j])) os << csv::format_g6(m.wald_p[j]);
    os << "\n";
  }
  os << "# n=" << m.n << " loglik=" << csv::format_g6(m.loglik)
     << " penalized_loglik=" << csv::format_g6(m.penalized_loglik)
     << " aicc=" << csv::format_g6(m.aicc) << " converged=" << m.converged
     << " iterations=" << m.iterations << "\n";
  csv::write_file(ctx.out / "model_summary.csv", os.str());

  ctx.model = std::move(m);
  ctx.design = std::move(d);
}

const FittedModel& need_model(Context& ctx) {
  if (!ctx.model) {
    const fs::path p = ctx.out / "model.json";
    if (!fs::exists(p)) throw Error("needs the fit stage (no " + p.string() + ")");
    std::ifstream in(p);
    json j;
    in >> j;
    ctx.model = model_from_json(j);
  }
  return *ctx.model;
}

const DesignMatrix& need_design(Context& ctx) {
  if (!ctx.design) {
    const FittedModel& m = need_model(ctx);
    const FeatureTable& features = need_features(ctx);
    const std::vector<std::string> covs(m.names.begin() + 1, m.names.end());
    // rebuild on exactly the rows the fit used, recorded in model.json
    std::vector<std::size_t> rows;
    std::ifstream in(ctx.out / "model.json");
    json j;
    if (in && (in >> j, j.contains("design_years"))) {
      std::set<int> want;
      for (int y : j.at("design_years").get<std::vector<int>>()) want.insert(y);
      for (std::size_t r = 0; r < features.n_rows(); ++r)
        if (want.count(features.years[r])) rows.push_back(r);
      if (rows.size() != want.size())
        throw Error("feature table no longer covers the fitted model's years");
    } else {
      rows = features.complete_rows(covs);
    }
    ctx.design = features.design(covs, rows);
  }
  return *ctx.design;
}

// --------------------------------------------------------------- bootstrap

void stage_bootstrap(Context& ctx) {
  require_seed(ctx, "bootstrap");
  const FittedModel& m = need_model(ctx);
  const DesignMatrix& d = need_design(ctx);
  BootstrapEnsemble e =
      parametric_bootstrap(m, d, ctx.cfg.bootstrap_B, ctx.seed, ctx.threads);
  save_ensemble_csv(ctx.out / "ensemble.csv", e);

  const auto ci = percentile_ci(e, ctx.cfg.ci_level);
  std::ostringstream os;
  os << "term,beta,ci_lo,ci_hi,level\n";
  for (std::size_t j = 0; j < e.k; ++j)
    os << e.names[j] << ',' << csv::format_g6(m.beta[j]) << ','
       << csv::format_g6(ci[j].lo) << ',' << csv::format_g6(ci[j].hi) << ','
       << csv::format_g6(ctx.cfg.ci_level) << "\n";
  csv::write_file(ctx.out / "ci.csv", os.str());
  csv::write_file(ctx.out / "bootstrap_diagnostics.txt", e.diagnostics() + "\n");
  std::cout << e.diagnostics() << "\n";

  ctx.ensemble = std::move(e);
}

const BootstrapEnsemble& need_ensemble(Context& ctx) {
  if (!ctx.ensemble) {
    fs::path p = ctx.out / "ensemble.csv";
    if (ctx.cfg.ensemble_csv) p = *ctx.cfg.ensemble_csv;
    if (!fs::exists(p))
      throw Error("needs a persisted ensemble or the bootstrap stage (no " +
                  p.string() + ")");
    ctx.ensemble = load_ensemble_csv(p);
  }
  return *ctx.ensemble;
}

// ----------------------------------------------------------------- project

// Historical covariate rows (model columns, model scaling) ending right
// before `scenario_start`: the maximal contiguous run.
std::optional<ScenarioForcing> historical_block(Context& ctx,
                                                const std::vector<std::string>& covs,
                                                int scenario_start) {
  if (!ctx.cfg.include_historical) return std::nullopt;
  if (!ctx.all_years) {
    const fs::path p = ctx.out / "features_all_years.csv";
    if (!fs::exists(p)) return std::nullopt;
    ctx.all_years = FeatureTable::from_csv(p);
  }
  const FeatureTable& t = *ctx.all_years;
  std::vector<std::pair<int, std::vector<double>>> rows;
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    if (t.years[r] >= scenario_start) continue;
    std::vector<double> x;
    bool ok = true;
    for (const auto& c : covs) {
      const auto& v = t.values[t.col_index(c)][r];
      if (!v) {
        ok = false;
        break;
      }
      x.push_back(*v);
    }
    if (ok) rows.push_back({t.years[r], std::move(x)});
  }
  if (rows.empty()) return std::nullopt;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // keep the maximal contiguous run that ends immediately before the scenario
  if (rows.back().first + 1 != scenario_start) return std::nullopt;
  std::size_t start = rows.size() - 1;
  while (start > 0 && rows[start - 1].first + 1 == rows[start].first) --start;

  ScenarioForcing f;
  f.gcm = "historical";
  f.rcp = "observed";
  f.covariate_names = covs;
  for (std::size_t i = start; i < rows.size(); ++i) {
    f.years.push_back(rows[i].first);
    for (double v : rows[i].second) f.x.push_back(v);
  }
  return f;
}

ScenarioForcing select_columns(const ScenarioForcing& in,
                               const std::vector<std::string>& covs) {
  ScenarioForcing out;
  out.gcm = in.gcm;
  out.rcp = in.rcp;
  out.scaling = in.scaling;
  out.years = in.years;
  out.covariate_names = covs;
  std::vector<std::size_t> idx;
  for (const auto& c : covs) {
    const auto it = std::find(in.covariate_names.begin(), in.covariate_names.end(), c);
    if (it == in.covariate_names.end())
      throw Error("forcing " + in.gcm + "/" + in.rcp + " lacks covariate '" + c + "'");
    idx.push_back(static_cast<std::size_t>(it - in.covariate_names.begin()));
  }
  for (std::size_t t = 0; t < in.years.size(); ++t)
    for (std::size_t j : idx) out.x.push_back(in.at(t, j));
  return out;
}

void stage_project(Context& ctx) {
  require_seed(ctx, "project");
  const BootstrapEnsemble& e = need_ensemble(ctx);
  if (ctx.cfg.scenario_csvs.empty())
    throw Error("project: no scenario files configured");
  const std::vector<std::string> covs(e.names.begin() + 1, e.names.end());

  // 0 models = pass the converged ensemble rows through unsampled
  const bool identity = ctx.cfg.models == 0;
  const auto models = sample_models(e, ctx.cfg.models, ctx.seed, identity);

  std::ostringstream wt;
  wt << "gcm,rcp,reference_year,median_years,beyond_horizon,censored_fraction\n";

  for (const auto& scen_path : ctx.cfg.scenario_csvs) {
    for (const ScenarioForcing& raw : load_forcing_csv(scen_path, e.scaling)) {
      const ScenarioForcing scen = select_columns(raw, covs);
      ScenarioForcing combined = scen;
      if (const auto hist = historical_block(ctx, covs, scen.years.front())) {
        combined.years = hist->years;
        combined.years.insert(combined.years.end(), scen.years.begin(), scen.years.end());
        combined.x = hist->x;
        combined.x.insert(combined.x.end(), scen.x.begin(), scen.x.end());
      }
      combined.validate();

      const ProbabilityFan fan = project_probabilities(models, combined, e.scaling);
      const std::string tag = sanitize(scen.gcm) + "_" + sanitize(scen.rcp);

      // probability corridor with return periods on the same rows
      const auto corridor =
          moving_average_corridor(fan, ctx.cfg.ma_window, ctx.cfg.quantile_levels);
      std::ostringstream cs;
      cs << "year,level,p,return_period\n";
      for (const auto& pt : corridor)
        cs << pt.year << ',' << csv::format_full(pt.level) << ','
           << csv::format_full(pt.p) << ',' << csv::format_full(1.0 / pt.p) << "\n";
      csv::write_file(ctx.out / ("corridor_" + tag + ".csv"), cs.str());

      // Monte Carlo sequences: wait times and pooled frequencies
      const std::uint64_t scen_seed =
          rng::mix64(ctx.seed ^ rng::mix64(fnv1a(scen.gcm + "/" + scen.rcp)));
      const SimulationSummary sim = simulate_sequences(
          fan, ctx.cfg.replicates_per_model, scen_seed, ctx.cfg.reference_years,
          ctx.threads);

      std::ostringstream fsim;
      fsim << "year,floods,sequences,frequency\n";
      const double nseq = static_cast<double>(ctx.cfg.replicates_per_model) *
                          static_cast<double>(fan.n_models);
      for (std::size_t t = 0; t < fan.years.size(); ++t)
        fsim << fan.years[t] << ',' << sim.floods_per_year[t] << ','
             << static_cast<std::uint64_t>(nseq) << ','
             << csv::format_full(static_cast<double>(sim.floods_per_year[t]) / nseq)
             << "\n";
      csv::write_file(ctx.out / ("simulated_frequency_" + tag + ".csv"), fsim.str());

      for (const WaitTimeSummary& w : sim.waits) {
        const KmMedian med = km_median(w);
        json j;
        j["gcm"] = scen.gcm;
        j["rcp"] = scen.rcp;
        j["reference_year"] = w.reference_year;
        j["horizon"] = w.horizon;
        j["median"] = med.beyond_horizon ? json(nullptr) : json(med.value);
        j["median_beyond_horizon"] = med.beyond_horizon;
        j["censored_fraction"] = w.censored_fraction();
        json q = json::object();
        for (double lv : ctx.cfg.quantile_levels) {
          if (!(lv > 0 && lv < 1)) continue;
          const KmMedian kq = km_wait_quantile(w, lv);
          q[csv::format_full(lv)] = kq.beyond_horizon ? json(nullptr) : json(kq.value);
        }
        j["quantiles"] = q;
        std::ofstream js(ctx.out / ("waits_" + tag + "_" +
                                    std::to_string(w.reference_year) + ".json"),
                         std::ios::binary);
        js << j.dump(2) << "\n";

        wt << scen.gcm << ',' << scen.rcp << ',' << w.reference_year << ',';
        if (!med.beyond_horizon) wt << csv::format_g6(med.value);
        wt << ',' << (med.beyond_horizon ? 1 : 0) << ','
           << csv::format_g6(w.censored_fraction()) << "\n";
        ctx.waits.push_back({scen.gcm, scen.rcp, w.reference_year, med,
                             w.censored_fraction()});
      }

      if (ctx.cfg.dump_sequences) {
        const std::size_t total = fan.n_models * ctx.cfg.replicates_per_model;
        if (total > 200000)
          throw Error("dump_sequences: refusing to materialize " +
                      std::to_string(total) + " sequences; reduce models/replicates");
        const FloodSequenceEnsemble seqs = materialize_sequences(
            fan, ctx.cfg.replicates_per_model, scen_seed);
        std::ostringstream ds;
        ds << "sequence,flood_years\n";
        for (std::size_t s = 0; s < seqs.n_sequences; ++s) {
          ds << s << ',';
          bool first = true;
          for (std::size_t t = 0; t < seqs.years.size(); ++t)
            if (seqs.flood(s, t)) {
              if (!first) ds << ';';
              ds << seqs.years[t];
              first = false;
            }
          ds << "\n";
        }
        csv::write_file(ctx.out / ("sequences_" + tag + ".csv"), ds.str());
      }
    }
  }
  csv::write_file(ctx.out / "waittimes.csv", wt.str());
}

// ------------------------------------------------------------------ report

void stage_report(Context& ctx) {
  json manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = config_hash(ctx.cfg);
  manifest["seed"] = ctx.has_seed ? json(ctx.seed) : json(nullptr);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(ctx.out)) {
    const std::string name = entry.path().filename().string();
    if (name != "manifest.json") files.push_back(name);
  }
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  std::ofstream js(ctx.out / "manifest.json", std::ios::binary);
  js << manifest.dump(2) << "\n";
}

}  // namespace

void run_pipeline(const RunConfig& cfg, std::vector<Stage> stages,
                  const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Context ctx(cfg);
  ctx.out = out_dir;
  ctx.threads = cfg.threads > 0 ? cfg.threads : default_threads();
  if (cfg.seed) {
    ctx.seed = *cfg.seed;
    ctx.has_seed = true;
  }

  // canonical order, duplicates dropped
  std::vector<Stage> plan;
  for (Stage s : {Stage::features, Stage::select, Stage::fit, Stage::bootstrap,
                  Stage::project, Stage::report})
    if (std::find(stages.begin(), stages.end(), s) != stages.end()) plan.push_back(s);
  if (plan.empty()) throw Error("no stages requested");

  for (Stage s : plan) {
    try {
      switch (s) {
        case Stage::features: stage_features(ctx); break;
        case Stage::select: stage_select(ctx); break;
        case Stage::fit: stage_fit(ctx); break;
        case Stage::bootstrap: stage_bootstrap(ctx); break;
        case Stage::project: stage_project(ctx); break;
        case Stage::report: stage_report(ctx); break;
      }
    } catch (const Error& e) {
      throw Error("stage " + stage_name(s) + ": " + e.what());
    }
  }
}

}  // namespace icefreq
