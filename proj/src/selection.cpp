#include "icefreq/selection.hpp"

#include <algorithm>
#include <cmath>

#include "icefreq/features.hpp"

namespace icefreq {

SelectionPath forward_stepwise(const FeatureTable& features,
                               const std::vector<std::string>& candidates,
                               const SelectionOptions& opt) {
  SelectionPath path;
  path.candidate_order = candidates;
  path.base_columns = opt.base_columns;

  // Incumbent rows never shrink: only candidates complete on the incumbent
  // row set are eligible, so every accepted model sees the same rows.
  const std::vector<std::size_t> base_rows = features.complete_rows(opt.base_columns);
  if (base_rows.size() < 2)
    throw Error("forward_stepwise: fewer than 2 rows complete on the base columns");

  std::vector<std::string> chosen_cols;
  SelectionStep step0;
  step0.model = fit_firth(features.design(chosen_cols, base_rows), opt.firth);
  step0.aicc = step0.model.aicc;
  path.steps.push_back(std::move(step0));
  path.chosen = 0;

  std::vector<std::string> remaining = candidates;
  while (path.steps.size() - 1 < opt.max_steps && !remaining.empty()) {
    const double incumbent_aicc = path.steps.back().aicc;
    SelectionStep next;
    std::size_t best = static_cast<std::size_t>(-1);

    for (const std::string& cand : remaining) {
      CandidateFit cf;
      cf.name = cand;
      std::vector<std::string> cols = chosen_cols;
      cols.push_back(cand);
      // accepted columns are complete on the base rows, so only the entering
      // column can shrink the candidate's row set
      const auto& cand_col = features.values[features.col_index(cand)];
      std::vector<std::size_t> rows;
      rows.reserve(base_rows.size());
      for (std::size_t r : base_rows)
        if (cand_col[r]) rows.push_back(r);
      cf.n_rows = rows.size();
      cf.comparable = rows.size() == base_rows.size();
      if (rows.size() <= cols.size() + 1) {
        cf.skipped = true;
        cf.note = "too few complete rows";
        next.candidates.push_back(std::move(cf));
        continue;
      }
      try {
        cf.model = fit_firth(features.design(cols, rows), opt.firth);
        cf.aicc = cf.model.aicc;
        if (!cf.model.converged) {
          cf.skipped = true;
          cf.note = "fit did not converge";
        }
      } catch (const Error& e) {
        cf.skipped = true;
        cf.note = e.what();
      }
      next.candidates.push_back(std::move(cf));
      const CandidateFit& back = next.candidates.back();
      if (!back.skipped && back.comparable &&
          (best == static_cast<std::size_t>(-1) ||
           back.aicc < next.candidates[best].aicc))
        best = next.candidates.size() - 1;
    }

    if (best == static_cast<std::size_t>(-1)) {
      path.final_candidates = std::move(next.candidates);
      break;
    }
    CandidateFit& winner = next.candidates[best];
    if (!(winner.aicc < incumbent_aicc)) {
      // no candidate improves on the incumbent: the walk ends here
      path.final_candidates = std::move(next.candidates);
      break;
    }

    // significance guard on the entering coefficient
    {
      std::vector<std::string> cols = chosen_cols;
      cols.push_back(winner.name);
      const DesignMatrix d = features.design(cols, base_rows);
      winner.new_coef_p = plr_p_value(d, winner.model, d.k - 1, opt.firth);
    }
    const bool accepted = winner.aicc < incumbent_aicc - opt.min_aicc_improvement &&
                          winner.new_coef_p < opt.max_new_coef_p;

    next.added = winner.name;
    next.model = winner.model;
    next.aicc = winner.aicc;
    const std::string winner_name = winner.name;
    path.steps.push_back(std::move(next));
    if (!accepted) break;  // the rejected step stays on record; chosen freezes

    path.chosen = path.steps.size() - 1;
    chosen_cols.push_back(winner_name);
    remaining.erase(std::find(remaining.begin(), remaining.end(), winner_name));
  }
  return path;
}

std::vector<CombinationFit> compare_combinations(const FeatureTable& features,
                                                 const std::string& precip_col,
                                                 const std::string& ddf_col,
                                                 const FirthOptions& opt) {
  const std::vector<std::string> both{precip_col, ddf_col};
  const std::vector<std::size_t> rows = features.complete_rows(both);
  if (rows.size() < 4)
    throw Error("compare_combinations: too few rows complete on '" + precip_col +
                "' and '" + ddf_col + "'");

  std::vector<double> precip, ddf;
  std::vector<int> y;
  const auto& pc_col = features.values[features.col_index(precip_col)];
  const auto& dd_col = features.values[features.col_index(ddf_col)];
  for (std::size_t r : rows) {
    precip.push_back(*pc_col[r]);
    ddf.push_back(*dd_col[r]);
    y.push_back(features.flood[r]);
  }
  std::vector<double> interaction(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) interaction[i] = precip[i] * ddf[i];
  const Pca2 pc = first_pc(standardize(precip, precip), standardize(ddf, ddf));

  struct Entry {
    std::string label;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
  };
  const std::string inter_name = precip_col + "*" + ddf_col;
  std::vector<Entry> entries;
  entries.push_back({"constant", {}, {}});
  entries.push_back({"precip+ddf", both, {precip, ddf}});
  entries.push_back({"precip+ddf+interaction",
                     {precip_col, ddf_col, inter_name},
                     {precip, ddf, interaction}});
  entries.push_back({"interaction", {inter_name}, {interaction}});
  entries.push_back({"first_pc", {"pc1"}, {pc.scores}});

  std::vector<CombinationFit> out;
  for (auto& e : entries) {
    CombinationFit cf;
    cf.label = e.label;
    cf.model = fit_firth(DesignMatrix::build(e.names, e.cols, y), opt);
    cf.aicc = cf.model.aicc;
    cf.n_rows = rows.size();
    out.push_back(std::move(cf));
  }
  return out;
}

}  // namespace icefreq
