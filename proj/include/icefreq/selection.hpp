#pragma once
#include <limits>
#include <string>
#include <vector>

#include "icefreq/feature_table.hpp"
#include "icefreq/firth.hpp"

namespace icefreq {

struct CandidateFit {
  std::string name;
  FittedModel model;
  double aicc = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_rows = 0;
  bool comparable = false;  // fit on the same rows as the incumbent model
  bool skipped = false;     // unfittable (collinear); see note
  std::string note;
  double new_coef_p = std::numeric_limits<double>::quiet_NaN();  // winner only
};

struct SelectionStep {
  std::string added;  // empty for the constant model
  FittedModel model;
  double aicc = 0;
  std::vector<CandidateFit> candidates;  // every model evaluated at this step
};

// Forward-stepwise record: steps[0] is the constant model; each later step
// adds exactly one covariate. The walk may end with one evaluated-but-
// rejected step on record (guard failure); chosen indexes the final accepted
// step. final_candidates holds the last candidate sweep when the walk ended
// with nothing improving the incumbent.
struct SelectionPath {
  std::vector<SelectionStep> steps;
  std::size_t chosen = 0;
  std::vector<std::string> candidate_order;  // documents the tie-break order
  std::vector<std::string> base_columns;     // rows complete on these were analyzed
  std::vector<CandidateFit> final_candidates;
};

struct SelectionOptions {
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  // A step is accepted only when AICc improves by more than this margin and
  // the entering coefficient's penalized-LR p-value is below the cap; a bare
  // AICc rule would accept negligible third-variable improvements.
  double min_aicc_improvement = 0.1;
  double max_new_coef_p = 0.10;
  // The analysis row set is the rows complete on these columns (empty: all
  // rows). Candidates with further missing values fit on fewer rows and are
  // flagged non-comparable.
  std::vector<std::string> base_columns;
  FirthOptions firth;
};

// Starts from the intercept-only model and greedily adds the candidate with
// the lowest AICc among fittable candidates evaluated on the incumbent row
// set; candidates with missing rows are tabulated (reduced n) but flagged
// non-comparable and never accepted. Ties break by candidate list order.
SelectionPath forward_stepwise(const FeatureTable& features,
                               const std::vector<std::string>& candidates,
                               const SelectionOptions& opt = {});

struct CombinationFit {
  std::string label;
  FittedModel model;
  double aicc = 0;
  std::size_t n_rows = 0;
};

// The fixed model menu over a precipitation and a freezing-degree-day
// column: constant; both; both plus their product; the product alone; the
// first principal component of the two (standardized over the analysis
// rows) alone. All five fit on the rows where both columns are present.
std::vector<CombinationFit> compare_combinations(const FeatureTable& features,
                                                 const std::string& precip_col,
                                                 const std::string& ddf_col,
                                                 const FirthOptions& opt = {});

}  // namespace icefreq
