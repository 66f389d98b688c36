#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icefreq/kernels.hpp"
#include "icefreq/survival.hpp"

namespace icefreq {

// Annual covariate series driving the fitted model under one GCM x RCP
// scenario, already in the model's units/scaling.
struct ScenarioForcing {
  std::string gcm, rcp;
  std::string scaling;               // must match the fitted model's tag
  std::vector<int> years;            // contiguous, ascending
  std::vector<std::string> covariate_names;
  std::vector<double> x;             // row-major years x covariates

  std::size_t n_cov() const { return covariate_names.size(); }
  double at(std::size_t t, std::size_t j) const { return x[t * n_cov() + j]; }
  void validate() const;
};

// Forcing CSV: header gcm,rcp,year,<covariates>; one block per GCM x RCP.
// The caller supplies the scaling tag the columns are assumed to be in; a
// "# scaling=<tag>" comment line inside the file overrides it, letting the
// projection guard catch files delivered in the wrong units.
std::vector<ScenarioForcing> load_forcing_csv(const std::filesystem::path& path,
                                              const std::string& scaling);

// Annual flood probability for every sampled model.
struct ProbabilityFan {
  std::vector<int> years;
  std::size_t n_models = 0;
  std::vector<double> p;  // model-major: p[m * years.size() + t]

  double at(std::size_t m, std::size_t t) const { return p[m * years.size() + t]; }
};

// p[m][t] = logistic(beta_m . [1, x_t]). Errors when the forcing scaling tag
// differs from the model's (guards raw-unit series entering a standardized
// model) or dimensions disagree.
ProbabilityFan project_probabilities(const std::vector<std::vector<double>>& models,
                                     const ScenarioForcing& forcing,
                                     const std::string& model_scaling);

struct CorridorPoint {
  int year = 0;
  double level = 0;
  double p = 0;
};

// Trailing moving average in probability space per model (the mean of the
// `window` years before each output year), then cross-model quantiles per
// year. The first output year is the first input year + window.
std::vector<CorridorPoint> moving_average_corridor(const ProbabilityFan& fan,
                                                   std::size_t window,
                                                   std::span<const double> levels);

// 1/p; errors outside (0,1).
double instantaneous_return_period(double p);

// Wait-time tallies for one reference year, aggregated over sequences.
// wait_counts[w-1] counts sequences whose first flood after the reference
// year happens w years later; sequences with no flood by the horizon are
// right-censored at horizon - reference_year.
struct WaitTimeSummary {
  int reference_year = 0;
  int horizon = 0;
  std::uint64_t n_sequences = 0;
  std::vector<std::uint64_t> wait_counts;
  std::uint64_t censored = 0;

  double censored_fraction() const {
    return n_sequences ? static_cast<double>(censored) / static_cast<double>(n_sequences) : 0.0;
  }
  KmCounts km_counts() const;
};

struct SimulationSummary {
  std::size_t n_models = 0;
  std::size_t replicates_per_model = 0;
  std::uint64_t total_floods = 0;      // flood-years over all sequences
  std::uint64_t total_year_draws = 0;  // sequences x years
  std::vector<std::uint64_t> floods_per_year;  // pooled across sequences
  std::vector<WaitTimeSummary> waits;  // one per requested reference year
};

// Streams models x replicates_per_model Bernoulli sequences over the fan
// years, accumulating flood tallies and wait times without materializing
// the sequences. Sequence (m, r) draws from the substream (seed, m, r), so
// the result is bit-identical for any thread count and either kernel.
SimulationSummary simulate_sequences(const ProbabilityFan& fan,
                                     std::size_t replicates_per_model,
                                     std::uint64_t seed,
                                     std::span<const int> reference_years,
                                     int threads = 1,
                                     const kernels::Kernel& kern = kernels::active());

// Materialized sequences (one bit per year) for small runs, diagnostics and
// the dump flag; identical draw streams to simulate_sequences.
struct FloodSequenceEnsemble {
  std::vector<int> years;
  std::size_t n_sequences = 0;
  std::size_t words_per_seq = 0;
  std::vector<std::uint64_t> bits;  // sequence-major
  std::uint64_t seed = 0;

  bool flood(std::size_t seq, std::size_t t) const {
    return (bits[seq * words_per_seq + (t >> 6)] >> (t & 63)) & 1;
  }
};

FloodSequenceEnsemble materialize_sequences(const ProbabilityFan& fan,
                                            std::size_t replicates_per_model,
                                            std::uint64_t seed,
                                            const kernels::Kernel& kern = kernels::active());

WaitTimeSummary wait_times(const FloodSequenceEnsemble& e, int reference_year);

// KM median of the wait distribution (beyond-horizon flagged).
KmMedian km_median(const WaitTimeSummary& w);
KmMedian km_wait_quantile(const WaitTimeSummary& w, double q);

}  // namespace icefreq
