#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icefreq/firth.hpp"

namespace icefreq {

// Refitted coefficient vectors from simulated flood histories. Rows whose
// refit did not converge (including degenerate all-0/all-1 responses) carry
// NaN and are excluded from every summary; their count is reported.
struct BootstrapEnsemble {
  std::size_t B = 0;
  std::size_t k = 0;
  std::vector<std::string> names;
  std::vector<double> betas;         // B x k row-major
  std::vector<std::uint8_t> converged;
  std::uint64_t seed = 0;
  std::vector<double> source_beta;   // the model that generated the replicates
  std::string scaling;

  double beta_at(std::size_t b, std::size_t j) const { return betas[b * k + j]; }
  std::size_t n_converged() const;
  std::string diagnostics() const;   // one-line convergence report
};

// Keeps X fixed; for each replicate draws y_i ~ Bernoulli(p_i) with p from
// the source model, refits with fit_firth, and stores the coefficients.
// Replicate b uses the substream (seed, b), so results are bit-reproducible
// for any thread count.
BootstrapEnsemble parametric_bootstrap(const FittedModel& m, const DesignMatrix& d,
                                       std::size_t B, std::uint64_t seed,
                                       int threads = 1, const FirthOptions& opt = {});

struct CoefInterval {
  double lo = 0, hi = 0;
};

// Equal-tail percentile interval per coefficient over converged replicates,
// linear-interpolation quantiles (see stats.hpp). Requires >= 1 converged
// replicate (one replicate gives a zero-width interval) and level in (0,1).
std::vector<CoefInterval> percentile_ci(const BootstrapEnsemble& e, double level);

// Uniform draws with replacement from the converged replicate rows.
// identity = true returns the converged rows themselves in order.
std::vector<std::vector<double>> sample_models(const BootstrapEnsemble& e,
                                               std::size_t count, std::uint64_t seed,
                                               bool identity = false);

// CSV persistence: replicate,beta_0,...,converged (full-precision fields).
void save_ensemble_csv(const std::filesystem::path& path, const BootstrapEnsemble& e);
BootstrapEnsemble load_ensemble_csv(const std::filesystem::path& path);

}  // namespace icefreq
