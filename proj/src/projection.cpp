#include "icefreq/projection.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>

#include "icefreq/csv.hpp"
#include "icefreq/error.hpp"
#include "icefreq/firth.hpp"
#include "icefreq/parallel.hpp"
#include "icefreq/stats.hpp"

namespace icefreq {

void ScenarioForcing::validate() const {
  if (years.empty()) throw Error("forcing " + gcm + "/" + rcp + ": no years");
  for (std::size_t i = 1; i < years.size(); ++i)
    if (years[i] != years[i - 1] + 1)
      throw Error("forcing " + gcm + "/" + rcp + ": years not contiguous ascending at " +
                  std::to_string(years[i]));
  if (x.size() != years.size() * n_cov())
    throw Error("forcing " + gcm + "/" + rcp + ": ragged covariate block");
  for (double v : x)
    if (!std::isfinite(v)) throw Error("forcing " + gcm + "/" + rcp + ": non-finite covariate");
}

std::vector<ScenarioForcing> load_forcing_csv(const std::filesystem::path& path,
                                              const std::string& scaling) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error("forcing csv: empty file " + path.string());
  const auto header = csv::split_line(lines[0]);
  if (header.size() < 4 || header[0] != "gcm" || header[1] != "rcp" || header[2] != "year")
    throw Error("forcing csv: header must be gcm,rcp,year,<covariates> in " + path.string());
  const std::vector<std::string> cov_names(header.begin() + 3, header.end());

  // an optional "# scaling=<tag>" comment declares the units the file is in
  std::string file_scaling = scaling;
  std::vector<ScenarioForcing> blocks;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    if (lines[li][0] == '#') {
      const auto pos = lines[li].find("scaling=");
      if (pos != std::string::npos) {
        file_scaling = lines[li].substr(pos + 8);
        for (auto& b : blocks) b.scaling = file_scaling;
      }
      continue;
    }
    const auto f = csv::split_line(lines[li]);
    if (f.size() != header.size())
      throw Error("forcing csv: line " + std::to_string(li + 1) + " has " +
                  std::to_string(f.size()) + " fields, expected " +
                  std::to_string(header.size()));
    const std::string ctx = path.string() + ":" + std::to_string(li + 1);
    ScenarioForcing* blk =
        !blocks.empty() && blocks.back().gcm == f[0] && blocks.back().rcp == f[1]
            ? &blocks.back()
            : nullptr;
    if (!blk) {
      blocks.push_back({});
      blk = &blocks.back();
      blk->gcm = f[0];
      blk->rcp = f[1];
      blk->scaling = file_scaling;
      blk->covariate_names = cov_names;
    }
    blk->years.push_back(static_cast<int>(csv::parse_long(f[2], ctx)));
    for (std::size_t j = 0; j < cov_names.size(); ++j)
      blk->x.push_back(csv::parse_double(f[3 + j], ctx));
  }
  for (auto& b : blocks) b.validate();
  return blocks;
}

ProbabilityFan project_probabilities(const std::vector<std::vector<double>>& models,
                                     const ScenarioForcing& forcing,
                                     const std::string& model_scaling) {
  forcing.validate();
  if (forcing.scaling != model_scaling)
    throw Error("forcing " + forcing.gcm + "/" + forcing.rcp + " scaling '" +
                forcing.scaling + "' does not match model scaling '" + model_scaling + "'");
  if (models.empty()) throw Error("project_probabilities: no models");
  const std::size_t T = forcing.years.size(), ncov = forcing.n_cov();
  for (const auto& beta : models)
    if (beta.size() != ncov + 1)
      throw Error("project_probabilities: model has " + std::to_string(beta.size()) +
                  " coefficients, forcing provides " + std::to_string(ncov) + " covariates");

  ProbabilityFan fan;
  fan.years = forcing.years;
  fan.n_models = models.size();
  fan.p.resize(models.size() * T);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& beta = models[m];
    for (std::size_t t = 0; t < T; ++t) {
      double eta = beta[0];
      for (std::size_t j = 0; j < ncov; ++j) eta += beta[j + 1] * forcing.at(t, j);
      fan.p[m * T + t] = logistic(eta);
    }
  }
  return fan;
}

std::vector<CorridorPoint> moving_average_corridor(const ProbabilityFan& fan,
                                                   std::size_t window,
                                                   std::span<const double> levels) {
  const std::size_t T = fan.years.size();
  if (window < 1) throw Error("moving_average_corridor: window must be >= 1");
  if (T < window + 1)
    throw Error("moving_average_corridor: series of " + std::to_string(T) +
                " years is too short for a " + std::to_string(window) + "-year window");
  const std::size_t n_out = T - window;

  // trailing means per model (exclusive of the output year itself)
  std::vector<double> ma(fan.n_models * n_out);
  for (std::size_t m = 0; m < fan.n_models; ++m) {
    double run = 0;
    for (std::size_t t = 0; t < window; ++t) run += fan.at(m, t);
    for (std::size_t o = 0; o < n_out; ++o) {
      ma[m * n_out + o] = run / static_cast<double>(window);
      run += fan.at(m, o + window);
      run -= fan.at(m, o);
    }
  }

  std::vector<CorridorPoint> out;
  out.reserve(n_out * levels.size());
  std::vector<double> col(fan.n_models);
  for (std::size_t o = 0; o < n_out; ++o) {
    for (std::size_t m = 0; m < fan.n_models; ++m) col[m] = ma[m * n_out + o];
    std::sort(col.begin(), col.end());
    for (double lv : levels)
      out.push_back({fan.years[o + window], lv, quantile_sorted(col, lv)});
  }
  return out;
}

double instantaneous_return_period(double p) {
  if (!(p > 0 && p < 1)) throw Error("instantaneous_return_period: p outside (0,1)");
  return 1.0 / p;
}

KmCounts WaitTimeSummary::km_counts() const {
  KmCounts c;
  const double censor_time = horizon - reference_year;
  for (std::size_t w = 0; w < wait_counts.size(); ++w) {
    if (wait_counts[w] == 0) continue;
    c.times.push_back(static_cast<double>(w + 1));
    c.events.push_back(wait_counts[w]);
    c.censored.push_back(0);
  }
  if (censored > 0) {
    // censored exactly at the horizon; merge with an event tie if present
    if (!c.times.empty() && c.times.back() == censor_time) {
      c.censored.back() = censored;
    } else {
      c.times.push_back(censor_time);
      c.events.push_back(0);
      c.censored.push_back(censored);
    }
  }
  return c;
}

namespace {

struct RefIndex {
  int year;
  std::size_t t;  // index of the reference year within fan.years
};

std::vector<RefIndex> resolve_references(const std::vector<int>& years,
                                         std::span<const int> reference_years) {
  std::vector<RefIndex> refs;
  for (int ry : reference_years) {
    if (ry < years.front() || ry >= years.back())
      throw Error("reference year " + std::to_string(ry) +
                  " leaves no projection years after it (span " +
                  std::to_string(years.front()) + "-" + std::to_string(years.back()) + ")");
    refs.push_back({ry, static_cast<std::size_t>(ry - years.front())});
  }
  return refs;
}

// first set bit strictly after index t0, or npos
std::size_t first_flood_after(const std::uint64_t* words, std::size_t nwords,
                              std::size_t t0) {
  std::size_t w = (t0 + 1) >> 6;
  if (w >= nwords) return static_cast<std::size_t>(-1);
  std::uint64_t cur = words[w] & ~((1ull << ((t0 + 1) & 63)) - 1ull);
  while (true) {
    if (cur != 0)
      return (w << 6) + static_cast<std::size_t>(std::countr_zero(cur));
    if (++w >= nwords) return static_cast<std::size_t>(-1);
    cur = words[w];
  }
}

}  // namespace

SimulationSummary simulate_sequences(const ProbabilityFan& fan,
                                     std::size_t replicates_per_model,
                                     std::uint64_t seed,
                                     std::span<const int> reference_years,
                                     int threads, const kernels::Kernel& kern) {
  if (replicates_per_model < 1)
    throw Error("simulate_sequences: replicates_per_model must be >= 1");
  const std::size_t T = fan.years.size();
  const std::size_t M = fan.n_models;
  const std::size_t nwords = (T + 63) / 64;
  const auto refs = resolve_references(fan.years, reference_years);

  // integer thresholds once per (model, year)
  std::vector<std::uint64_t> thr(M * T);
  for (std::size_t i = 0; i < fan.p.size(); ++i) thr[i] = rng::bernoulli_threshold(fan.p[i]);

  SimulationSummary sum;
  sum.n_models = M;
  sum.replicates_per_model = replicates_per_model;
  sum.total_year_draws = static_cast<std::uint64_t>(M) * replicates_per_model * T;
  sum.floods_per_year.assign(T, 0);
  for (const auto& r : refs) {
    WaitTimeSummary w;
    w.reference_year = r.year;
    w.horizon = fan.years.back();
    w.n_sequences = static_cast<std::uint64_t>(M) * replicates_per_model;
    w.wait_counts.assign(static_cast<std::size_t>(fan.years.back() - r.year), 0);
    sum.waits.push_back(std::move(w));
  }

  const rng::StreamKey root = rng::stream_root(seed, rng::kTagSimulate);

  // Per-worker tallies; integer sums merge identically regardless of the
  // thread partition.
  struct Local {
    std::uint64_t floods = 0;
    std::vector<std::uint64_t> per_year;
    std::vector<std::vector<std::uint64_t>> wait_counts;
    std::vector<std::uint64_t> censored;
  };
  std::vector<Local> locals(std::max(1, threads));
  std::atomic<std::size_t> next_slot{0};

  parallel_chunks(M, threads, [&](std::size_t m0, std::size_t m1) {
    Local& loc = locals[next_slot.fetch_add(1)];
    loc.per_year.assign(T, 0);
    loc.censored.assign(refs.size(), 0);
    loc.wait_counts.resize(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i)
      loc.wait_counts[i].assign(sum.waits[i].wait_counts.size(), 0);

    std::vector<std::uint64_t> words(nwords);
    for (std::size_t m = m0; m < m1; ++m) {
      const rng::StreamKey key_m = rng::substream(root, m);
      const std::uint64_t* thr_m = thr.data() + m * T;
      for (std::size_t r = 0; r < replicates_per_model; ++r) {
        const rng::StreamKey key = rng::substream(key_m, r);
        kern.bernoulli_bits(key, thr_m, T, words.data());
        for (std::size_t w = 0; w < nwords; ++w) {
          std::uint64_t bitsw = words[w];
          loc.floods += static_cast<std::uint64_t>(std::popcount(bitsw));
          while (bitsw) {
            loc.per_year[(w << 6) + static_cast<std::size_t>(std::countr_zero(bitsw))] += 1;
            bitsw &= bitsw - 1;
          }
        }
        for (std::size_t i = 0; i < refs.size(); ++i) {
          const std::size_t hit = first_flood_after(words.data(), nwords, refs[i].t);
          if (hit == static_cast<std::size_t>(-1) || hit >= T) {
            loc.censored[i] += 1;
          } else {
            loc.wait_counts[i][hit - refs[i].t - 1] += 1;
          }
        }
      }
    }
  });

  for (const Local& loc : locals) {
    if (loc.per_year.empty()) continue;
    sum.total_floods += loc.floods;
    for (std::size_t t = 0; t < T; ++t) sum.floods_per_year[t] += loc.per_year[t];
    for (std::size_t i = 0; i < refs.size(); ++i) {
      sum.waits[i].censored += loc.censored[i];
      for (std::size_t w = 0; w < sum.waits[i].wait_counts.size(); ++w)
        sum.waits[i].wait_counts[w] += loc.wait_counts[i][w];
    }
  }
  return sum;
}

FloodSequenceEnsemble materialize_sequences(const ProbabilityFan& fan,
                                            std::size_t replicates_per_model,
                                            std::uint64_t seed,
                                            const kernels::Kernel& kern) {
  if (replicates_per_model < 1)
    throw Error("materialize_sequences: replicates_per_model must be >= 1");
  const std::size_t T = fan.years.size();
  const std::size_t M = fan.n_models;
  const std::size_t nwords = (T + 63) / 64;

  std::vector<std::uint64_t> thr(T);
  FloodSequenceEnsemble e;
  e.years = fan.years;
  e.n_sequences = M * replicates_per_model;
  e.words_per_seq = nwords;
  e.seed = seed;
  e.bits.assign(e.n_sequences * nwords, 0);

  const rng::StreamKey root = rng::stream_root(seed, rng::kTagSimulate);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t t = 0; t < T; ++t) thr[t] = rng::bernoulli_threshold(fan.at(m, t));
    const rng::StreamKey key_m = rng::substream(root, m);
    for (std::size_t r = 0; r < replicates_per_model; ++r) {
      const rng::StreamKey key = rng::substream(key_m, r);
      kern.bernoulli_bits(key, thr.data(), T,
                          e.bits.data() + (m * replicates_per_model + r) * nwords);
    }
  }
  return e;
}

WaitTimeSummary wait_times(const FloodSequenceEnsemble& e, int reference_year) {
  const auto refs = resolve_references(e.years, std::span<const int>(&reference_year, 1));
  const std::size_t t0 = refs[0].t;
  const std::size_t T = e.years.size();

  WaitTimeSummary w;
  w.reference_year = reference_year;
  w.horizon = e.years.back();
  w.n_sequences = e.n_sequences;
  w.wait_counts.assign(static_cast<std::size_t>(e.years.back() - reference_year), 0);
  for (std::size_t s = 0; s < e.n_sequences; ++s) {
    const std::size_t hit =
        first_flood_after(e.bits.data() + s * e.words_per_seq, e.words_per_seq, t0);
    if (hit == static_cast<std::size_t>(-1) || hit >= T)
      w.censored += 1;
    else
      w.wait_counts[hit - t0 - 1] += 1;
  }
  return w;
}

KmMedian km_median(const WaitTimeSummary& w) { return km_wait_quantile(w, 0.5); }

KmMedian km_wait_quantile(const WaitTimeSummary& w, double q) {
  const double horizon = w.horizon - w.reference_year;
  if (w.n_sequences == 0) throw Error("km_wait_quantile: no sequences");
  const auto curve = kaplan_meier(w.km_counts());
  return km_quantile(curve, q, horizon);
}

}  // namespace icefreq
