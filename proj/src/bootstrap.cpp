#include "icefreq/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "icefreq/csv.hpp"
#include "icefreq/parallel.hpp"
#include "icefreq/rng.hpp"
#include "icefreq/stats.hpp"

namespace icefreq {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::size_t BootstrapEnsemble::n_converged() const {
  std::size_t c = 0;
  for (auto f : converged) c += f;
  return c;
}

std::string BootstrapEnsemble::diagnostics() const {
  std::ostringstream os;
  const std::size_t bad = B - n_converged();
  os << "bootstrap: " << B << " replicates, " << bad << " non-converged ("
     << csv::format_g6(B ? 100.0 * static_cast<double>(bad) / static_cast<double>(B) : 0.0)
     << "%) excluded from summaries";
  return os.str();
}

BootstrapEnsemble parametric_bootstrap(const FittedModel& m, const DesignMatrix& d,
                                       std::size_t B, std::uint64_t seed,
                                       int threads, const FirthOptions& opt) {
  if (!m.converged) throw Error("parametric_bootstrap: source model did not converge");
  if (B < 1) throw Error("parametric_bootstrap: B must be >= 1");

  // fitted probabilities are shared by every replicate
  std::vector<std::uint64_t> thresholds(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    double eta = 0;
    for (std::size_t j = 0; j < d.k; ++j) eta += d.at(i, j) * m.beta[j];
    thresholds[i] = rng::bernoulli_threshold(logistic(eta));
  }

  BootstrapEnsemble e;
  e.B = B;
  e.k = d.k;
  e.names = d.names;
  e.seed = seed;
  e.source_beta = m.beta;
  e.scaling = m.scaling;
  e.betas.assign(B * d.k, kNaN);
  e.converged.assign(B, 0);

  const rng::StreamKey root = rng::stream_root(seed, rng::kTagBootstrap);
  parallel_chunks(B, threads, [&](std::size_t b0, std::size_t b1) {
    std::vector<int> y(d.n);
    for (std::size_t b = b0; b < b1; ++b) {
      const rng::StreamKey kb = rng::substream(root, b);
      int ones = 0;
      for (std::size_t i = 0; i < d.n; ++i) {
        const int yi = (rng::draw_u64(kb, i) >> 11) < thresholds[i] ? 1 : 0;
        y[i] = yi;
        ones += yi;
      }
      // all-0/all-1 histories leave the covariate effects unidentified
      if (ones == 0 || static_cast<std::size_t>(ones) == d.n) continue;
      DesignMatrix db = d;
      db.y = y;
      try {
        const FittedModel fb = fit_firth(db, opt);
        if (!fb.converged) continue;
        for (std::size_t j = 0; j < d.k; ++j) e.betas[b * d.k + j] = fb.beta[j];
        e.converged[b] = 1;
      } catch (const Error&) {
        // singular refit: leave the replicate flagged non-converged
      }
    }
  });
  return e;
}

std::vector<CoefInterval> percentile_ci(const BootstrapEnsemble& e, double level) {
  if (!(level > 0 && level < 1)) throw Error("percentile_ci: level outside (0,1)");
  // a single converged replicate degenerates to a zero-width interval
  if (e.n_converged() < 1) throw Error("percentile_ci: no converged replicates");
  std::vector<CoefInterval> out(e.k);
  std::vector<double> col;
  col.reserve(e.B);
  for (std::size_t j = 0; j < e.k; ++j) {
    col.clear();
    for (std::size_t b = 0; b < e.B; ++b)
      if (e.converged[b]) col.push_back(e.beta_at(b, j));
    std::sort(col.begin(), col.end());
    out[j].lo = quantile_sorted(col, (1.0 - level) / 2.0);
    out[j].hi = quantile_sorted(col, 1.0 - (1.0 - level) / 2.0);
  }
  return out;
}

std::vector<std::vector<double>> sample_models(const BootstrapEnsemble& e,
                                               std::size_t count, std::uint64_t seed,
                                               bool identity) {
  std::vector<std::size_t> rows;
  for (std::size_t b = 0; b < e.B; ++b)
    if (e.converged[b]) rows.push_back(b);
  if (rows.empty()) throw Error("sample_models: ensemble has no converged replicates");

  std::vector<std::vector<double>> out;
  if (identity) {
    out.reserve(rows.size());
    for (std::size_t b : rows) {
      out.emplace_back(e.betas.begin() + static_cast<std::ptrdiff_t>(b * e.k),
                       e.betas.begin() + static_cast<std::ptrdiff_t>((b + 1) * e.k));
    }
    return out;
  }
  Rng r(seed, rng::kTagModelDraw);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t b = rows[r.below(rows.size())];
    out.emplace_back(e.betas.begin() + static_cast<std::ptrdiff_t>(b * e.k),
                     e.betas.begin() + static_cast<std::ptrdiff_t>((b + 1) * e.k));
  }
  return out;
}

void save_ensemble_csv(const std::filesystem::path& path, const BootstrapEnsemble& e) {
  std::ostringstream os;
  os << "replicate";
  for (std::size_t j = 0; j < e.k; ++j) os << ",beta_" << j;
  os << ",converged\n";
  os << "# seed=" << e.seed << " scaling=" << e.scaling;
  for (std::size_t j = 0; j < e.k; ++j) os << " name_" << j << "=" << e.names[j];
  os << " source=";
  for (std::size_t j = 0; j < e.k; ++j)
    os << (j ? ";" : "") << csv::format_full(e.source_beta[j]);
  os << "\n";
  for (std::size_t b = 0; b < e.B; ++b) {
    os << b;
    for (std::size_t j = 0; j < e.k; ++j) {
      os << ',';
      if (e.converged[b]) os << csv::format_full(e.beta_at(b, j));
    }
    os << ',' << int(e.converged[b]) << "\n";
  }
  csv::write_file(path, os.str());
}

BootstrapEnsemble load_ensemble_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.size() < 2) throw Error("ensemble csv: missing header/metadata: " + path.string());
  const auto header = csv::split_line(lines[0]);
  if (header.size() < 3 || header.front() != "replicate" || header.back() != "converged")
    throw Error("ensemble csv: unexpected header in " + path.string());
  BootstrapEnsemble e;
  e.k = header.size() - 2;
  e.names.assign(e.k, "");

  // metadata comment line
  const std::string& meta = lines[1];
  if (meta.rfind("# ", 0) != 0) throw Error("ensemble csv: missing metadata line");
  std::istringstream ms(meta.substr(2));
  std::string tok;
  e.source_beta.assign(e.k, 0.0);
  while (ms >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "seed") e.seed = std::stoull(val);
    else if (key == "scaling") e.scaling = val;
    else if (key == "source") {
      std::istringstream vs(val);
      std::string part;
      std::size_t j = 0;
      while (std::getline(vs, part, ';') && j < e.k)
        e.source_beta[j++] = csv::parse_double(part, "ensemble source beta");
    } else if (key.rfind("name_", 0) == 0) {
      const std::size_t j = std::stoul(key.substr(5));
      if (j < e.k) e.names[j] = val;
    }
  }

  for (std::size_t li = 2; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = csv::split_line(lines[li]);
    if (f.size() != e.k + 2)
      throw Error("ensemble csv: bad field count on line " + std::to_string(li + 1));
    const int conv = static_cast<int>(csv::parse_long(f.back(), "converged flag"));
    for (std::size_t j = 0; j < e.k; ++j) {
      const auto v = csv::parse_optional_double(f[j + 1], "ensemble beta");
      e.betas.push_back(v ? *v : kNaN);
    }
    e.converged.push_back(conv ? 1 : 0);
  }
  e.B = e.converged.size();
  return e;
}

}  // namespace icefreq
