#include "icefreq/firth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icefreq/error.hpp"
#include "icefreq/stats.hpp"

namespace icefreq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything the Newton iteration needs at one beta.
struct EvalState {
  std::vector<double> p, w;  // n
  Mat xtwx;                  // k x k
  Cholesky chol;
  Mat xtwx_inv;              // only when requested
  std::vector<double> h;     // hat diagonal, only when requested
  double loglik = 0;
  double penalized = 0;
};

[[noreturn]] void throw_singular(const DesignMatrix& d, std::size_t col) {
  throw Error("singular X'WX: column '" + d.names[col] +
              "' is collinear with earlier columns");
}

EvalState eval_at(const DesignMatrix& d, std::span<const double> beta, bool with_hat) {
  const std::size_t n = d.n, k = d.k;
  EvalState st;
  st.p.resize(n);
  st.w.resize(n);
  st.loglik = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0;
    for (std::size_t j = 0; j < k; ++j) eta += d.at(i, j) * beta[j];
    st.p[i] = logistic(eta);
    st.w[i] = st.p[i] * (1.0 - st.p[i]);
    st.loglik += d.y[i] ? eta - log1pexp(eta) : -log1pexp(eta);
  }
  st.xtwx = Mat(k, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < k; ++a) {
      const double wxa = st.w[i] * d.at(i, a);
      for (std::size_t b = a; b < k; ++b) st.xtwx(a, b) += wxa * d.at(i, b);
    }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < a; ++b) st.xtwx(a, b) = st.xtwx(b, a);
  st.chol = cholesky(st.xtwx);
  if (!st.chol.ok) throw_singular(d, st.chol.fail_col);
  st.penalized = st.loglik + 0.5 * chol_logdet(st.chol);
  if (with_hat) {
    st.xtwx_inv = chol_inverse(st.chol);
    st.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double q = 0;  // x_i' (X'WX)^-1 x_i
      for (std::size_t a = 0; a < k; ++a) {
        double row = 0;
        for (std::size_t b = 0; b < k; ++b) row += st.xtwx_inv(a, b) * d.at(i, b);
        q += d.at(i, a) * row;
      }
      st.h[i] = st.w[i] * q;
    }
  }
  return st;
}

std::vector<double> modified_score(const DesignMatrix& d, const EvalState& st) {
  std::vector<double> u(d.k, 0.0);
  for (std::size_t i = 0; i < d.n; ++i) {
    const double r = d.y[i] - st.p[i] + st.h[i] * (0.5 - st.p[i]);
    for (std::size_t j = 0; j < d.k; ++j) u[j] += r * d.at(i, j);
  }
  return u;
}

// Newton iteration over the coefficients listed in `free_idx`; the others
// stay at their starting value (used for the restricted fits behind the
// likelihood-ratio p-values).
FittedModel fit_masked(const DesignMatrix& d, const FirthOptions& opt,
                       const std::vector<std::size_t>& free_idx) {
  const std::size_t k = d.k, nf = free_idx.size();
  std::vector<double> beta(k, 0.0);

  EvalState cur = eval_at(d, beta, true);
  bool converged = false;
  int iterations = 0;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const std::vector<double> u = modified_score(d, cur);
    double umax = 0;
    for (std::size_t f : free_idx) umax = std::max(umax, std::abs(u[f]));
    if (umax < opt.tol) {
      converged = true;
      break;
    }
    iterations = iter + 1;

    Mat sub(nf, nf);
    std::vector<double> usub(nf);
    for (std::size_t a = 0; a < nf; ++a) {
      usub[a] = u[free_idx[a]];
      for (std::size_t b = 0; b < nf; ++b) sub(a, b) = cur.xtwx(free_idx[a], free_idx[b]);
    }
    const Cholesky subchol = cholesky(sub);
    if (!subchol.ok) throw_singular(d, free_idx[subchol.fail_col]);
    const std::vector<double> delta = chol_solve(subchol, usub);

    // step halving whenever the penalized log-likelihood would drop; an
    // overshoot far enough to degenerate the weights counts as a drop
    double step = 1.0;
    std::vector<double> cand = beta;
    for (int half = 0;; ++half) {
      for (std::size_t a = 0; a < nf; ++a)
        cand[free_idx[a]] = beta[free_idx[a]] + step * delta[a];
      bool usable = true;
      double cand_penalized = 0;
      try {
        cand_penalized = eval_at(d, cand, false).penalized;
      } catch (const Error&) {
        usable = false;
      }
      if (usable && (cand_penalized >= cur.penalized || half >= opt.max_halvings)) break;
      if (!usable && half >= opt.max_halvings)
        throw Error("firth fit: weights degenerated and step halving exhausted");
      step *= 0.5;
    }
    beta = cand;
    cur = eval_at(d, beta, true);
  }

  FittedModel m;
  m.names = d.names;
  m.beta = beta;
  m.cov = cur.xtwx_inv;
  m.loglik = cur.loglik;
  m.penalized_loglik = cur.penalized;
  m.converged = converged;
  m.iterations = iterations;
  m.n = d.n;
  const double lik = opt.aicc_lik == AiccLik::penalized ? m.penalized_loglik : m.loglik;
  m.aicc = d.n > d.k + 1 ? aicc_formula(lik, d.k, d.n) : kNaN;
  return m;
}

}  // namespace

DesignMatrix DesignMatrix::build(std::vector<std::string> covariate_names,
                                 const std::vector<std::vector<double>>& covariates,
                                 std::vector<int> y) {
  if (covariate_names.size() != covariates.size())
    throw Error("design matrix: covariate name/column count mismatch");
  DesignMatrix d;
  d.n = y.size();
  d.k = covariates.size() + 1;
  if (d.n <= d.k)
    throw Error("design matrix: need more rows than coefficients (n=" +
                std::to_string(d.n) + ", k=" + std::to_string(d.k) + ")");
  d.names.reserve(d.k);
  d.names.push_back("const");
  for (auto& nm : covariate_names) d.names.push_back(std::move(nm));
  for (const auto& col : covariates)
    if (col.size() != d.n) throw Error("design matrix: ragged covariate column");
  for (int yi : y)
    if (yi != 0 && yi != 1) throw Error("design matrix: response must be 0/1");
  d.y = std::move(y);
  d.x.resize(d.n * d.k);
  for (std::size_t i = 0; i < d.n; ++i) {
    d.x[i * d.k] = 1.0;
    for (std::size_t j = 0; j + 1 < d.k; ++j) {
      const double v = covariates[j][i];
      if (!std::isfinite(v))
        throw Error("design matrix: non-finite value in column '" + d.names[j + 1] + "'");
      d.x[i * d.k + j + 1] = v;
    }
  }
  return d;
}

FittedModel fit_firth(const DesignMatrix& d, const FirthOptions& opt) {
  std::vector<std::size_t> all(d.k);
  for (std::size_t j = 0; j < d.k; ++j) all[j] = j;
  return fit_masked(d, opt, all);
}

std::vector<double> firth_modified_score(const DesignMatrix& d,
                                         std::span<const double> beta) {
  const EvalState st = eval_at(d, beta, true);
  return modified_score(d, st);
}

double firth_penalized_loglik(const DesignMatrix& d, std::span<const double> beta) {
  return eval_at(d, beta, false).penalized;
}

double aicc_formula(double loglik, std::size_t k, std::size_t n) {
  if (n <= k + 1)
    throw Error("AICc undefined: n=" + std::to_string(n) + " <= k+1=" +
                std::to_string(k + 1));
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return -2.0 * loglik + 2.0 * kk + 2.0 * kk * (kk + 1.0) / (nn - kk - 1.0);
}

double predict_prob(const FittedModel& m, std::span<const double> x) {
  if (x.size() + 1 != m.k())
    throw Error("predict_prob: expected " + std::to_string(m.k() - 1) +
                " covariates, got " + std::to_string(x.size()));
  double eta = m.beta[0];
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw Error("predict_prob: non-finite covariate");
    eta += m.beta[j + 1] * x[j];
  }
  return logistic(eta);
}

double plr_p_value(const DesignMatrix& d, const FittedModel& full, std::size_t j,
                   const FirthOptions& opt) {
  std::vector<std::size_t> free_idx;
  for (std::size_t a = 0; a < d.k; ++a)
    if (a != j) free_idx.push_back(a);
  const FittedModel restricted = fit_masked(d, opt, free_idx);
  if (!restricted.converged) return kNaN;
  const double stat =
      std::max(0.0, 2.0 * (full.penalized_loglik - restricted.penalized_loglik));
  return chisq1_sf(stat);
}

void compute_p_values(const DesignMatrix& d, FittedModel& m, const FirthOptions& opt) {
  m.p_values.assign(m.k(), kNaN);
  m.wald_p.assign(m.k(), kNaN);
  for (std::size_t j = 0; j < m.k(); ++j) {
    m.p_values[j] = plr_p_value(d, m, j, opt);
    const double se = std::sqrt(m.cov(j, j));
    if (se > 0) m.wald_p[j] = normal_two_sided_p(m.beta[j] / se);
  }
}

}  // namespace icefreq
