#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "icefreq/firth.hpp"
#include "icefreq/rng.hpp"
#include "icefreq/stats.hpp"

using namespace icefreq;

namespace {

DesignMatrix intercept_only(std::size_t n, std::size_t ones) {
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < ones; ++i) y[i] = 1;
  return DesignMatrix::build({}, {}, y);
}

// random logistic dataset with known coefficients
DesignMatrix simulate_dataset(std::size_t n, std::vector<double> beta, Rng& rng,
                              std::vector<std::vector<double>>* covs_out = nullptr) {
  const std::size_t ncov = beta.size() - 1;
  std::vector<std::vector<double>> covs(ncov, std::vector<double>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = beta[0];
    for (std::size_t j = 0; j < ncov; ++j) {
      covs[j][i] = rng.normal();
      eta += beta[j + 1] * covs[j][i];
    }
    y[i] = rng.bernoulli(logistic(eta)) ? 1 : 0;
  }
  if (covs_out) *covs_out = covs;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < ncov; ++j) names.push_back("x" + std::to_string(j + 1));
  return DesignMatrix::build(names, covs, y);
}

}  // namespace

TEST_CASE("logistic function basics") {
  CHECK(logistic(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // logit round trip at p = 0.135
  CHECK(logistic(logit(0.135)) == doctest::Approx(0.135).epsilon(1e-15));
  // direct evaluation at the published intercept
  CHECK(logistic(-4.84) == doctest::Approx(0.00785).epsilon(1e-3));

  // symmetric and strictly inside (0,1) over a wide range
  for (double eta = -80.0; eta <= 80.0; eta += 0.25) {
    const double p = logistic(eta);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(std::abs(logistic(-eta) - (1.0 - p)) <= 1e-15);
  }
  // strictly increasing below double saturation, nondecreasing beyond
  double prev = 0.0;
  for (double eta = -30.0; eta <= 30.0; eta += 0.25) {
    const double p = logistic(eta);
    CHECK(p > prev);
    prev = p;
  }
  CHECK(logistic(400.0) >= logistic(41.0));
}

TEST_CASE("intercept-only closed form: logit of the (s+1/2)/(n+1) adjusted rate") {
  const DesignMatrix d = intercept_only(55, 7);
  const FittedModel m = fit_firth(d);
  REQUIRE(m.converged);
  CHECK(std::abs(m.beta[0] - std::log(7.5 / 48.5)) < 1e-8);

  // the invariant form of the same identity, at the solver tolerance
  CHECK(std::abs(m.beta[0] - logit((7.0 + 0.5) / (55.0 + 1.0))) < 1e-8);

  // published constant-model AICc for 7 floods in 55 years (penalized value)
  CHECK(m.aicc == doctest::Approx(42.17).epsilon(0.0003));

  // the unpenalized switch changes it
  FirthOptions unpen;
  unpen.aicc_lik = AiccLik::unpenalized;
  const FittedModel mu = fit_firth(d, unpen);
  CHECK(mu.aicc == doctest::Approx(aicc_formula(mu.loglik, 1, 55)).epsilon(1e-12));
  CHECK(mu.aicc > m.aicc);
}

TEST_CASE("aicc formula") {
  CHECK(aicc_formula(-20.0, 1, 55) == doctest::Approx(42.0 + 4.0 / 53.0).epsilon(1e-12));
  CHECK_THROWS_AS(aicc_formula(-20.0, 5, 6), Error);
  CHECK_THROWS_AS(aicc_formula(-20.0, 5, 5), Error);
}

TEST_CASE("complete separation stays finite and converged") {
  const std::vector<std::vector<double>> covs{{-2.0, -1.0, 1.0, 2.0}};
  const DesignMatrix d = DesignMatrix::build({"x"}, covs, {0, 0, 1, 1});
  const FittedModel m = fit_firth(d);
  REQUIRE(m.converged);
  CHECK(std::isfinite(m.beta[0]));
  CHECK(std::isfinite(m.beta[1]));
  CHECK(m.beta[1] > 0);

  // stationarity of the modified score at the estimate
  const auto u = firth_modified_score(d, m.beta);
  for (double ui : u) CHECK(std::abs(ui) < 1e-8);
}

TEST_CASE("firth estimates exist whenever both responses occur") {
  Rng rng(101, rng::kTagTest);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 8 + static_cast<std::size_t>(rng.below(30));
    DesignMatrix d = simulate_dataset(n, {0.0, 2.5}, rng);
    const int ones = std::count(d.y.begin(), d.y.end(), 1);
    if (ones == 0 || static_cast<std::size_t>(ones) == n) continue;
    const FittedModel m = fit_firth(d);
    CHECK(m.converged);
    for (double b : m.beta) CHECK(std::isfinite(b));
  }
}

TEST_CASE("modified score is below tolerance at every converged fit") {
  Rng rng(103, rng::kTagTest);
  const DesignMatrix d = simulate_dataset(60, {-0.5, 1.0, -1.5}, rng);
  const FittedModel m = fit_firth(d);
  REQUIRE(m.converged);
  for (double ui : firth_modified_score(d, m.beta)) CHECK(std::abs(ui) < 1e-8);
}

TEST_CASE("shift and scale invariance of the fit") {
  Rng rng(107, rng::kTagTest);
  std::vector<std::vector<double>> covs;
  DesignMatrix d = simulate_dataset(50, {-1.0, 1.2, -0.8}, rng, &covs);
  const FittedModel m = fit_firth(d);
  REQUIRE(m.converged);

  const double c = 3.7;
  auto shifted = covs;
  for (double& v : shifted[0]) v += c;
  const DesignMatrix ds = DesignMatrix::build({"x1", "x2"}, shifted, d.y);
  const FittedModel msh = fit_firth(ds);
  CHECK(std::abs(msh.beta[1] - m.beta[1]) < 1e-6);
  CHECK(std::abs(msh.beta[2] - m.beta[2]) < 1e-6);
  CHECK(std::abs(msh.beta[0] - (m.beta[0] - c * m.beta[1])) < 1e-6);

  const double s = 0.25;
  auto scaled = covs;
  for (double& v : scaled[1]) v *= s;
  const DesignMatrix dc = DesignMatrix::build({"x1", "x2"}, scaled, d.y);
  const FittedModel msc = fit_firth(dc);
  CHECK(std::abs(msc.beta[2] - m.beta[2] / s) < 1e-6);
  CHECK(std::abs(msc.beta[1] - m.beta[1]) < 1e-6);

  // predictions unchanged under both transformations
  for (std::size_t i = 0; i < d.n; ++i) {
    const std::vector<double> x{covs[0][i], covs[1][i]};
    const std::vector<double> xs{covs[0][i] + c, covs[1][i]};
    const std::vector<double> xc{covs[0][i], covs[1][i] * s};
    CHECK(std::abs(predict_prob(m, x) - predict_prob(msh, xs)) < 1e-10);
    CHECK(std::abs(predict_prob(m, x) - predict_prob(msc, xc)) < 1e-10);
  }
}

TEST_CASE("covariance is symmetric positive definite at the fit") {
  Rng rng(109, rng::kTagTest);
  const DesignMatrix d = simulate_dataset(45, {-0.7, 0.9, 0.6}, rng);
  const FittedModel m = fit_firth(d);
  REQUIRE(m.converged);
  for (std::size_t i = 0; i < m.k(); ++i)
    for (std::size_t j = 0; j < m.k(); ++j) CHECK(m.cov(i, j) == m.cov(j, i));
  CHECK(cholesky(m.cov).ok);
}

TEST_CASE("prediction arithmetic") {
  FittedModel m;
  m.names = {"const", "precip", "ddf"};
  m.beta = {-4.84, 2.37, -1.68};

  // all-zero covariates reduce to the intercept
  CHECK(predict_prob(m, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(logistic(-4.84)).epsilon(1e-15));

  // wet, cold year from the published coefficients
  const double p = predict_prob(m, std::vector<double>{1.0, -1.0});
  CHECK(p == doctest::Approx(logistic(-0.79)).epsilon(1e-12));
  CHECK(p == doctest::Approx(0.312).epsilon(2e-3));

  // monotone in a positive-coefficient covariate
  CHECK(predict_prob(m, std::vector<double>{0.5, 0.0}) >
        predict_prob(m, std::vector<double>{0.2, 0.0}));

  CHECK_THROWS_AS(predict_prob(m, std::vector<double>{1.0}), Error);
}

TEST_CASE("collinear columns are rejected naming the offender") {
  std::vector<std::vector<double>> covs{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0},
                                        {2.0, 4.0, 6.0, 8.0, 10.0, 12.0}};
  const DesignMatrix d = DesignMatrix::build({"a", "twice_a"}, covs, {0, 1, 0, 1, 0, 1});
  CHECK_THROWS_WITH_AS(fit_firth(d), doctest::Contains("twice_a"), Error);
}

TEST_CASE("design matrix validation") {
  CHECK_THROWS_AS(DesignMatrix::build({}, {}, {0, 1, 2}), Error);     // bad response
  CHECK_THROWS_AS(DesignMatrix::build({"x"}, {{1.0}}, {0, 1}), Error);  // ragged
  CHECK_THROWS_AS(
      DesignMatrix::build({"x"}, {{1.0, std::nan("")}}, {0, 1}), Error);  // non-finite
  CHECK_THROWS_AS(DesignMatrix::build({"x"}, {{1.0, 2.0}}, {0, 1}), Error);  // n <= k
}

TEST_CASE("penalized likelihood-ratio p-values are roughly uniform under the null") {
  // pure-noise covariate appended to an intercept model, n = 200
  Rng rng(113, rng::kTagTest);
  const int sims = 300;
  std::vector<double> pvals;
  for (int s = 0; s < sims; ++s) {
    const std::size_t n = 200;
    std::vector<std::vector<double>> covs(1, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      covs[0][i] = rng.normal();
      y[i] = rng.bernoulli(logistic(-1.0)) ? 1 : 0;
    }
    const DesignMatrix d = DesignMatrix::build({"noise"}, covs, y);
    const FittedModel m = fit_firth(d);
    if (!m.converged) continue;
    const double p = plr_p_value(d, m, 1);
    if (std::isfinite(p)) pvals.push_back(p);
  }
  REQUIRE(pvals.size() > 280);

  // Kolmogorov-Smirnov distance against U(0,1) at alpha = 0.01
  std::sort(pvals.begin(), pvals.end());
  double dmax = 0;
  const double n = static_cast<double>(pvals.size());
  for (std::size_t i = 0; i < pvals.size(); ++i) {
    dmax = std::max(dmax, std::abs((i + 1) / n - pvals[i]));
    dmax = std::max(dmax, std::abs(pvals[i] - i / n));
  }
  CHECK(dmax < 1.628 / std::sqrt(n));
}

TEST_CASE("p-values populate for a strong signal and flag the intercept too") {
  Rng rng(127, rng::kTagTest);
  DesignMatrix d = simulate_dataset(120, {-1.0, 2.0}, rng);
  FittedModel m = fit_firth(d);
  REQUIRE(m.converged);
  compute_p_values(d, m);
  REQUIRE(m.p_values.size() == 2);
  CHECK(m.p_values[1] < 0.001);   // real effect
  CHECK(m.wald_p[1] < 0.01);
  for (double p : m.p_values) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}
