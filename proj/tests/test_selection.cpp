#include <doctest.h>

#include <cmath>
#include <optional>

#include "icefreq/rng.hpp"
#include "icefreq/selection.hpp"

using namespace icefreq;

namespace {

std::vector<std::optional<double>> wrap(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

// feature table where `driver` actually drives the flood odds and the other
// columns are noise
FeatureTable synthetic_table(std::size_t n, double slope, Rng& rng) {
  FeatureTable t;
  std::vector<double> driver(n), noise1(n), noise2(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.years.push_back(1950 + static_cast<int>(i));
    driver[i] = rng.normal();
    noise1[i] = rng.normal();
    noise2[i] = rng.normal();
    const double p = logistic(-1.0 + slope * driver[i]);
    t.flood.push_back(rng.bernoulli(p) ? 1 : 0);
  }
  t.add_column("noise1", wrap(noise1));
  t.add_column("driver", wrap(driver));
  t.add_column("noise2", wrap(noise2));
  return t;
}

}  // namespace

TEST_CASE("a noiseless logit driver is selected at step one") {
  Rng rng(211, rng::kTagTest);
  const FeatureTable t = synthetic_table(200, 2.0, rng);
  const SelectionPath path =
      forward_stepwise(t, {"noise1", "driver", "noise2"});
  REQUIRE(path.steps.size() >= 2);
  CHECK(path.steps[1].added == "driver");
  CHECK(path.chosen >= 1);
  // every candidate was evaluated and recorded
  CHECK(path.steps[1].candidates.size() == 3);
}

TEST_CASE("a single pure-noise candidate mostly leaves the constant model") {
  Rng rng(223, rng::kTagTest);
  int stayed = 0;
  const int sims = 30;
  for (int s = 0; s < sims; ++s) {
    FeatureTable t;
    std::vector<double> noise(200);
    for (std::size_t i = 0; i < 200; ++i) {
      t.years.push_back(1900 + static_cast<int>(i));
      noise[i] = rng.normal();
      t.flood.push_back(rng.bernoulli(0.25) ? 1 : 0);
    }
    t.add_column("noise", wrap(noise));
    const SelectionPath path = forward_stepwise(t, {"noise"});
    if (path.chosen == 0) ++stayed;
  }
  CHECK(stayed >= 24);
}

TEST_CASE("selection is deterministic") {
  Rng rng(227, rng::kTagTest);
  const FeatureTable t = synthetic_table(120, 1.5, rng);
  const SelectionPath a = forward_stepwise(t, {"noise1", "driver", "noise2"});
  const SelectionPath b = forward_stepwise(t, {"noise1", "driver", "noise2"});
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(a.chosen == b.chosen);
  for (std::size_t s = 0; s < a.steps.size(); ++s) {
    CHECK(a.steps[s].added == b.steps[s].added);
    REQUIRE(a.steps[s].model.beta.size() == b.steps[s].model.beta.size());
    for (std::size_t j = 0; j < a.steps[s].model.beta.size(); ++j)
      CHECK(a.steps[s].model.beta[j] == b.steps[s].model.beta[j]);
  }
}

TEST_CASE("a duplicated column never changes the selected covariate set") {
  Rng rng(229, rng::kTagTest);
  FeatureTable t = synthetic_table(150, 2.2, rng);
  const SelectionPath base = forward_stepwise(t, {"driver", "noise1"});

  FeatureTable t2 = t;
  t2.add_column("driver_copy", t.values[t.col_index("driver")]);
  const SelectionPath dup = forward_stepwise(t2, {"driver", "driver_copy", "noise1"});

  REQUIRE(base.chosen == dup.chosen);
  for (std::size_t s = 1; s <= base.chosen; ++s)
    CHECK(base.steps[s].added == dup.steps[s].added);

  // at the step where the copy would enter beside its twin it is skipped
  if (dup.chosen >= 1) {
    const auto& cands = dup.steps.size() > dup.chosen + 1
                            ? dup.steps[dup.chosen + 1].candidates
                            : dup.final_candidates;
    for (const auto& c : cands)
      if (c.name == "driver_copy") CHECK(c.skipped);
  }
}

TEST_CASE("aicc is non-increasing along accepted steps and coefficients grow by one") {
  Rng rng(233, rng::kTagTest);
  FeatureTable t = synthetic_table(200, 1.8, rng);
  // second weak driver
  std::vector<double> w(200);
  auto& drv = t.values[t.col_index("driver")];
  for (std::size_t i = 0; i < 200; ++i) w[i] = 0.5 * *drv[i] + rng.normal();
  t.add_column("weak", wrap(w));

  const SelectionPath path =
      forward_stepwise(t, {"noise1", "driver", "weak", "noise2"});
  for (std::size_t s = 1; s <= path.chosen; ++s) {
    CHECK(path.steps[s].aicc <= path.steps[s - 1].aicc);
    CHECK(path.steps[s].model.beta.size() == s + 1);
    for (const auto& c : path.steps[s].candidates)
      if (!c.skipped) CHECK(c.model.beta.size() == s + 1);
  }
}

TEST_CASE("rows missing an optional covariate are dropped only for its models") {
  Rng rng(239, rng::kTagTest);
  FeatureTable t = synthetic_table(100, 2.0, rng);
  auto gappy = t.values[t.col_index("noise1")];
  for (std::size_t i = 0; i < 100; i += 7) gappy[i].reset();
  t.add_column("gappy", std::move(gappy));

  const SelectionPath path = forward_stepwise(t, {"gappy", "driver"});
  REQUIRE(!path.steps[1].candidates.empty());
  for (const auto& c : path.steps[1].candidates) {
    if (c.name == "gappy") {
      CHECK(!c.comparable);
      CHECK(c.n_rows < 100);
    }
    if (c.name == "driver") {
      CHECK(c.comparable);
      CHECK(c.n_rows == 100);
    }
  }
  // the non-comparable candidate is never the accepted step
  for (std::size_t s = 1; s <= path.chosen; ++s)
    CHECK(path.steps[s].added != "gappy");
}

TEST_CASE("max_steps caps the walk") {
  Rng rng(243, rng::kTagTest);
  FeatureTable t = synthetic_table(200, 1.8, rng);
  std::vector<double> w(200);
  auto& drv = t.values[t.col_index("driver")];
  for (std::size_t i = 0; i < 200; ++i) w[i] = 0.6 * *drv[i] + rng.normal();
  t.add_column("second", wrap(w));

  SelectionOptions opt;
  opt.max_steps = 1;
  const SelectionPath path = forward_stepwise(t, {"driver", "second", "noise1"}, opt);
  CHECK(path.steps.size() <= 2);
  CHECK(path.chosen <= 1);
}

TEST_CASE("empty candidate list returns the intercept-only path") {
  Rng rng(241, rng::kTagTest);
  const FeatureTable t = synthetic_table(60, 1.0, rng);
  const SelectionPath path = forward_stepwise(t, {});
  CHECK(path.steps.size() == 1);
  CHECK(path.chosen == 0);
  CHECK(path.steps[0].model.beta.size() == 1);
}

TEST_CASE("combination menu: constant row matches stepwise step zero bit for bit") {
  Rng rng(251, rng::kTagTest);
  FeatureTable t = synthetic_table(80, 1.5, rng);
  // rename to the conventional precipitation/DDF labels
  t.columns[0] = "gp_precip_pct";
  t.columns[1] = "fv_ddf";

  const auto combos = compare_combinations(t, "gp_precip_pct", "fv_ddf");
  REQUIRE(combos.size() == 5);
  CHECK(combos[0].label == "constant");
  CHECK(combos[1].label == "precip+ddf");
  CHECK(combos[2].label == "precip+ddf+interaction");
  CHECK(combos[3].label == "interaction");
  CHECK(combos[4].label == "first_pc");

  const SelectionPath path = forward_stepwise(t, {});
  CHECK(combos[0].model.beta[0] == path.steps[0].model.beta[0]);
  CHECK(combos[0].aicc == path.steps[0].aicc);

  CHECK(combos[1].model.beta.size() == 3);
  CHECK(combos[2].model.beta.size() == 4);
  CHECK(combos[3].model.beta.size() == 2);
  CHECK(combos[4].model.beta.size() == 2);
  for (const auto& c : combos) CHECK(std::isfinite(c.aicc));
}
