#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "wgibbs/engine.hpp"
#include "wgibbs/error.hpp"
#include "wgibbs/schedulers.hpp"

using namespace wgibbs;
using wgibbs::testing::binomial_band;
using wgibbs::testing::two_pass_variance;

TEST_CASE("systematic_next follows (t-1) mod d") {
  // one-based 1, 5, 1 in the formula are zero-based 0, 4, 0 here
  CHECK(systematic_next(1, 5) == 0);
  CHECK(systematic_next(5, 5) == 4);
  CHECK(systematic_next(6, 5) == 0);
  CHECK_THROWS_AS(systematic_next(0, 5), Error);
  CHECK_THROWS_AS(systematic_next(1, 0), Error);
}

TEST_CASE("categorical_next with a single variable always returns it") {
  Rng rng(7);
  const SelectionWeights q({1.0});
  for (int i = 0; i < 1000; ++i) REQUIRE(categorical_next(rng, q) == 0);
}

TEST_CASE("categorical_next frequencies stay inside binomial bands") {
  constexpr std::size_t n = 100000;
  SUBCASE("fair coin") {
    Rng rng(11);
    const SelectionWeights q({0.5, 0.5});
    std::size_t first = 0;
    for (std::size_t i = 0; i < n; ++i) first += categorical_next(rng, q) == 0;
    const double f = static_cast<double>(first) / n;
    // 3 sigma = 0.0047, inside the stated [0.49, 0.51]
    CHECK(binomial_band(0.5, n) < 0.01);
    CHECK(f >= 0.49);
    CHECK(f <= 0.51);
  }
  SUBCASE("two thirds / one third") {
    Rng rng(12);
    const SelectionWeights q({2.0 / 3.0, 1.0 / 3.0});
    std::size_t first = 0;
    for (std::size_t i = 0; i < n; ++i) first += categorical_next(rng, q) == 0;
    const double f = static_cast<double>(first) / n;
    CHECK(std::abs(f - 2.0 / 3.0) <= binomial_band(2.0 / 3.0, n));
    CHECK(std::abs((1.0 - f) - 1.0 / 3.0) <= binomial_band(1.0 / 3.0, n));
  }
}

TEST_CASE("SelectionWeights enforces its invariants") {
  CHECK_NOTHROW(SelectionWeights({0.25, 0.75}));
  CHECK_THROWS_AS(SelectionWeights({0.5, 0.6}), Error);
  CHECK_THROWS_AS(SelectionWeights({1.0, 0.0}), Error);
  CHECK_THROWS_AS(SelectionWeights({}), Error);
  CHECK_THROWS_AS(SelectionWeights({std::nan(""), 1.0}), Error);
  const auto u = SelectionWeights::uniform(4);
  for (double v : u.values()) CHECK(v == 0.25);
}

TEST_CASE("compute_weights examples") {
  SUBCASE("symmetric") {
    const std::vector<double> d{1, 1, 1};
    const auto q = compute_weights(d, 0.0);
    for (double v : q.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("square roots") {
    const std::vector<double> d{4, 1};
    const auto q = compute_weights(d, 0.0);
    CHECK(q[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(q[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("regularised zero entry") {
    const std::vector<double> d{0, 1};
    const auto q = compute_weights(d, 0.5);
    CHECK(q[0] == 0.25);
    CHECK(q[1] == 0.75);
  }
  SUBCASE("errors") {
    const std::vector<double> zeros{0, 0};
    CHECK_THROWS_AS(compute_weights(zeros, 0.0), Error);
    const std::vector<double> one_zero{0, 1};
    CHECK_THROWS_AS(compute_weights(one_zero, 0.0), Error);
    const std::vector<double> negative{-1, 1};
    CHECK_THROWS_AS(compute_weights(negative, 0.1), Error);
    const std::vector<double> ok{1, 1};
    CHECK_THROWS_AS(compute_weights(ok, -0.1), Error);
  }
}

TEST_CASE("compute_weights properties on random inputs") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng() % 20;
    std::vector<double> dh(d);
    for (auto& v : dh) v = std::pow(10.0, -3.0 + 6.0 * rng.uniform());

    // valid for any positive lambda, even with zero entries
    auto with_zero = dh;
    with_zero[0] = 0.0;
    CHECK_NOTHROW(compute_weights(with_zero, 1e-6));

    // scale invariance at lambda = 0
    const auto q = compute_weights(dh, 0.0);
    for (double c : {1e-6, 0.37, 3.0, 1e8}) {
      std::vector<double> scaled(dh);
      for (auto& v : scaled) v *= c;
      const auto qs = compute_weights(scaled, 0.0);
      for (std::size_t i = 0; i < d; ++i) REQUIRE(std::abs(qs[i] - q[i]) <= 1e-9);
    }

    // monotone at lambda = 0
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        if (dh[a] > dh[b]) REQUIRE(q[a] > q[b]);

    // lambda -> infinity gives the uniform scan
    const auto qu = compute_weights(dh, 1e12);
    for (std::size_t i = 0; i < d; ++i) REQUIRE(std::abs(qu[i] - 1.0 / d) <= 1e-9);
  }
}

TEST_CASE("VarianceAccumulator examples") {
  SUBCASE("constant sequence") {
    VarianceAccumulator acc(2);
    for (int i = 0; i < 3; ++i) acc.feed(0, 1.0);
    REQUIRE(acc.d_hat(0).has_value());
    CHECK(*acc.d_hat(0) == 0.0);
  }
  SUBCASE("two points") {
    VarianceAccumulator acc(1);
    acc.feed(0, 0.0);
    acc.feed(0, 2.0);
    CHECK(acc.mean(0) == 1.0);
    CHECK(acc.sum_squared_deviations(0) / acc.count(0) == 1.0);
    CHECK(*acc.d_hat(0) == 2.0);
  }
  SUBCASE("undefined below two observations") {
    VarianceAccumulator acc(2);
    CHECK_FALSE(acc.d_hat(0).has_value());
    acc.feed(0, 5.0);
    CHECK_FALSE(acc.d_hat(0).has_value());
    CHECK(acc.d_hat_or_zero()[0] == 0.0);
  }
  SUBCASE("standard normal draws") {
    constexpr std::size_t n = 10000;
    VarianceAccumulator acc(1);
    Rng rng(31);
    for (std::size_t i = 0; i < n; ++i) acc.feed(0, rng.normal());
    // sd of the sample variance is sqrt(2 / n); d_hat doubles it
    const double band = 3.0 * 2.0 * std::sqrt(2.0 / n);
    CHECK(band < 0.2);
    CHECK(*acc.d_hat(0) >= 1.8);
    CHECK(*acc.d_hat(0) <= 2.2);
    CHECK(std::abs(*acc.d_hat(0) - 2.0) <= band);
  }
}

TEST_CASE("VarianceAccumulator matches a two-pass reference") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    // offsets beyond ~1e4 standard deviations lose the variance to rounding
    // in any double-precision method, so keep the ratio fixed
    const double scale = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const double offset = trial % 2 ? 1e4 * scale : 0.0;
    std::vector<double> x(2 + rng() % 500);
    for (auto& v : x) v = offset + scale * rng.normal();
    VarianceAccumulator acc(3);
    for (double v : x) acc.feed(1, v);
    const double ref = 2.0 * two_pass_variance(x);
    REQUIRE(std::abs(*acc.d_hat(1) - ref) <= 1e-9 * ref);
    // untouched variables stay empty
    CHECK(acc.count(0) == 0);
    CHECK(acc.count(2) == 0);
  }
}

TEST_CASE("VarianceAccumulator with forgetting matches weighted moments") {
  const double f = 0.9;
  Rng rng(43);
  std::vector<double> x(200);
  for (auto& v : x) v = 3.0 + rng.normal();
  VarianceAccumulator acc(1, f);
  for (double v : x) acc.feed(0, v);
  double wsum = 0.0, mean = 0.0;
  std::vector<double> w(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) w[t] = std::pow(f, static_cast<double>(x.size() - 1 - t));
  for (std::size_t t = 0; t < x.size(); ++t) {
    wsum += w[t];
    mean += w[t] * x[t];
  }
  mean /= wsum;
  double var = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) var += w[t] * (x[t] - mean) * (x[t] - mean);
  var /= wsum;
  CHECK(acc.mean(0) == doctest::Approx(mean).epsilon(1e-10));
  CHECK(*acc.d_hat(0) == doctest::Approx(2.0 * var).epsilon(1e-9));
  CHECK_THROWS_AS(VarianceAccumulator(1, 0.0), Error);
  CHECK_THROWS_AS(VarianceAccumulator(1, 1.5), Error);
}

namespace {

// Drives a scheduler directly: the selected variable reports a fresh draw
// with the given standard deviation.
std::vector<std::size_t> drive(Scheduler& s, const std::vector<double>& sd, std::size_t steps, Rng& rng) {
  s.reset(sd.size(), SummaryKind::Value);
  std::vector<std::size_t> visits(sd.size(), 0);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto i = s.next(rng);
    ++visits[i];
    s.observe(i, sd[i] * rng.normal());
  }
  return visits;
}

}  // namespace

TEST_CASE("weighted scheduler converges to sqrt-variance weights") {
  // summary variances (4, 1) give d_hat (8, 2); sqrt ratio 2 : 1
  WeightedSchedulerConfig cfg;
  cfg.regularization = 1e-6;
  WeightedScheduler s(cfg);
  Rng rng(51);
  drive(s, {2.0, 1.0}, 200000, rng);
  CHECK(std::abs(s.weights()->values()[0] - 2.0 / 3.0) <= 0.02);
  CHECK(std::abs(s.weights()->values()[1] - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("weighted scheduler stays near uniform for exchangeable variables") {
  WeightedScheduler s;
  Rng rng(52);
  drive(s, std::vector<double>(6, 1.0), 100000, rng);
  for (double v : s.weights()->values()) CHECK(std::abs(v - 1.0 / 6.0) <= 0.05);
}

TEST_CASE("weighted scheduler with an update period beyond the run keeps uniform q") {
  constexpr std::size_t steps = 60000;
  WeightedSchedulerConfig cfg;
  cfg.update_period = steps + 1;
  WeightedScheduler s(cfg);
  Rng rng(53);
  const auto visits = drive(s, {10.0, 1.0, 0.1}, steps, rng);
  CHECK(s.weights_version() == 0);
  for (double v : s.weights()->values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (auto c : visits)
    CHECK(std::abs(static_cast<double>(c) / steps - 1.0 / 3.0) <= binomial_band(1.0 / 3.0, steps));
}

TEST_CASE("weighted scheduler refreshes every k steps") {
  WeightedSchedulerConfig cfg;
  cfg.update_period = 7;
  WeightedScheduler s(cfg);
  Rng rng(54);
  s.reset(3, SummaryKind::Value);
  for (int t = 0; t < 6; ++t) s.observe(static_cast<std::size_t>(t % 3), rng.normal());
  // first draw after data has arrived refreshes, then every 7 steps
  std::vector<std::uint64_t> versions;
  for (int t = 0; t < 22; ++t) {
    const auto i = s.next(rng);
    versions.push_back(s.weights_version());
    s.observe(i, rng.normal());
  }
  CHECK(versions[0] == 1);
  CHECK(versions[6] == 1);
  CHECK(versions[7] == 2);
  CHECK(versions[14] == 3);
  CHECK(versions[21] == 4);
}

TEST_CASE("weighted scheduler regularisation keeps every variable reachable") {
  WeightedScheduler s;  // relative lambda = mean sqrt(d_hat)
  Rng rng(55);
  drive(s, {100.0, 1.0, 0.0, 0.0}, 20000, rng);
  for (double v : s.weights()->values()) CHECK(v >= 1.0 / (2.0 * 4) - 1e-12);
  CHECK(s.current_regularization() > 0.0);
}

TEST_CASE("a variable without an estimate borrows the mean estimate") {
  WeightedSchedulerConfig cfg;
  cfg.regularization = 1e-9;
  WeightedScheduler s(cfg);
  s.reset(3, SummaryKind::Value);
  for (double v : {0.0, 2.0}) s.observe(0, v);  // d_hat = 2 * 1
  for (double v : {0.0, 1.0}) s.observe(1, v);  // d_hat = 2 * 0.25
  s.observe(2, 5.0);                             // one value: undefined
  const auto d = s.current_d_hat();
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(0.5));
  CHECK(d[2] == doctest::Approx(1.25));
  Rng rng(57);
  s.next(rng);
  CHECK(s.weights()->values()[2] > 0.3);

  // nothing defined anywhere: uniform
  WeightedScheduler u(cfg);
  u.reset(2, SummaryKind::Value);
  u.observe(0, 1.0);
  u.next(rng);
  for (double v : u.weights()->values()) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("freezing after burn-in stops weight updates") {
  WeightedSchedulerConfig cfg;
  cfg.adapt_after_burn_in = false;
  WeightedScheduler s(cfg);
  Rng rng(56);
  drive(s, {3.0, 1.0}, 1000, rng);
  s.on_burn_in_complete();
  const auto v = s.weights_version();
  const auto q = *s.weights();
  for (int t = 0; t < 1000; ++t) s.observe(s.next(rng), 100.0 * rng.normal());
  CHECK(s.weights_version() == v);
  CHECK(*s.weights() == q);
}

TEST_CASE("squared-jump summaries feed their running mean") {
  WeightedSchedulerConfig cfg;
  cfg.regularization = 0.0;
  WeightedScheduler s(cfg);
  s.reset(2, SummaryKind::SquaredJump);
  for (double v : {4.0, 4.0, 4.0}) s.observe(0, v);
  for (double v : {1.0, 1.0}) s.observe(1, v);
  const auto d = s.current_d_hat();
  CHECK(d[0] == 4.0);
  CHECK(d[1] == 1.0);
}

TEST_CASE("make_scheduler and clone") {
  for (const char* name : {"systematic", "random", "weighted"}) {
    auto s = make_scheduler(name);
    CHECK(s->name() == name);
    auto c = s->clone();
    CHECK(c->name() == name);
  }
  CHECK_THROWS_AS(make_scheduler("gibbs"), Error);
}

TEST_CASE("random scan with fixed q") {
  const SelectionWeights q({0.7, 0.2, 0.1});
  RandomScanScheduler s(q);
  s.reset(3, SummaryKind::Value);
  CHECK(*s.weights() == q);
  CHECK_THROWS_AS(s.reset(2, SummaryKind::Value), Error);
}
