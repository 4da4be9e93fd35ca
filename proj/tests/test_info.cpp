#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "troenpy/info.hpp"

namespace tp = troenpy;

TEST_CASE("negative information at the anchors") {
  CHECK(tp::negative_information(1.0) == 0.0);
  CHECK(tp::negative_information(0.25) ==
        doctest::Approx(1.3862943611198906).epsilon(1e-12));
  // p = 0 lands on the clamp floor
  CHECK(tp::negative_information(0.0) ==
        doctest::Approx(27.631021115928547).epsilon(1e-12));
  CHECK_THROWS_AS(tp::negative_information(-0.1), std::domain_error);
  CHECK_THROWS_AS(tp::negative_information(1.1), std::domain_error);
  CHECK_THROWS_AS(tp::negative_information(std::nan("")), std::domain_error);
}

TEST_CASE("positive information at the anchors") {
  CHECK(tp::positive_information(0.0) == 0.0);
  CHECK(tp::positive_information(0.75) ==
        doctest::Approx(1.3862943611198906).epsilon(1e-12));
  CHECK(tp::positive_information(0.5) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK_THROWS_AS(tp::positive_information(-0.1), std::domain_error);
  CHECK_THROWS_AS(tp::positive_information(1.1), std::domain_error);
}

TEST_CASE("duality holds exactly on a dense grid") {
  for (int i = 0; i <= 1000; ++i) {
    const double p = static_cast<double>(i) / 1000.0;
    CHECK(tp::positive_information(p) == tp::negative_information(1.0 - p));
  }
}

TEST_CASE("entropy anchors") {
  CHECK(tp::entropy(tp::Distribution({0.5, 0.5})) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(tp::entropy(tp::Distribution({1.0})) == 0.0);
  CHECK(tp::entropy(tp::Distribution({0.9, 0.1})) ==
        doctest::Approx(0.3250829733914482).epsilon(1e-12));
}

TEST_CASE("troenpy anchors") {
  CHECK(tp::troenpy(tp::Distribution({0.5, 0.5})) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(tp::troenpy(tp::Distribution({0.9, 0.1})) ==
        doctest::Approx(2.082862635260424).epsilon(1e-12));
  // degenerate certainty is clamp-dominated: 1 * -ln(1e-12)
  CHECK(tp::troenpy(tp::Distribution({1.0})) ==
        doctest::Approx(27.631021115928547).epsilon(1e-12));
}

TEST_CASE("uniform troenpy equals ln(K/(K-1))") {
  for (int k = 2; k <= 10; ++k) {
    std::vector<double> probs(k, 1.0 / k);
    const double expected = std::log(static_cast<double>(k) / (k - 1));
    CHECK(std::abs(tp::troenpy(tp::Distribution(probs)) - expected) < 1e-12);
  }
}

TEST_CASE("skewed binary distributions trade entropy for troenpy") {
  double prev_troenpy = tp::troenpy(tp::Distribution({0.5, 0.5}));
  double prev_entropy = tp::entropy(tp::Distribution({0.5, 0.5}));
  for (double p = 0.55; p < 0.99; p += 0.05) {
    const tp::Distribution d({p, 1.0 - p});
    const double t = tp::troenpy(d);
    const double h = tp::entropy(d);
    CHECK(t > prev_troenpy);
    CHECK(h < prev_entropy);
    prev_troenpy = t;
    prev_entropy = h;
  }
}

TEST_CASE("troenpy and entropy cross at the uniform binary point") {
  const tp::Distribution d({0.5, 0.5});
  CHECK(tp::troenpy(d) == tp::entropy(d));
}

TEST_CASE("permutation invariance") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 30; ++round) {
    const std::size_t k = 2 + rng() % 6;
    std::vector<double> weights(k);
    for (auto& w : weights) {
      w = 1.0 + static_cast<double>(rng() % 1000);
    }
    auto d = tp::Distribution::normalized(weights);
    auto probs = d.probs();
    std::shuffle(probs.begin(), probs.end(), rng);
    const tp::Distribution shuffled(probs);
    CHECK(tp::entropy(shuffled) == doctest::Approx(tp::entropy(d)).epsilon(1e-12));
    CHECK(tp::troenpy(shuffled) == doctest::Approx(tp::troenpy(d)).epsilon(1e-12));
  }
}

TEST_CASE("non-negativity everywhere") {
  std::mt19937_64 rng(23);
  for (int i = 0; i <= 100; ++i) {
    const double p = static_cast<double>(i) / 100.0;
    CHECK(tp::negative_information(p) >= 0.0);
    CHECK(tp::positive_information(p) >= 0.0);
  }
  for (int round = 0; round < 50; ++round) {
    std::vector<double> weights(2 + rng() % 8);
    for (auto& w : weights) {
      w = static_cast<double>(rng() % 100);
    }
    if (std::all_of(weights.begin(), weights.end(),
                    [](double w) { return w == 0.0; })) {
      weights[0] = 1.0;
    }
    const auto d = tp::Distribution::normalized(weights);
    CHECK(tp::entropy(d) >= 0.0);
    CHECK(tp::troenpy(d) >= 0.0);
    CHECK(tp::entropy(d) <= std::log(static_cast<double>(d.size())) + 1e-12);
  }
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(tp::Distribution({}), std::domain_error);
  CHECK_THROWS_AS(tp::Distribution({0.5, 0.4}), std::domain_error);
  CHECK_THROWS_AS(tp::Distribution({1.2, -0.2}), std::domain_error);
  CHECK_THROWS_AS(tp::Distribution({0.5, 0.5, 0.5}), std::domain_error);
  CHECK_NOTHROW(tp::Distribution({0.3, 0.7}));

  const auto d = tp::Distribution::normalized({2.0, 2.0});
  CHECK(d[0] == 0.5);
  CHECK(d[1] == 0.5);
  CHECK_THROWS_AS(tp::Distribution::normalized({-1.0, 2.0}), std::domain_error);
  CHECK_THROWS_AS(tp::Distribution::normalized({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(tp::Distribution::normalized({}), std::domain_error);
}
