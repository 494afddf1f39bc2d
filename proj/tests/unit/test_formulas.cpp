#include <catch_amalgamated.hpp>

#include <random>

#include "rageval/error.hpp"
#include "rageval/metrics/formulas.hpp"

using namespace rageval;
using Catch::Approx;

TEST_CASE("faithfulness ratio", "[formulas]") {
  CHECK(*faithfulness_score(3, 4) == 0.75);
  CHECK(*faithfulness_score(2, 2) == 1.0);
  CHECK(*faithfulness_score(0, 5) == 0.0);
  CHECK_FALSE(faithfulness_score(0, 0));
  CHECK_THROWS_AS(faithfulness_score(3, 2), Error);
}

TEST_CASE("faithfulness rises by 1/|S| per flipped verdict", "[formulas][property]") {
  for (std::size_t total = 1; total <= 12; ++total) {
    for (std::size_t v = 0; v < total; ++v) {
      REQUIRE(*faithfulness_score(v + 1, total) - *faithfulness_score(v, total) ==
              Approx(1.0 / static_cast<double>(total)).margin(1e-12));
    }
  }
}

TEST_CASE("answer relevance clamps then averages", "[formulas]") {
  const std::vector<double> a{0.9, 0.8, 0.7};
  CHECK(answer_relevance_score(a) == Approx(0.8).margin(1e-12));
  const std::vector<double> b{-0.5, 0.5};
  CHECK(answer_relevance_score(b) == 0.25);
  const std::vector<double> one{1.0};
  CHECK(answer_relevance_score(one) == 1.0);
  CHECK_THROWS_AS(answer_relevance_score(std::span<const double>{}), Error);
}

TEST_CASE("context relevance ratio and cap", "[formulas]") {
  CHECK(context_relevance_score(3, 10).value == Approx(0.3).margin(1e-12));
  CHECK_FALSE(context_relevance_score(3, 10).capped);
  const auto over = context_relevance_score(5, 4);
  CHECK(over.value == 1.0);
  CHECK(over.capped);
  CHECK(context_relevance_score(0, 4).value == 0.0);
  CHECK_THROWS_AS(context_relevance_score(1, 0), Error);
}

TEST_CASE("factual correctness F1 form", "[formulas]") {
  CHECK(*factual_correctness_score(2, 1, 1) == Approx(2.0 / 3.0).margin(1e-9));
  CHECK(*factual_correctness_score(3, 0, 0) == 1.0);
  CHECK(*factual_correctness_score(0, 2, 1) == 0.0);
  CHECK(*factual_correctness_score(2, 1, 3) == Approx(0.5).margin(1e-12));
  CHECK_FALSE(factual_correctness_score(0, 0, 0));
}

TEST_CASE("factual correctness monotonicity", "[formulas][property]") {
  for (std::size_t tp = 0; tp < 8; ++tp)
    for (std::size_t fp = 0; fp < 8; ++fp)
      for (std::size_t fn = 0; fn < 8; ++fn) {
        if (tp + fp + fn == 0) continue;
        const double v = *factual_correctness_score(tp, fp, fn);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        if (fp + fn > 0) {
          REQUIRE(*factual_correctness_score(tp + 1, fp, fn) > v);
        } else {
          REQUIRE(*factual_correctness_score(tp + 1, fp, fn) == 1.0);  // already at the ceiling
        }
        if (tp > 0) {
          REQUIRE(*factual_correctness_score(tp, fp + 1, fn) < v);
          REQUIRE(*factual_correctness_score(tp, fp, fn + 1) < v);
        }
      }
}

TEST_CASE("answer correctness weighting", "[formulas]") {
  CHECK(answer_correctness_score(0.8, 0.4, {}) == Approx(0.7).margin(1e-12));
  CHECK(answer_correctness_score(0.8, 0.4, {1.0, 0.0}) == 0.8);
  CHECK(answer_correctness_score(0.8, 0.4, {0.0, 1.0}) == 0.4);
  CHECK_THROWS_AS(validate_weights({0.5, 0.4}), Error);
  CHECK_THROWS_AS(validate_weights({1.2, -0.2}), Error);
  CHECK_NOTHROW(validate_weights({0.3, 0.7}));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = u(rng), s = u(rng), w = u(rng);
    const double v = answer_correctness_score(f, s, {w, 1.0 - w});
    REQUIRE(v >= std::min(f, s) - 1e-12);
    REQUIRE(v <= std::max(f, s) + 1e-12);
  }
}
