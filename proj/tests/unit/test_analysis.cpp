#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "rageval/analysis/concordance.hpp"
#include "rageval/analysis/stats.hpp"
#include "rageval/error.hpp"
#include "synthetic.hpp"
#include "welch_fixtures.hpp"

using namespace rageval;
using Catch::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::io_error;
}

struct Built {
  std::vector<EvalSample> samples;
  ScoreTable scores;
};

Built build(const std::vector<testing::Triple>& triples) {
  Built b;
  for (const auto& t : triples) {
    EvalSample s;
    s.id = t.id;
    s.human_correct = t.correct;
    b.samples.push_back(s);
    b.scores[MetricName::factual_correctness][t.id] = t.m1;
    b.scores[MetricName::faithfulness][t.id] = t.m2;
  }
  return b;
}

ConcordanceReport cc(const Built& b, const Thresholds& th = {}) {
  return concordance(b.samples, b.scores, MetricName::factual_correctness, MetricName::faithfulness, th);
}

MetricResult result(std::string id, MetricName m, std::optional<double> v) {
  MetricResult r;
  r.sample_id = std::move(id);
  r.metric = m;
  r.value = v;
  if (!v) r.null_reason = NullReason::backend_error;
  return r;
}

}  // namespace

TEST_CASE("six-sample concordance", "[analysis]") {
  const std::vector<testing::Triple> t{{"1", true, .9, .9},  {"2", true, .8, .9},  {"3", true, .9, .8},
                                       {"4", false, .2, .2}, {"5", false, .1, .9}, {"6", false, .8, .2}};
  const auto b = build(t);
  const auto r = cc(b);
  CHECK(r.correct_given_joint_high.denominator == 3);
  CHECK(r.correct_given_joint_high.numerator == 3);
  CHECK(*r.correct_given_joint_high.value() == 1.0);
  CHECK(r.wrong_given_joint_low.denominator == 1);
  CHECK(r.correct_given_m1_high.denominator == 4);
  CHECK(r == testing::brute_force_concordance(t, {}));
}

TEST_CASE("strict thresholds", "[analysis]") {
  const std::vector<testing::Triple> t{{"1", true, 1.0, 1.0}, {"2", false, 0.7, 0.3}};
  const auto b = build(t);
  const auto top = cc(b, {1.0, 1.0, 0.0, 0.0});
  CHECK(top.correct_given_joint_high.denominator == 0);
  CHECK_FALSE(top.correct_given_joint_high.value());
  const auto mid = cc(b);
  CHECK(mid.m1_at_high == 1);
  CHECK(mid.m2_at_low == 1);
  CHECK(mid.correct_given_joint_high.denominator == 1);
  CHECK(mid.wrong_given_joint_low.denominator == 0);
}

TEST_CASE("nulls and unlabeled samples are excluded", "[analysis]") {
  const std::vector<testing::Triple> t{
      {"1", true, .9, .9}, {"2", std::nullopt, .9, .9}, {"3", false, std::nullopt, .1}, {"4", false, .1, .1}};
  const auto b = build(t);
  const auto r = cc(b);
  CHECK(r.eligible == 2);
  CHECK(r.excluded_unlabeled == 1);
  CHECK(r.excluded_null == 1);
  CHECK(r == testing::brute_force_concordance(t, {}));

  const std::vector<testing::Triple> none{{"1", std::nullopt, .9, .9}};
  const auto nb = build(none);
  CHECK(code_of([&] { cc(nb); }) == ErrorCode::no_labels);
}

TEST_CASE("concordance properties", "[analysis][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<testing::Triple> t;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      auto coarse = [&] { return std::round(u(rng) * 10) / 10; };  // lands on thresholds often
      t.push_back({"s" + std::to_string(i), rng() % 9 ? std::optional<bool>(rng() % 2) : std::nullopt,
                   rng() % 9 ? std::optional<double>(coarse()) : std::nullopt,
                   rng() % 9 ? std::optional<double>(coarse()) : std::nullopt});
    }
    if (std::none_of(t.begin(), t.end(), [](const auto& x) { return x.correct.has_value(); })) continue;
    const Thresholds th{std::round(u(rng) * 10) / 10, std::round(u(rng) * 10) / 10, std::round(u(rng) * 10) / 10,
                        std::round(u(rng) * 10) / 10};
    const auto b = build(t);
    const auto r = cc(b, th);
    REQUIRE(r == testing::brute_force_concordance(t, th));
    REQUIRE(r.correct_given_joint_high.denominator <= r.correct_given_m1_high.denominator);
    REQUIRE(r.correct_given_joint_high.denominator <= r.correct_given_m2_high.denominator);
    REQUIRE(r.wrong_given_joint_low.denominator <= r.wrong_given_m1_low.denominator);
    REQUIRE(r.wrong_given_joint_low.denominator <= r.wrong_given_m2_low.denominator);
    if (auto v = r.correct_given_joint_high.value()) {
      REQUIRE(*v == static_cast<double>(r.correct_given_joint_high.numerator) /
                        static_cast<double>(r.correct_given_joint_high.denominator));
    }

    auto shuffled = t;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto sb = build(shuffled);
    REQUIRE(cc(sb, th) == r);
  }
}

TEST_CASE("perfectly separating metrics", "[analysis]") {
  std::vector<testing::Triple> t;
  for (int i = 0; i < 10; ++i) t.push_back({"s" + std::to_string(i), i % 2 == 0, i % 2 ? 0.0 : 1.0, i % 2 ? 0.0 : 1.0});
  const auto b = build(t);
  const auto r = cc(b);
  CHECK(*r.correct_given_joint_high.value() == 1.0);
  CHECK(*r.wrong_given_joint_low.value() == 1.0);
}

TEST_CASE("threshold sweep", "[analysis]") {
  std::vector<testing::Triple> t;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) t.push_back({"s" + std::to_string(i), rng() % 2 == 0, u(rng), u(rng)});
  const auto b = build(t);
  const std::vector<Thresholds> grid{{0.5, 0.5, 0.2, 0.2}, {}};
  const auto reports = threshold_sweep(b.samples, b.scores, MetricName::factual_correctness, MetricName::faithfulness, grid);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].thresholds == grid[0]);
  CHECK(reports[1] == cc(b));

  CHECK(uniform_grid(0.1, 0.9, 0.1).size() == 9);
  CHECK(uniform_grid(0.0, 1.0, 0.05).size() == 21);
  CHECK(uniform_grid(0.1, 0.9, 0.1)[2].high1 == 0.3);
  CHECK_THROWS_AS(uniform_grid(0.1, 0.9, 0.0), Error);
}

TEST_CASE("sweep is monotone on a separable dataset", "[analysis]") {
  std::vector<testing::Triple> t;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Correct samples score 1, wrong samples score 0; the mid-range samples are
  // correct exactly when their score exceeds 0.5, which forces monotonicity.
  for (int i = 0; i < 40; ++i) {
    const bool c = i % 2 == 0;
    t.push_back({"s" + std::to_string(i), c, c ? 1.0 : 0.0, c ? 1.0 : 0.0});
  }
  for (int i = 0; i < 40; ++i) {
    const double v = u(rng);
    t.push_back({"n" + std::to_string(i), v > 0.5, v, v});
  }
  const auto b = build(t);
  const auto reports = threshold_sweep(b.samples, b.scores, MetricName::factual_correctness, MetricName::faithfulness, uniform_grid(0.0, 0.95, 0.05));
  double last = 0.0;
  for (const auto& r : reports) {
    const auto v = r.correct_given_joint_high.value();
    REQUIRE(v);
    INFO("theta " << r.thresholds.high1);
    CHECK(*v >= last - 1e-12);
    last = *v;
  }
}

TEST_CASE("report json round-trip", "[analysis]") {
  const std::vector<testing::Triple> t{{"1", true, .9, .9}, {"2", false, .1, .2}};
  const auto b = build(t);
  const auto r = cc(b);
  CHECK(report_from_json(report_to_json(r)) == r);
  CHECK(report_to_json(r)["p_correct_given_high"]["denominator"] == 1);
  CHECK_THROWS_AS(report_from_json(Json::object()), Error);
}

TEST_CASE("descriptive statistics", "[analysis]") {
  const std::vector<double> one{0.5};
  CHECK(mean(one) == 0.5);
  CHECK(sample_sd(one) == 0.0);
  const std::vector<double> three{0.2, 0.4, 0.6};
  CHECK(mean(three) == Approx(0.4).margin(1e-12));
  CHECK(sample_sd(three) == Approx(0.2).margin(1e-12));
}

TEST_CASE("grouped statistics", "[analysis]") {
  std::vector<EvalSample> samples;
  for (int i = 0; i < 4; ++i) {
    EvalSample s;
    s.id = "s" + std::to_string(i);
    s.retrieval_correct = i < 2;
    samples.push_back(s);
  }
  const std::vector<MetricResult> results{
      result("s0", MetricName::faithfulness, 1.0), result("s1", MetricName::faithfulness, 0.5),
      result("s2", MetricName::faithfulness, 0.25), result("s3", MetricName::faithfulness, std::nullopt)};
  const auto g = group_stats(results, samples);
  REQUIRE(g.size() == 2);
  CHECK(g[0].retrieval_correct);
  CHECK(g[0].n == 2);
  CHECK(*g[0].mean == 0.75);
  CHECK(*g[0].sd == Approx(std::sqrt(0.125)).margin(1e-12));
  CHECK_FALSE(g[1].retrieval_correct);
  CHECK(g[1].n == 1);
  CHECK(g[1].null_count == 1);
  CHECK(*g[1].sd == 0.0);
  CHECK(g[1].questions() == 2);

  auto bad = results;
  bad.push_back(result("nope", MetricName::faithfulness, 0.1));
  CHECK(code_of([&] { group_stats(bad, samples); }) == ErrorCode::unresolved_sample_id);
  samples[0].retrieval_correct.reset();
  CHECK(code_of([&] { group_stats(results, samples); }) == ErrorCode::missing_field);
}

TEST_CASE("Welch test against reference values", "[analysis][welch]") {
  for (const auto& f : testing::welch_fixtures()) {
    const auto two = welch_t_test(f.a, f.b, Sidedness::two_sided);
    const auto one = welch_t_test(f.a, f.b, Sidedness::one_sided_greater);
    CHECK(two.t == Approx(f.t).epsilon(1e-6));
    CHECK(two.df == Approx(f.df).epsilon(1e-6));
    CHECK(two.p == Approx(f.p_two_sided).epsilon(1e-6));
    CHECK(one.p == Approx(f.p_greater).epsilon(1e-6));
  }
  const auto& first = testing::welch_fixtures().front();
  CHECK(welch_t_test(first.a, first.b, Sidedness::two_sided).p < 0.01);
}

TEST_CASE("Welch test properties", "[analysis][welch]") {
  const std::vector<double> a{0.3, 0.5, 0.9, 0.4};
  const auto same = welch_t_test(a, a, Sidedness::two_sided);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + rng() % 20), y(2 + rng() % 20);
    for (auto& v : x) v = n(rng) + 0.5;
    for (auto& v : y) v = n(rng);
    const auto two = welch_t_test(x, y, Sidedness::two_sided);
    const auto g = welch_t_test(x, y, Sidedness::one_sided_greater);
    const auto flipped = welch_t_test(y, x, Sidedness::one_sided_greater);
    REQUIRE(flipped.t == Approx(-g.t).margin(1e-12));
    if (g.t > 0) REQUIRE(g.p == Approx(two.p / 2).epsilon(1e-12));
    REQUIRE(g.p + flipped.p == Approx(1.0).margin(1e-12));
  }

  const std::vector<double> one{1.0};
  CHECK(code_of([&] { welch_t_test(one, a, Sidedness::two_sided); }) == ErrorCode::insufficient_data);
}
