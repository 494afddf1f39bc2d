#include "rageval/analysis/concordance.hpp"

#include <cmath>

#include "rageval/error.hpp"

namespace rageval {

std::optional<double> Ratio::value() const {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

namespace {

std::optional<double> lookup(const ScoreTable& scores, MetricName m, const std::string& id) {
  auto mt = scores.find(m);
  if (mt == scores.end()) return std::nullopt;
  auto it = mt->second.find(id);
  if (it == mt->second.end()) return std::nullopt;
  return it->second;
}

void tally(Ratio& r, bool condition, bool outcome) {
  if (!condition) return;
  ++r.denominator;
  if (outcome) ++r.numerator;
}

Json ratio_json(const Ratio& r) {
  auto v = r.value();
  return Json{{"value", v ? Json(*v) : Json(nullptr)}, {"numerator", r.numerator}, {"denominator", r.denominator}};
}

}  // namespace

ConcordanceReport concordance(std::span<const EvalSample> samples, const ScoreTable& scores, MetricName m1,
                              MetricName m2, const Thresholds& th) {
  ConcordanceReport rep;
  rep.m1 = m1;
  rep.m2 = m2;
  rep.thresholds = th;
  bool any_label = false;
  for (const auto& s : samples) {
    if (!s.human_correct) {
      ++rep.excluded_unlabeled;
      continue;
    }
    any_label = true;
    auto v1 = lookup(scores, m1, s.id);
    auto v2 = lookup(scores, m2, s.id);
    if (!v1 || !v2) {
      ++rep.excluded_null;
      continue;
    }
    ++rep.eligible;
    const bool correct = *s.human_correct;
    ++(correct ? rep.correct : rep.wrong);

    const bool h1 = *v1 > th.high1;
    const bool h2 = *v2 > th.high2;
    const bool l1 = *v1 < th.low1;
    const bool l2 = *v2 < th.low2;
    tally(rep.correct_given_joint_high, h1 && h2, correct);
    tally(rep.wrong_given_joint_low, l1 && l2, !correct);
    tally(rep.correct_given_m1_high, h1, correct);
    tally(rep.correct_given_m2_high, h2, correct);
    tally(rep.wrong_given_m1_low, l1, !correct);
    tally(rep.wrong_given_m2_low, l2, !correct);

    rep.m1_at_high += *v1 == th.high1;
    rep.m1_at_low += *v1 == th.low1;
    rep.m2_at_high += *v2 == th.high2;
    rep.m2_at_low += *v2 == th.low2;
  }
  if (!any_label) throw Error(ErrorCode::no_labels, "no sample has human_correct");
  return rep;
}

std::vector<ConcordanceReport> threshold_sweep(std::span<const EvalSample> samples, const ScoreTable& scores,
                                               MetricName m1, MetricName m2, std::span<const Thresholds> grid) {
  std::vector<ConcordanceReport> out;
  out.reserve(grid.size());
  for (const auto& th : grid) out.push_back(concordance(samples, scores, m1, m2, th));
  return out;
}

std::vector<Thresholds> uniform_grid(double start, double end, double step) {
  if (!(step > 0.0) || end < start) throw Error(ErrorCode::precondition, "grid needs step > 0 and end >= start");
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<Thresholds> grid;
  for (std::size_t i = 0; i < count; ++i) {
    double v = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
    grid.push_back({v, v, v, v});
  }
  return grid;
}

Json report_to_json(const ConcordanceReport& r) {
  Json j = Json::object();
  j["m1"] = to_string(r.m1);
  j["m2"] = to_string(r.m2);
  j["thresholds"] = {{"high1", r.thresholds.high1},
                     {"high2", r.thresholds.high2},
                     {"low1", r.thresholds.low1},
                     {"low2", r.thresholds.low2}};
  j["p_correct_given_high"] = ratio_json(r.correct_given_joint_high);
  j["p_wrong_given_low"] = ratio_json(r.wrong_given_joint_low);
  j["p_correct_given_m1_high"] = ratio_json(r.correct_given_m1_high);
  j["p_correct_given_m2_high"] = ratio_json(r.correct_given_m2_high);
  j["p_wrong_given_m1_low"] = ratio_json(r.wrong_given_m1_low);
  j["p_wrong_given_m2_low"] = ratio_json(r.wrong_given_m2_low);
  j["counts"] = {{"eligible", r.eligible},
                 {"correct", r.correct},
                 {"wrong", r.wrong},
                 {"excluded_unlabeled", r.excluded_unlabeled},
                 {"excluded_null", r.excluded_null},
                 {"m1_at_high", r.m1_at_high},
                 {"m1_at_low", r.m1_at_low},
                 {"m2_at_high", r.m2_at_high},
                 {"m2_at_low", r.m2_at_low}};
  return j;
}

ConcordanceReport report_from_json(const Json& j) {
  try {
    ConcordanceReport r;
    auto m1 = parse_metric_name(j.at("m1").get<std::string>());
    auto m2 = parse_metric_name(j.at("m2").get<std::string>());
    if (!m1 || !m2) throw Error(ErrorCode::malformed_record, "concordance report: unknown metric");
    r.m1 = *m1;
    r.m2 = *m2;
    const Json& t = j.at("thresholds");
    r.thresholds = {t.at("high1").get<double>(), t.at("high2").get<double>(), t.at("low1").get<double>(),
                    t.at("low2").get<double>()};
    auto ratio = [&](const char* key) {
      const Json& x = j.at(key);
      return Ratio{x.at("numerator").get<std::size_t>(), x.at("denominator").get<std::size_t>()};
    };
    r.correct_given_joint_high = ratio("p_correct_given_high");
    r.wrong_given_joint_low = ratio("p_wrong_given_low");
    r.correct_given_m1_high = ratio("p_correct_given_m1_high");
    r.correct_given_m2_high = ratio("p_correct_given_m2_high");
    r.wrong_given_m1_low = ratio("p_wrong_given_m1_low");
    r.wrong_given_m2_low = ratio("p_wrong_given_m2_low");
    const Json& c = j.at("counts");
    r.eligible = c.at("eligible").get<std::size_t>();
    r.correct = c.at("correct").get<std::size_t>();
    r.wrong = c.at("wrong").get<std::size_t>();
    r.excluded_unlabeled = c.at("excluded_unlabeled").get<std::size_t>();
    r.excluded_null = c.at("excluded_null").get<std::size_t>();
    r.m1_at_high = c.at("m1_at_high").get<std::size_t>();
    r.m1_at_low = c.at("m1_at_low").get<std::size_t>();
    r.m2_at_high = c.at("m2_at_high").get<std::size_t>();
    r.m2_at_low = c.at("m2_at_low").get<std::size_t>();
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::malformed_record, std::string("concordance report: ") + e.what());
  }
}

}  // namespace rageval
