#include "rageval/analysis/stats.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "rageval/error.hpp"

namespace rageval {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::insufficient_data, "mean of no values");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<GroupedStats> group_stats(std::span<const MetricResult> results, std::span<const EvalSample> samples) {
  std::map<std::string, const EvalSample*> by_id;
  for (const auto& s : samples) by_id[s.id] = &s;

  // metric -> (retrieval_correct -> values, nulls)
  struct Bucket {
    std::vector<double> values;
    std::size_t nulls = 0;
  };
  std::map<MetricName, std::map<bool, Bucket>> buckets;
  for (const auto& r : results) {
    auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) throw Error(ErrorCode::unresolved_sample_id, r.sample_id);
    if (!it->second->retrieval_correct) throw Error(ErrorCode::missing_field, "retrieval_correct");
    auto& metric_buckets = buckets[r.metric];
    metric_buckets[true];
    metric_buckets[false];
    auto& b = metric_buckets[*it->second->retrieval_correct];
    if (r.value) {
      b.values.push_back(*r.value);
    } else {
      ++b.nulls;
    }
  }

  std::vector<GroupedStats> rows;
  for (MetricName m : kAllMetrics) {
    auto it = buckets.find(m);
    if (it == buckets.end()) continue;
    for (bool flag : {true, false}) {
      const auto& b = it->second[flag];
      GroupedStats row{m, flag, b.values.size(), b.nulls, std::nullopt, std::nullopt};
      if (!b.values.empty()) {
        row.mean = mean(b.values);
        row.sd = sample_sd(b.values);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, Sidedness sidedness) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::insufficient_data, "each group needs >= 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_sd(a) * sample_sd(a) / na;
  const double vb = sample_sd(b) * sample_sd(b) / nb;
  const double diff = mean(a) - mean(b);
  const double se2 = va + vb;

  TTestResult r;
  if (se2 == 0.0) {
    // Both groups constant: the statistic degenerates.
    r.df = na + nb - 2.0;
    r.t = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    r.t = diff / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  }

  if (std::isinf(r.t)) {
    const bool positive = r.t > 0;
    r.p = sidedness == Sidedness::two_sided ? 0.0 : (positive ? 0.0 : 1.0);
    return r;
  }
  boost::math::students_t dist(r.df);
  if (sidedness == Sidedness::two_sided) {
    r.p = r.t == 0.0 ? 1.0 : 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  } else {
    r.p = boost::math::cdf(boost::math::complement(dist, r.t));
  }
  return r;
}

}  // namespace rageval
