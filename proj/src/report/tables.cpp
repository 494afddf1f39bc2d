#include "rageval/report/tables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rageval/core/dataset.hpp"
#include "rageval/error.hpp"
#include "rageval/report/run.hpp"

namespace rageval {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDash = "\xE2\x80\x94";  // em dash

// Column order of the grouped-statistics table.
constexpr MetricName kGroupedOrder[] = {MetricName::faithfulness,      MetricName::answer_relevance,
                                        MetricName::context_relevance, MetricName::answer_similarity,
                                        MetricName::answer_correctness, MetricName::factual_correctness};

std::string join_row(const std::vector<std::string>& cells, const char* sep = " | ") {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += cells[i];
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::vector<std::string> quoted;
  for (const auto& c : cells) quoted.push_back(csv_field(c));
  return join_row(quoted, ",");
}

std::string yes_no(bool b) { return b ? "Yes" : "No"; }

std::string prob_cell(const Ratio& r) {
  auto v = r.value();
  return v ? fixed2(*v) : kDash;
}

}  // namespace

std::string_view to_string(TableStyle s) {
  switch (s) {
    case TableStyle::table1: return "table1";
    case TableStyle::table2: return "table2";
    case TableStyle::table3: return "table3";
  }
  return "table1";
}

std::optional<TableStyle> parse_table_style(std::string_view s) {
  for (auto t : {TableStyle::table1, TableStyle::table2, TableStyle::table3}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string mean_sd_cell(const GroupedStats& g) {
  if (!g.mean) return kDash;
  return fixed2(*g.mean) + "(" + fixed2(g.sd.value_or(0.0)) + ")";
}

RenderedTable render_accuracy(std::span<const AccuracyTable> models) {
  std::vector<std::size_t> ks;
  for (const auto& m : models) {
    for (const auto& r : m.rows) {
      if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
    }
  }
  std::sort(ks.begin(), ks.end());

  std::ostringstream text, csv;
  text << "Retriever performance (%)\n";
  std::vector<std::string> header{"Model"};
  for (auto k : ks) header.push_back("k=" + std::to_string(k));
  text << join_row(header) << '\n';
  csv << "model,k,hits,total,accuracy\n";
  for (const auto& m : models) {
    std::vector<std::string> row{m.model};
    for (auto k : ks) {
      auto it = std::find_if(m.rows.begin(), m.rows.end(), [k](const AccuracyRow& r) { return r.k == k; });
      row.push_back(it == m.rows.end() ? kDash : fixed2(it->accuracy));
      if (it != m.rows.end()) {
        csv << csv_row({m.model, std::to_string(k), std::to_string(it->hits), std::to_string(it->total),
                        fixed2(it->accuracy)})
            << '\n';
      }
    }
    text << join_row(row) << '\n';
  }
  return {text.str(), csv.str()};
}

RenderedTable render_grouped(std::span<const GroupedStats> stats, const std::string& label) {
  std::vector<MetricName> columns;
  for (auto m : kGroupedOrder) {
    if (std::any_of(stats.begin(), stats.end(), [m](const GroupedStats& g) { return g.metric == m; })) {
      columns.push_back(m);
    }
  }
  std::ostringstream text, csv;
  text << "RAGAS metrics, mean(s.d.)\n";
  std::vector<std::string> header{"Model", "Retr. Corr."};
  for (auto m : columns) {
    if (m == MetricName::factual_correctness) header.push_back("Questions");
    header.emplace_back(short_label(m));
  }
  if (std::find(columns.begin(), columns.end(), MetricName::factual_correctness) == columns.end()) {
    header.push_back("Questions");
  }
  text << join_row(header) << '\n';
  csv << "model,retrieval_correct,metric,n,null_count,mean,sd\n";

  std::vector<std::string> footnotes;
  for (bool flag : {true, false}) {
    std::vector<std::string> row{label, yes_no(flag)};
    std::size_t questions = 0;
    std::vector<std::string> cells;
    for (auto m : columns) {
      auto it = std::find_if(stats.begin(), stats.end(),
                             [&](const GroupedStats& g) { return g.metric == m && g.retrieval_correct == flag; });
      GroupedStats g = it == stats.end() ? GroupedStats{m, flag, 0, 0, std::nullopt, std::nullopt} : *it;
      questions = std::max(questions, g.questions());
      cells.push_back(mean_sd_cell(g));
      if (!g.mean) {
        footnotes.push_back(std::string(kDash) + " " + std::string(short_label(m)) + ", Retr. Corr. " + yes_no(flag) +
                            ": no values (" + std::to_string(g.null_count) + " null of " +
                            std::to_string(g.questions()) + " questions)");
      }
      csv << csv_row({label, yes_no(flag), std::string(to_string(m)), std::to_string(g.n),
                      std::to_string(g.null_count), g.mean ? fixed2(*g.mean) : "", g.sd ? fixed2(*g.sd) : ""})
          << '\n';
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == MetricName::factual_correctness) row.push_back(std::to_string(questions));
      row.push_back(cells[i]);
    }
    if (std::find(columns.begin(), columns.end(), MetricName::factual_correctness) == columns.end()) {
      row.push_back(std::to_string(questions));
    }
    text << join_row(row) << '\n';
  }
  for (const auto& f : footnotes) text << f << '\n';
  return {text.str(), csv.str()};
}

RenderedTable render_concordance(std::span<const ConcordanceRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::precondition, "no concordance rows");
  const auto& first = rows.front().report;
  const auto& th = first.thresholds;
  const std::string l1(short_label(first.m1));
  const std::string l2(short_label(first.m2));

  std::ostringstream text, csv;
  text << "Concordance with human correctness (theta11=" << fixed2(th.high1) << ", theta12=" << fixed2(th.high2)
       << ", theta21=" << fixed2(th.low1) << ", theta22=" << fixed2(th.low2) << ")\n";
  text << join_row({"Metric", "LLM Model", l1, l2, "Joint"}) << '\n';
  csv << "condition,model,metric,value,numerator,denominator\n";

  const std::string high = "P(c given m1>" + fixed2(th.high1) + ", m2>" + fixed2(th.high2) + ")";
  const std::string low = "P(w given m1<" + fixed2(th.low1) + ", m2<" + fixed2(th.low2) + ")";
  std::vector<std::string> footnotes;
  auto emit = [&](const std::string& condition, const std::string& label, const Ratio& a, const Ratio& b,
                  const Ratio& joint) {
    text << join_row({condition, label, prob_cell(a), prob_cell(b), prob_cell(joint)}) << '\n';
    const std::pair<std::string, const Ratio*> cells[] = {{l1, &a}, {l2, &b}, {"Joint", &joint}};
    for (const auto& [name, r] : cells) {
      auto v = r->value();
      csv << csv_row({condition, label, name, v ? fixed2(*v) : "", std::to_string(r->numerator),
                      std::to_string(r->denominator)})
          << '\n';
      if (!v) footnotes.push_back(std::string(kDash) + " " + label + ", " + name + ": no samples meet the condition");
    }
  };
  for (const auto& row : rows) {
    const auto& r = row.report;
    emit(high, row.label, r.correct_given_m1_high, r.correct_given_m2_high, r.correct_given_joint_high);
  }
  for (const auto& row : rows) {
    const auto& r = row.report;
    emit(low, row.label, r.wrong_given_m1_low, r.wrong_given_m2_low, r.wrong_given_joint_low);
  }
  for (const auto& row : rows) {
    const auto& r = row.report;
    text << row.label << ": " << r.eligible << " samples counted, " << r.excluded_null << " excluded (null score), "
         << r.excluded_unlabeled << " unlabelled\n";
  }
  for (const auto& f : footnotes) text << f << '\n';
  return {text.str(), csv.str()};
}

namespace {

std::string run_label(const fs::path& dir) {
  if (!fs::exists(dir / run_files::manifest)) return "run";
  const Json m = load_manifest(dir);
  const Json& c = m.at("config");
  std::string label = c.value("label", std::string());
  return label.empty() ? c.value("chat_model", std::string("run")) : label;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::io_error, p.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception&) {
    throw Error(ErrorCode::malformed_record, p.string());
  }
}

std::vector<AccuracyTable> read_accuracy(const fs::path& p) {
  Json doc = read_json(p);
  if (!doc.is_array()) doc = Json::array({doc});
  std::vector<AccuracyTable> out;
  for (const auto& m : doc) {
    AccuracyTable t;
    t.model = m.at("model").get<std::string>();
    for (const auto& r : m.at("rows")) {
      t.rows.push_back({r.at("k").get<std::size_t>(), r.at("hits").get<std::size_t>(),
                        r.at("total").get<std::size_t>(), r.at("accuracy").get<double>()});
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

RenderedTable render_tables(const fs::path& dir, TableStyle style, bool force) {
  const std::string name(to_string(style));
  auto missing = [&](const std::string& what) { return Error(ErrorCode::missing_inputs, name + ": " + what); };

  RenderedTable table;
  switch (style) {
    case TableStyle::table1: {
      if (!fs::exists(dir / kAccuracyFile)) throw missing((dir / kAccuracyFile).string());
      table = render_accuracy(read_accuracy(dir / kAccuracyFile));
      break;
    }
    case TableStyle::table2: {
      for (const char* f : {run_files::scores, run_files::dataset}) {
        if (!fs::exists(dir / f)) throw missing((dir / f).string());
      }
      const auto samples = load_dataset(dir / run_files::dataset);
      for (const auto& s : samples) {
        if (!s.retrieval_correct) throw missing("sample " + s.id + " has no retrieval_correct");
      }
      const auto results = load_scores(dir / run_files::scores);
      table = render_grouped(group_stats(results, samples), run_label(dir));
      break;
    }
    case TableStyle::table3: {
      const fs::path saved = dir / run_files::analysis / kConcordanceFile;
      ConcordanceRow row{run_label(dir), {}};
      if (fs::exists(saved)) {
        row.report = report_from_json(read_json(saved).at("report"));
      } else {
        for (const char* f : {run_files::scores, run_files::dataset}) {
          if (!fs::exists(dir / f)) throw missing((dir / f).string());
        }
        const auto samples = load_dataset(dir / run_files::dataset);
        ScoreTable scores;
        for (const auto& r : load_scores(dir / run_files::scores)) scores[r.metric][r.sample_id] = r.value;
        for (auto m : {MetricName::factual_correctness, MetricName::faithfulness}) {
          if (!scores.count(m)) throw missing(std::string(to_string(m)) + " scores");
        }
        Thresholds th;
        if (fs::exists(dir / run_files::manifest)) {
          const Json t = load_manifest(dir).at("config").value("thresholds", Json::object());
          const double hi = t.value("high", 0.7), lo = t.value("low", 0.3);
          th = {hi, hi, lo, lo};
        }
        row.report = concordance(samples, scores, MetricName::factual_correctness, MetricName::faithfulness, th);
      }
      table = render_concordance(std::span<const ConcordanceRow>(&row, 1));
      break;
    }
  }

  const fs::path out_dir = dir / run_files::tables;
  const fs::path txt = out_dir / (name + ".txt");
  const fs::path csv = out_dir / (name + ".csv");
  if (!force && (fs::exists(txt) || fs::exists(csv))) throw Error(ErrorCode::output_exists, txt.string());
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream t(txt, std::ios::trunc), c(csv, std::ios::trunc);
  if (!t || !c) throw Error(ErrorCode::unwritable_output, out_dir.string());
  t << table.text;
  c << table.csv;
  return table;
}

}  // namespace rageval
