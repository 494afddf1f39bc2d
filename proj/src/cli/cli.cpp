#include "rageval/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rageval/analysis/concordance.hpp"
#include "rageval/analysis/stats.hpp"
#include "rageval/core/dataset.hpp"
#include "rageval/report/config.hpp"
#include "rageval/report/run.hpp"
#include "rageval/report/tables.hpp"
#include "rageval/retriever/retriever.hpp"

namespace rageval {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::network_error:
    case ErrorCode::http_error:
    case ErrorCode::rate_limited:
    case ErrorCode::empty_completion:
    case ErrorCode::dim_mismatch:
    case ErrorCode::zero_vector:
    case ErrorCode::unmatched_request:
    case ErrorCode::parse_failure:
    case ErrorCode::verdict_count_mismatch:
    case ErrorCode::short_output:
    case ErrorCode::replay_divergence:
      return 2;
    default:
      return 1;
  }
}

namespace {

// Flags shared by commands that construct backends.
struct BackendFlags {
  std::string config;
  std::string backend;
  std::string mock_script;
  std::string base_url;
  std::string chat_model;
  std::string embedding_model;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file (flags override its values)");
  cmd->add_option("--backend", f.backend, "Backend: mock or openai");
  cmd->add_option("--mock-script", f.mock_script, "Scripted mock responses (JSON)");
  cmd->add_option("--base-url", f.base_url, "OpenAI-compatible base URL");
  cmd->add_option("--chat-model", f.chat_model, "Judge chat model name");
  cmd->add_option("--embedding-model", f.embedding_model, "Embedding model name");
}

// Layers defaults < config file < environment < flags.
RunConfig resolve_config(const BackendFlags& f, Provenance& prov) {
  RunConfig c;
  prov = default_provenance();
  if (!f.config.empty()) apply_config_file(c, f.config, &prov);
  if (const char* url = std::getenv("RAGEVAL_BASE_URL"); url && *url) {
    c.base_url = url;
    prov["base_url"] = "env";
  }
  Json flags = Json::object();
  if (!f.backend.empty()) flags["backend"] = f.backend;
  if (!f.mock_script.empty()) flags["mock_script"] = fs::absolute(f.mock_script).string();
  if (!f.base_url.empty()) flags["base_url"] = f.base_url;
  if (!f.chat_model.empty()) flags["chat_model"] = f.chat_model;
  if (!f.embedding_model.empty()) flags["embedding_model"] = f.embedding_model;
  apply_config_json(c, flags, {}, &prov, "flag");
  return c;
}

void print_precedence(std::ostream& out, const RunConfig& c, const Provenance& prov) {
  out << "config precedence: flags > environment > config file > defaults\n";
  const Json j = config_to_json(c);
  for (const auto& [key, value] : j.items()) {
    auto it = prov.find(key);
    out << "  " << key << " = " << value.dump() << " [" << (it == prov.end() ? "default" : it->second) << "]\n";
  }
}

std::vector<std::size_t> parse_ks(const std::string& csv) {
  std::vector<std::size_t> ks;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(item, &pos);
      if (pos != item.size() || v < 1) throw std::invalid_argument(item);
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::config_error, "--k: expected positive integers, got '" + item + "'");
    }
  }
  if (ks.empty()) throw Error(ErrorCode::config_error, "--k: no values");
  return ks;
}

std::vector<Thresholds> parse_sweep(const std::string& spec) {
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw Error(ErrorCode::config_error, "--sweep: expected start:end:step, got '" + spec + "'");
  }
  if (a < 0 || b > 1) throw Error(ErrorCode::config_error, "--sweep: thresholds must lie in [0, 1]");
  try {
    return uniform_grid(a, b, step);
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, "--sweep: " + e.detail());
  }
}

void ensure_fresh(const std::vector<fs::path>& outputs, bool force) {
  if (force) return;
  for (const auto& p : outputs) {
    if (fs::exists(p)) throw Error(ErrorCode::output_exists, p.string() + " exists (use --force)");
  }
}

void write_json(const fs::path& p, const Json& j) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error(ErrorCode::unwritable_output, p.string());
  out << j.dump(2) << '\n';
}

// ---- evaluate ----

struct EvaluateArgs {
  BackendFlags backend;
  std::string dataset;
  std::string out;
  std::string metrics;
  std::string question_mode;
  std::string cache;
  std::string prompts_dir;
  std::string label;
  std::string weights;
  int concurrency = 0;
  int n = 0;
  int parse_retries = -1;
  bool force = false;
  bool verbose = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  Provenance prov;
  RunConfig c = resolve_config(a.backend, prov);
  Json flags = Json::object();
  if (!a.metrics.empty()) flags["metrics"] = a.metrics;
  if (!a.question_mode.empty()) flags["question_mode"] = a.question_mode;
  if (!a.cache.empty()) flags["cache"] = fs::absolute(a.cache).string();
  if (!a.prompts_dir.empty()) flags["prompts_dir"] = fs::absolute(a.prompts_dir).string();
  if (!a.label.empty()) flags["label"] = a.label;
  if (a.concurrency > 0) flags["concurrency"] = a.concurrency;
  if (a.n > 0) flags["answer_relevance_n"] = a.n;
  if (a.parse_retries >= 0) flags["parse_retries"] = a.parse_retries;
  if (!a.weights.empty()) {
    std::vector<double> w;
    std::stringstream ss(a.weights);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        w.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error(ErrorCode::config_error, "--weights: expected two numbers");
      }
    }
    flags["weights"] = w;
  }
  apply_config_json(c, flags, {}, &prov, "flag");
  validate_config(c);
  if (a.verbose) print_precedence(out, c, prov);

  const auto dataset = load_dataset(a.dataset);
  Backends backends = make_backends(c);
  RunOptions opts{a.force, fs::absolute(a.dataset).string()};
  const RunSummary s = run_evaluation(dataset, c, backends.chat(), *backends.embedder, a.out, opts);

  out << "run " << s.run_id << ": " << s.records << " records over " << s.samples << " samples, " << s.nulls
      << " null (" << s.backend_errors << " backend_error)\n";
  for (auto m : c.metrics) {
    auto it = s.nulls_by_metric.find(m);
    out << "  " << to_string(m) << ": " << (it == s.nulls_by_metric.end() ? 0 : it->second) << " null\n";
  }
  out << "wrote " << fs::path(a.out).string() << "\n";
  if (s.records > 0 && s.backend_errors == s.records) {
    throw Error(ErrorCode::network_error, "every request failed at the backend");
  }
  return 0;
}

// ---- retrieve ----

struct RetrieveArgs {
  BackendFlags backend;
  std::string corpus;
  std::string questions;
  std::string gold;
  std::string ks = "1,3,5";
  std::string out;
  std::string index;
  int stamp_k = 1;
  bool force = false;
};

int cmd_retrieve(const RetrieveArgs& a, std::ostream& out) {
  Provenance prov;
  RunConfig c = resolve_config(a.backend, prov);
  const auto ks = parse_ks(a.ks);
  if (a.stamp_k < 1) throw Error(ErrorCode::config_error, "--stamp-k must be >= 1");
  const fs::path dir(a.out);
  const fs::path index_path = a.index.empty() ? dir / "index.bin" : fs::path(a.index);
  ensure_fresh({dir / "runs.jsonl", dir / kAccuracyFile, dir / "samples.jsonl"}, a.force);

  const auto chunks = load_corpus(a.corpus);
  const auto gold = load_gold(a.gold);
  const auto questions = load_dataset(a.questions, LoadOptions{false});
  auto embedder = make_embedder(c);

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::unwritable_output, dir.string());

  const bool reuse = !a.index.empty() && fs::exists(index_path);
  VectorIndex index = reuse ? VectorIndex::load(index_path) : index_corpus(chunks, *embedder);
  if (!reuse) index.save(index_path);

  std::map<std::string, std::string> texts;
  for (const auto& ch : chunks) texts[ch.chunk_id] = ch.text;
  std::size_t depth = static_cast<std::size_t>(a.stamp_k);
  for (auto k : ks) depth = std::max(depth, k);

  std::vector<RetrievalRun> runs;
  std::vector<EvalSample> stamped;
  std::size_t without_gold = 0;
  std::ofstream runs_out(dir / "runs.jsonl", std::ios::trunc);
  if (!runs_out) throw Error(ErrorCode::unwritable_output, (dir / "runs.jsonl").string());
  for (const auto& q : questions) {
    RetrievalRun run = retrieve_top_k(q.id, q.question, index, *embedder, depth);
    auto g = gold.find(q.id);
    if (g != gold.end()) {
      mark_gold(run, g->second);
      stamped.push_back(stamp_retrieval_correct(q, run, static_cast<std::size_t>(a.stamp_k), texts));
      runs.push_back(run);
    } else {
      ++without_gold;
    }
    runs_out << run_to_json(run).dump() << '\n';
  }
  const auto rows = retrieval_accuracy(runs, ks);
  Json acc = Json::object();
  acc["model"] = index.model_id();
  Json jrows = Json::array();
  for (const auto& r : rows) jrows.push_back({{"k", r.k}, {"hits", r.hits}, {"total", r.total}, {"accuracy", r.accuracy}});
  acc["rows"] = jrows;
  write_json(dir / kAccuracyFile, acc);
  write_dataset(dir / "samples.jsonl", stamped);

  AccuracyTable table{index.model_id(), rows};
  out << render_accuracy(std::span<const AccuracyTable>(&table, 1)).text;
  if (without_gold) out << without_gold << " questions without a gold chunk were not scored\n";
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string run;
  std::string labels;
  std::string sweep;
  std::string m1 = "factual_correctness";
  std::string m2 = "faithfulness";
  double theta_high = -1;
  double theta_low = -1;
  bool force = false;
};

void apply_labels(std::vector<EvalSample>& samples, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read labels " + path.string());
  std::map<std::string, EvalSample*> by_id;
  for (auto& s : samples) by_id[s.id] = &s;
  long line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      const auto id = j.at("id").get<std::string>();
      auto it = by_id.find(id);
      if (it == by_id.end()) throw Error(ErrorCode::unresolved_sample_id, id);
      if (j.contains("human_correct") && !j["human_correct"].is_null()) {
        it->second->human_correct = j["human_correct"].get<bool>();
      }
      if (j.contains("retrieval_correct") && !j["retrieval_correct"].is_null()) {
        it->second->retrieval_correct = j["retrieval_correct"].get<bool>();
      }
    } catch (const Json::exception&) {
      throw Error(ErrorCode::malformed_record, path.string(), line_no);
    }
  }
}

MetricName metric_flag(const std::string& name, const char* flag) {
  auto m = parse_metric_name(name);
  if (!m) throw Error(ErrorCode::config_error, std::string(flag) + ": unknown metric '" + name + "'");
  return *m;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const fs::path run(a.run);
  for (const char* f : {run_files::scores, run_files::dataset}) {
    if (!fs::exists(run / f)) throw Error(ErrorCode::missing_inputs, (run / f).string());
  }
  const fs::path adir = run / run_files::analysis;
  ensure_fresh({adir / kConcordanceFile, adir / "sweep.json", adir / "stats.json"}, a.force);

  const MetricName m1 = metric_flag(a.m1, "--m1");
  const MetricName m2 = metric_flag(a.m2, "--m2");
  auto samples = load_dataset(run / run_files::dataset);
  if (!a.labels.empty()) apply_labels(samples, a.labels);
  const auto results = load_scores(run / run_files::scores);

  double hi = 0.7, lo = 0.3;
  std::string label = "run";
  if (fs::exists(run / run_files::manifest)) {
    const Json cfg = load_manifest(run).at("config");
    const Json t = cfg.value("thresholds", Json::object());
    hi = t.value("high", hi);
    lo = t.value("low", lo);
    label = cfg.value("label", std::string());
    if (label.empty()) label = cfg.value("chat_model", std::string("run"));
  }
  if (a.theta_high >= 0) hi = a.theta_high;
  if (a.theta_low >= 0) lo = a.theta_low;
  if (hi > 1 || lo > 1) throw Error(ErrorCode::config_error, "thresholds must lie in [0, 1]");

  ScoreTable scores;
  for (const auto& r : results) scores[r.metric][r.sample_id] = r.value;
  const Thresholds th{hi, hi, lo, lo};
  ConcordanceRow row{label, concordance(samples, scores, m1, m2, th)};

  std::error_code ec;
  fs::create_directories(adir, ec);
  if (ec) throw Error(ErrorCode::unwritable_output, adir.string());
  write_json(adir / kConcordanceFile, {{"label", label}, {"report", report_to_json(row.report)}});
  out << render_concordance(std::span<const ConcordanceRow>(&row, 1)).text;

  if (!a.sweep.empty()) {
    const auto grid = parse_sweep(a.sweep);
    const auto reports = threshold_sweep(samples, scores, m1, m2, grid);
    Json sweep = Json::array();
    out << "sweep (" << reports.size() << " grid points): theta | P(c|joint high) | P(w|joint low)\n";
    for (const auto& r : reports) {
      sweep.push_back(report_to_json(r));
      auto ph = r.correct_given_joint_high.value();
      auto pl = r.wrong_given_joint_low.value();
      out << "  " << fixed2(r.thresholds.high1) << " | " << (ph ? fixed2(*ph) : "-") << " | "
          << (pl ? fixed2(*pl) : "-") << "\n";
    }
    write_json(adir / "sweep.json", sweep);
  }

  // Grouped statistics and Yes > No tests when retrieval labels exist.
  const bool grouped =
      std::all_of(samples.begin(), samples.end(), [](const EvalSample& s) { return s.retrieval_correct.has_value(); });
  if (grouped && !samples.empty()) {
    Json stats = Json::object();
    Json rows = Json::array();
    for (const auto& g : group_stats(results, samples)) {
      rows.push_back({{"metric", std::string(to_string(g.metric))},
                      {"retrieval_correct", g.retrieval_correct},
                      {"n", g.n},
                      {"null_count", g.null_count},
                      {"mean", g.mean ? Json(*g.mean) : Json(nullptr)},
                      {"sd", g.sd ? Json(*g.sd) : Json(nullptr)}});
    }
    stats["groups"] = rows;
    std::map<std::string, bool> flag;
    for (const auto& s : samples) flag[s.id] = *s.retrieval_correct;
    Json tests = Json::array();
    std::set<MetricName> present;
    for (const auto& r : results) present.insert(r.metric);
    for (auto m : present) {
      std::vector<double> yes, no;
      for (const auto& r : results) {
        if (r.metric == m && r.value) (flag.at(r.sample_id) ? yes : no).push_back(*r.value);
      }
      if (yes.size() < 2 || no.size() < 2) continue;
      const auto t = welch_t_test(yes, no, Sidedness::one_sided_greater);
      tests.push_back({{"metric", std::string(to_string(m))}, {"t", t.t}, {"df", t.df}, {"p_one_sided", t.p}});
      out << "welch " << short_label(m) << " Yes > No: t=" << t.t << " df=" << t.df << " p=" << t.p << "\n";
    }
    stats["welch_yes_gt_no"] = tests;
    write_json(adir / "stats.json", stats);
  }
  return 0;
}

// ---- report ----

int cmd_report(const std::string& run, const std::string& styles, bool force, std::ostream& out) {
  std::stringstream ss(styles);
  std::vector<TableStyle> list;
  for (std::string item; std::getline(ss, item, ',');) {
    auto s = parse_table_style(item);
    if (!s) throw Error(ErrorCode::config_error, "--style: expected table1, table2 or table3, got '" + item + "'");
    list.push_back(*s);
  }
  if (list.empty()) throw Error(ErrorCode::config_error, "--style: no table selected");
  for (auto s : list) {
    out << render_tables(run, s, force).text;
    out << "wrote " << (fs::path(run) / run_files::tables / (std::string(to_string(s)) + ".txt")).string() << "\n";
  }
  return 0;
}

// ---- replay ----

int cmd_replay(const std::string& run, std::ostream& out) {
  const ReplayReport r = replay_run(run);
  if (!r.reproduced()) throw Error(ErrorCode::replay_divergence, *r.first_divergence);
  const auto problems = verify_manifest(run);
  if (!problems.empty()) throw Error(ErrorCode::replay_divergence, "manifest: " + problems.front());
  out << "scores reproduced (" << r.records << " records)\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate RAG question answering with LLM-judged metrics and full traces.", "rageval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rageval 0.1.0");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset and write a run directory");
  evaluate->add_option("--dataset", ev.dataset, "Input JSONL dataset")->required();
  evaluate->add_option("--out", ev.out, "Run directory to create")->required();
  evaluate->add_option("--metrics", ev.metrics, "Comma-separated metrics or 'all'");
  add_backend_flags(evaluate, ev.backend);
  evaluate->add_option("--question-mode", ev.question_mode, "per_call or single_completion");
  evaluate->add_option("--n", ev.n, "Questions generated for answer_relevance");
  evaluate->add_option("--weights", ev.weights, "answer_correctness weights 'w_factual,w_similarity'");
  evaluate->add_option("--parse-retries", ev.parse_retries, "Extra tries after an unparseable completion");
  evaluate->add_option("--concurrency", ev.concurrency, "Worker threads");
  evaluate->add_option("--cache", ev.cache, "Persistent response cache (JSONL)");
  evaluate->add_option("--prompts-dir", ev.prompts_dir, "Directory of prompt template overrides");
  evaluate->add_option("--label", ev.label, "Row label in rendered tables");
  evaluate->add_flag("--force", ev.force, "Overwrite an existing run directory");
  evaluate->add_flag("--verbose", ev.verbose, "Print resolved settings and their sources");

  RetrieveArgs rt;
  auto* retrieve = app.add_subcommand("retrieve", "Index a corpus, retrieve top-k chunks and score accuracy");
  retrieve->add_option("--corpus", rt.corpus, "Chunk corpus JSONL")->required();
  retrieve->add_option("--questions", rt.questions, "Question JSONL (dataset records)")->required();
  retrieve->add_option("--gold", rt.gold, "Gold chunk JSONL")->required();
  retrieve->add_option("--k", rt.ks, "Comma-separated k values")->capture_default_str();
  retrieve->add_option("--out", rt.out, "Output directory")->required();
  retrieve->add_option("--index", rt.index, "Index file to load (built and saved when absent)");
  retrieve->add_option("--stamp-k", rt.stamp_k, "Contexts kept per stamped sample")->capture_default_str();
  add_backend_flags(retrieve, rt.backend);
  retrieve->add_flag("--force", rt.force, "Overwrite existing outputs");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Concordance with human labels and grouped statistics");
  analyze->add_option("--run", an.run, "Run directory")->required();
  analyze->add_option("--labels", an.labels, "JSONL of {id, human_correct} overriding the run's labels");
  analyze->add_option("--theta-high", an.theta_high, "High threshold for both metrics (default 0.7)");
  analyze->add_option("--theta-low", an.theta_low, "Low threshold for both metrics (default 0.3)");
  analyze->add_option("--sweep", an.sweep, "Threshold grid start:end:step");
  analyze->add_option("--m1", an.m1, "First metric")->capture_default_str();
  analyze->add_option("--m2", an.m2, "Second metric")->capture_default_str();
  analyze->add_flag("--force", an.force, "Overwrite existing analysis outputs");

  std::string report_run, report_style = "table2";
  bool report_force = false;
  auto* report = app.add_subcommand("report", "Render tables from a run or retrieval directory");
  report->add_option("--run", report_run, "Run or retrieval directory")->required();
  report->add_option("--style", report_style, "Comma-separated: table1, table2, table3")->capture_default_str();
  report->add_flag("--force", report_force, "Overwrite existing table files");

  std::string replay_dir;
  auto* replay = app.add_subcommand("replay", "Re-score a run from its recorded traces");
  replay->add_option("--run", replay_dir, "Run directory")->required();

  std::vector<std::string> argv_store{"rageval"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(ev, out);
    if (retrieve->parsed()) return cmd_retrieve(rt, out);
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (report->parsed()) return cmd_report(report_run, report_style, report_force, out);
    if (replay->parsed()) return cmd_replay(replay_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace rageval
