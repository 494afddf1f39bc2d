#include "rageval/report/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "rageval/backends/cache.hpp"
#include "rageval/backends/mock.hpp"
#include "rageval/core/dataset.hpp"
#include "rageval/core/digest.hpp"
#include "rageval/error.hpp"
#include "rageval/metrics/engine.hpp"

namespace rageval {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputs[] = {run_files::manifest, run_files::dataset, run_files::scores, run_files::traces,
                                    run_files::calls};

// Serializes appends to one JSONL file.
class JsonlWriter {
 public:
  explicit JsonlWriter(const fs::path& path) : out_(path, std::ios::app) {
    if (!out_) throw Error(ErrorCode::unwritable_output, path.string());
  }
  void append(const Json& record) {
    std::lock_guard lock(mutex_);
    out_ << record.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::unwritable_output, tmp.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw Error(ErrorCode::unwritable_output, tmp.string());
  }
  fs::rename(tmp, path);
}

std::pair<std::string, std::string> record_key(const Json& j) {
  return {j.at("sample_id").get<std::string>(), j.at("metric").get<std::string>()};
}

std::vector<std::string> sorted_lines(std::vector<Json> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const Json& a, const Json& b) { return record_key(a) < record_key(b); });
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r.dump());
  return lines;
}

// Rewrites an appended JSONL file in (sample_id, metric) order.
void sort_file(const fs::path& path) {
  std::vector<Json> records;
  for (const auto& l : read_lines(path)) records.push_back(Json::parse(l));
  write_lines(path, sorted_lines(std::move(records)));
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t count_lines(const fs::path& path) { return read_lines(path).size(); }

void prepare_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::unwritable_output, dir.string() + " is not a directory");
    bool occupied = false;
    for (const char* f : kOutputs) occupied = occupied || fs::exists(dir / f);
    if (occupied && !force) throw Error(ErrorCode::output_exists, dir.string());
    for (const char* f : kOutputs) fs::remove(dir / f, ec);
    fs::remove_all(dir / run_files::tables, ec);
    fs::remove_all(dir / run_files::analysis, ec);
  } else {
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::unwritable_output, dir.string() + ": " + ec.message());
  }
}

PromptLibrary prompts_for(const RunConfig& config) {
  return config.prompts_dir ? PromptLibrary::load(*config.prompts_dir) : PromptLibrary::defaults();
}

// Evaluates every task on a pool; `emit` is called once per result from
// worker threads. A non-absorbed error stops the pool and is rethrown.
template <class Emit>
void evaluate_all(const MetricEngine& engine, std::span<const EvalSample> dataset,
                  const std::vector<MetricName>& metrics, int concurrency, Emit&& emit) {
  std::vector<std::pair<std::size_t, MetricName>> tasks;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (auto m : metrics) tasks.emplace_back(i, m);
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        emit(engine.evaluate(tasks[t].second, dataset[tasks[t].first]));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  const auto n = std::max<std::size_t>(1, std::min<std::size_t>(concurrency, tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

Json call_record(const CallRecord& c) {
  Json j = Json::object();
  j["request_tag"] = c.request.request_tag;
  j["sequence"] = c.request.sequence;
  j["attempt"] = c.request.attempt;
  j["latency_us"] = c.latency.count();
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

}  // namespace

RunSummary run_evaluation(std::span<const EvalSample> dataset, const RunConfig& config, ChatBackend& chat,
                          Embedder& embedder, const fs::path& out_dir, const RunOptions& options) {
  validate_config(config);
  const auto required = required_fields(config.metrics);
  for (const auto& s : dataset) validate_sample(s, required);

  prepare_dir(out_dir, options.force);
  write_dataset(out_dir / run_files::dataset, dataset);

  RunSummary summary;
  summary.dir = out_dir;
  summary.samples = dataset.size();
  {
    JsonlWriter scores(out_dir / run_files::scores);
    JsonlWriter traces(out_dir / run_files::traces);
    JsonlWriter calls(out_dir / run_files::calls);
    RecordingChat recorded(chat, [&calls](const CallRecord& c) { calls.append(call_record(c)); });
    MetricEngine engine(recorded, embedder, engine_options(config), prompts_for(config));
    std::mutex tally;
    evaluate_all(engine, dataset, config.metrics, config.concurrency, [&](const MetricResult& r) {
      scores.append(score_record(r));
      traces.append(trace_record(r));
      std::lock_guard lock(tally);
      ++summary.records;
      if (!r.value) {
        ++summary.nulls;
        ++summary.nulls_by_metric[r.metric];
        if (r.null_reason == NullReason::backend_error) ++summary.backend_errors;
      }
    });
  }
  sort_file(out_dir / run_files::scores);
  sort_file(out_dir / run_files::traces);

  const std::string dataset_digest = sha256_file(out_dir / run_files::dataset);
  const Json snapshot = config_to_json(config);
  summary.run_id = sha256_hex(snapshot.dump() + dataset_digest).substr(0, 16);

  Json m = Json::object();
  m["run_id"] = summary.run_id;
  m["timestamp"] = utc_timestamp();
  m["backend_ids"] = {{"chat", chat.backend_id()}, {"embedding", embedder.model_id()}};
  m["models"] = {{"chat", config.chat_model}, {"embedding", embedder.model_id()}};
  Json templates = Json::array();
  const PromptLibrary prompts = prompts_for(config);
  for (const auto* t : prompts.all()) {
    templates.push_back({{"name", std::string(to_string(t->id))}, {"version", t->version}, {"digest", t->digest()}});
  }
  m["prompt_templates"] = templates;
  m["config"] = snapshot;
  m["dataset"] = {{"file", run_files::dataset}, {"source", options.dataset_source}, {"digest", dataset_digest}};
  Json metrics = Json::array();
  for (auto metric : config.metrics) metrics.push_back(std::string(to_string(metric)));
  m["metrics"] = metrics;
  Json nulls = Json::object();
  for (auto metric : config.metrics) {
    auto it = summary.nulls_by_metric.find(metric);
    nulls[std::string(to_string(metric))] = it == summary.nulls_by_metric.end() ? 0 : it->second;
  }
  m["counts"] = {{"samples", summary.samples}, {"evaluated", summary.records}, {"nulls", nulls}};
  Json files = Json::object();
  for (const char* f : {run_files::dataset, run_files::scores, run_files::traces}) {
    files[f] = {{"digest", sha256_file(out_dir / f)}, {"lines", count_lines(out_dir / f)}};
  }
  m["files"] = files;
  std::ofstream out(out_dir / run_files::manifest, std::ios::trunc);
  if (!out) throw Error(ErrorCode::unwritable_output, (out_dir / run_files::manifest).string());
  out << m.dump(2) << '\n';
  return summary;
}

RunSummary run_evaluation(std::span<const EvalSample> dataset, const RunConfig& config, const fs::path& out_dir,
                          const RunOptions& options) {
  Backends b = make_backends(config);
  return run_evaluation(dataset, config, b.chat(), *b.embedder, out_dir, options);
}

std::vector<MetricResult> load_scores(const fs::path& path) {
  std::vector<MetricResult> out;
  long line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    try {
      Json j = Json::parse(line);
      MetricResult r;
      r.sample_id = j.at("sample_id").get<std::string>();
      auto metric = parse_metric_name(j.at("metric").get<std::string>());
      if (!metric) throw Error(ErrorCode::malformed_record, path.string(), line_no);
      r.metric = *metric;
      if (!j.at("value").is_null()) r.value = j.at("value").get<double>();
      if (j.contains("null_reason")) r.null_reason = parse_null_reason(j.at("null_reason").get<std::string>());
      out.push_back(std::move(r));
    } catch (const Json::exception&) {
      throw Error(ErrorCode::malformed_record, path.string(), line_no);
    }
  }
  return out;
}

Json load_manifest(const fs::path& run_dir) {
  const fs::path p = run_dir / run_files::manifest;
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::missing_inputs, p.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception&) {
    throw Error(ErrorCode::malformed_record, p.string());
  }
}

std::vector<std::string> verify_manifest(const fs::path& run_dir) {
  const Json m = load_manifest(run_dir);
  std::vector<std::string> problems;
  for (const auto& [name, entry] : m.at("files").items()) {
    const fs::path p = run_dir / name;
    if (!fs::exists(p)) {
      problems.push_back(name + ": missing");
      continue;
    }
    if (sha256_file(p) != entry.at("digest").get<std::string>()) problems.push_back(name + ": digest differs");
    if (count_lines(p) != entry.at("lines").get<std::size_t>()) problems.push_back(name + ": line count differs");
  }
  const auto evaluated = m.at("counts").at("evaluated").get<std::size_t>();
  if (fs::exists(run_dir / run_files::scores) && count_lines(run_dir / run_files::scores) != evaluated) {
    problems.push_back(std::string(run_files::scores) + ": record count differs from counts.evaluated");
  }
  return problems;
}

ReplayReport replay_run(const fs::path& run_dir) {
  for (const char* f : {run_files::traces, run_files::scores, run_files::dataset, run_files::manifest}) {
    if (!fs::exists(run_dir / f)) throw Error(ErrorCode::missing_inputs, (run_dir / f).string());
  }
  const Json manifest = load_manifest(run_dir);
  RunConfig config;
  Json snapshot = manifest.at("config");
  // Paths in the snapshot are already resolved; backend settings are unused.
  apply_config_json(config, snapshot, {});

  const auto dataset = load_dataset(run_dir / run_files::dataset);
  const auto trace_lines = read_lines(run_dir / run_files::traces);
  const auto score_lines = read_lines(run_dir / run_files::scores);

  std::vector<ChatExchange> exchanges;
  std::map<std::string, std::vector<double>> table;
  std::string embedding_model = "replay";
  bool model_seen = false;
  for (const auto& line : trace_lines) {
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::exception&) {
      return {trace_lines.size(), std::string(run_files::traces) + ": unparseable line"};
    }
    const Json& trace = rec.contains("trace") ? rec["trace"] : Json::object();
    for (auto& e : collect_exchanges(trace)) exchanges.push_back(std::move(e));
    for (auto& e : collect_embeddings(trace)) {
      if (!model_seen) {
        embedding_model = e.vector.model_id;
        model_seen = true;
      }
      table.emplace(e.text, e.vector.values);
    }
  }

  ReplayChat chat(exchanges);
  TableEmbedder embedder(std::move(table), embedding_model);
  MetricEngine engine(chat, embedder, engine_options(config), prompts_for(config));
  std::vector<Json> scores, traces;
  std::mutex mutex;
  evaluate_all(engine, dataset, config.metrics, config.concurrency, [&](const MetricResult& r) {
    std::lock_guard lock(mutex);
    scores.push_back(score_record(r));
    traces.push_back(trace_record(r));
  });
  const auto regenerated_scores = sorted_lines(std::move(scores));
  const auto regenerated_traces = sorted_lines(std::move(traces));

  ReplayReport report;
  report.records = regenerated_scores.size();
  auto compare = [&](const char* file, const std::vector<std::string>& expected,
                     const std::vector<std::string>& actual) -> std::optional<std::string> {
    const std::size_t n = std::min(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (expected[i] == actual[i]) continue;
      std::string where = "line " + std::to_string(i + 1);
      try {
        auto [id, metric] = record_key(Json::parse(actual[i]));
        where = id + "/" + metric;
      } catch (const Json::exception&) {
      }
      return std::string(file) + " " + where + ": recorded record differs from replay";
    }
    if (expected.size() != actual.size()) {
      return std::string(file) + ": " + std::to_string(actual.size()) + " records on disk, " +
             std::to_string(expected.size()) + " replayed";
    }
    return std::nullopt;
  };
  report.first_divergence = compare(run_files::scores, regenerated_scores, score_lines);
  if (!report.first_divergence) report.first_divergence = compare(run_files::traces, regenerated_traces, trace_lines);
  return report;
}

}  // namespace rageval
