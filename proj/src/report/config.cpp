#include "rageval/report/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rageval/backends/mock.hpp"
#include "rageval/backends/openai.hpp"
#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

const std::vector<std::string> kKeys = {
    "backend",       "mock_script",  "base_url",       "chat_model",        "embedding_model",
    "metrics",       "answer_relevance_n", "question_mode", "weights",      "parse_retries",
    "concurrency",   "max_in_flight", "max_tokens",    "seed",              "cache",
    "prompts_dir",   "thresholds",   "http",           "label",
};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::config_error, key + ": " + why);
}

template <class T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    bad(key, "wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

Provenance default_provenance() {
  Provenance p;
  for (const auto& k : kKeys) p[k] = "default";
  return p;
}

void apply_config_json(RunConfig& c, const Json& doc, const std::filesystem::path& base_dir, Provenance* prov,
                       const std::string& source) {
  if (!doc.is_object()) throw Error(ErrorCode::config_error, "config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (v.is_null()) {
      // null clears an optional setting.
      if (key == "mock_script") {
        c.mock_script.reset();
      } else if (key == "base_url") {
        c.base_url.reset();
      } else if (key == "seed") {
        c.seed.reset();
      } else if (key == "cache") {
        c.cache.reset();
      } else if (key == "prompts_dir") {
        c.prompts_dir.reset();
      } else {
        bad(key, "must not be null");
      }
      if (prov) (*prov)[key] = source;
      continue;
    }
    if (key == "backend") {
      c.backend = get_as<std::string>(v, key);
    } else if (key == "mock_script") {
      c.mock_script = resolve(base_dir, get_as<std::string>(v, key));
    } else if (key == "base_url") {
      c.base_url = get_as<std::string>(v, key);
    } else if (key == "chat_model") {
      c.chat_model = get_as<std::string>(v, key);
    } else if (key == "embedding_model") {
      c.embedding_model = get_as<std::string>(v, key);
    } else if (key == "metrics") {
      if (v.is_string()) {
        c.metrics = parse_metric_list(v.get<std::string>());
      } else {
        std::vector<MetricName> ms;
        for (const auto& name : get_as<std::vector<std::string>>(v, key)) {
          auto m = parse_metric_name(name);
          if (!m) bad(key, "unknown metric '" + name + "'");
          ms.push_back(*m);
        }
        c.metrics = ms;
      }
    } else if (key == "answer_relevance_n") {
      c.answer_relevance_n = get_as<int>(v, key);
    } else if (key == "question_mode") {
      auto m = parse_question_mode(get_as<std::string>(v, key));
      if (!m) bad(key, "expected per_call or single_completion");
      c.question_mode = *m;
    } else if (key == "weights") {
      auto w = get_as<std::vector<double>>(v, key);
      if (w.size() != 2) bad(key, "expected [w_factual, w_similarity]");
      c.weights = {w[0], w[1]};
    } else if (key == "parse_retries") {
      c.parse_retries = get_as<int>(v, key);
    } else if (key == "concurrency") {
      c.concurrency = get_as<int>(v, key);
    } else if (key == "max_in_flight") {
      c.max_in_flight = get_as<int>(v, key);
    } else if (key == "max_tokens") {
      c.max_tokens = get_as<int>(v, key);
    } else if (key == "seed") {
      c.seed = get_as<long>(v, key);
    } else if (key == "cache") {
      c.cache = resolve(base_dir, get_as<std::string>(v, key));
    } else if (key == "prompts_dir") {
      c.prompts_dir = resolve(base_dir, get_as<std::string>(v, key));
    } else if (key == "thresholds") {
      if (!v.is_object()) bad(key, "expected {high, low}");
      for (const auto& [tk, tv] : v.items()) {
        if (tk == "high") {
          c.theta_high = get_as<double>(tv, "thresholds.high");
        } else if (tk == "low") {
          c.theta_low = get_as<double>(tv, "thresholds.low");
        } else {
          bad("thresholds." + tk, "unknown key");
        }
      }
    } else if (key == "http") {
      if (!v.is_object()) bad(key, "expected an object");
      for (const auto& [hk, hv] : v.items()) {
        if (hk == "max_attempts") {
          c.http_max_attempts = get_as<int>(hv, "http.max_attempts");
        } else if (hk == "timeout_seconds") {
          c.http_timeout_seconds = get_as<int>(hv, "http.timeout_seconds");
        } else if (hk == "base_delay_ms") {
          c.http_base_delay_ms = get_as<int>(hv, "http.base_delay_ms");
        } else {
          bad("http." + hk, "unknown key");
        }
      }
    } else if (key == "label") {
      c.label = get_as<std::string>(v, key);
    } else {
      bad(key, "unknown key");
    }
    if (prov) (*prov)[key] = source;
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path, Provenance* provenance) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::config_error, path.string() + ": " + e.what());
  }
  apply_config_json(config, doc, std::filesystem::absolute(path).parent_path(), provenance);
}

Json config_to_json(const RunConfig& c) {
  Json j = Json::object();
  j["backend"] = c.backend;
  j["mock_script"] = c.mock_script ? Json(c.mock_script->string()) : Json(nullptr);
  j["base_url"] = c.base_url ? Json(*c.base_url) : Json(nullptr);
  j["chat_model"] = c.chat_model;
  j["embedding_model"] = c.embedding_model;
  Json ms = Json::array();
  for (auto m : c.metrics) ms.push_back(std::string(to_string(m)));
  j["metrics"] = ms;
  j["answer_relevance_n"] = c.answer_relevance_n;
  j["question_mode"] = std::string(to_string(c.question_mode));
  j["weights"] = {c.weights.w_factual, c.weights.w_similarity};
  j["parse_retries"] = c.parse_retries;
  j["concurrency"] = c.concurrency;
  j["max_in_flight"] = c.max_in_flight;
  j["max_tokens"] = c.max_tokens;
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  j["cache"] = c.cache ? Json(c.cache->string()) : Json(nullptr);
  j["prompts_dir"] = c.prompts_dir ? Json(c.prompts_dir->string()) : Json(nullptr);
  j["thresholds"] = {{"high", c.theta_high}, {"low", c.theta_low}};
  j["http"] = {{"max_attempts", c.http_max_attempts},
               {"timeout_seconds", c.http_timeout_seconds},
               {"base_delay_ms", c.http_base_delay_ms}};
  j["label"] = c.label;
  return j;
}

void validate_config(const RunConfig& c) {
  if (c.backend != "mock" && c.backend != "openai") bad("backend", "expected mock or openai");
  if (c.metrics.empty()) bad("metrics", "no metrics selected");
  if (c.answer_relevance_n < 1) bad("answer_relevance_n", "must be >= 1");
  if (c.parse_retries < 0) bad("parse_retries", "must be >= 0");
  if (c.concurrency < 1) bad("concurrency", "must be >= 1");
  if (c.max_in_flight < 1) bad("max_in_flight", "must be >= 1");
  if (c.max_tokens < 1) bad("max_tokens", "must be >= 1");
  if (c.http_max_attempts < 1) bad("http.max_attempts", "must be >= 1");
  if (c.http_timeout_seconds < 1) bad("http.timeout_seconds", "must be >= 1");
  if (c.http_base_delay_ms < 0) bad("http.base_delay_ms", "must be >= 0");
  if (c.theta_high < 0 || c.theta_high > 1 || c.theta_low < 0 || c.theta_low > 1) bad("thresholds", "must lie in [0, 1]");
  try {
    validate_weights(c.weights);
  } catch (const Error& e) {
    bad("weights", e.detail());
  }
}

EngineOptions engine_options(const RunConfig& c) {
  EngineOptions o;
  o.chat_model = c.chat_model;
  o.max_tokens = c.max_tokens;
  o.seed = c.seed;
  o.parse_retries = c.parse_retries;
  o.answer_relevance_n = c.answer_relevance_n;
  o.question_mode = c.question_mode;
  o.weights = c.weights;
  return o;
}

std::vector<MetricName> parse_metric_list(const std::string& csv) {
  std::vector<MetricName> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      out.assign(kAllMetrics.begin(), kAllMetrics.end());
      continue;
    }
    auto m = parse_metric_name(item);
    if (!m) {
      std::string valid;
      for (auto v : kAllMetrics) valid += (valid.empty() ? "" : ", ") + std::string(to_string(v));
      throw Error(ErrorCode::config_error, "unknown metric '" + item + "' (valid: " + valid + ")");
    }
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

namespace {

std::shared_ptr<OpenAiClient> make_client(const RunConfig& c) {
  OpenAiOptions o;
  apply_environment(o);
  if (c.base_url) o.base_url = *c.base_url;
  o.retry.max_attempts = c.http_max_attempts;
  o.retry.base_delay = std::chrono::milliseconds(c.http_base_delay_ms);
  o.max_in_flight = c.max_in_flight;
  o.seed = c.seed;
  o.embedding_model = c.embedding_model;
  auto transport =
      std::make_shared<HttplibTransport>(o.base_url, o.api_key, std::chrono::seconds(c.http_timeout_seconds));
  return std::make_shared<OpenAiClient>(std::move(o), std::move(transport));
}

MockScript script_for(const RunConfig& c) {
  if (!c.mock_script) throw Error(ErrorCode::config_error, "mock backend needs mock_script");
  return load_mock_script(*c.mock_script);
}

}  // namespace

Backends make_backends(const RunConfig& c) {
  validate_config(c);
  Backends b;
  if (c.backend == "mock") {
    auto script = script_for(c);
    b.chat_chain.push_back(make_scripted_chat(script));
    b.embedder = make_mock_embedder(script);
  } else {
    auto client = make_client(c);
    b.chat_chain.push_back(std::make_unique<OpenAiChat>(client));
    b.embedder = std::make_unique<OpenAiEmbedder>(client);
  }
  if (c.cache) {
    b.cache = std::make_shared<ResponseCache>(*c.cache);
    b.chat_chain.push_back(std::make_unique<CachedChat>(*b.chat_chain.back(), b.cache));
  }
  return b;
}

std::unique_ptr<Embedder> make_embedder(const RunConfig& c) {
  if (c.backend == "mock") {
    if (!c.mock_script) return std::make_unique<HashEmbedder>();
    return make_mock_embedder(load_mock_script(*c.mock_script));
  }
  if (c.backend == "openai") return std::make_unique<OpenAiEmbedder>(make_client(c));
  throw Error(ErrorCode::config_error, "backend: expected mock or openai");
}

}  // namespace rageval
