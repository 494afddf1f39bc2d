#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "rageval/core/dataset.hpp"
#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

using namespace rageval;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "rageval_core_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::io_error;
}

EvalSample complete_sample() {
  EvalSample s;
  s.id = "q1";
  s.question = "What is NAS?";
  s.contexts = {"NAS is the non-access stratum."};
  s.generated_answer = "NAS is a protocol layer.";
  s.ground_truth = "The non-access stratum.";
  s.retrieval_correct = true;
  s.human_correct = false;
  return s;
}

}  // namespace

TEST_CASE("split_sentences hand segmentations", "[core][text]") {
  auto sentences = [](std::string_view t) { return text::split_sentences(t).sentences; };

  CHECK(text::split_sentences("A is B. C is D. E!").count() == 3);
  CHECK(text::split_sentences("").count() == 0);
  CHECK(text::split_sentences("   \n\t ").count() == 0);

  CHECK(sentences("See 3GPP Rel. 15 spec. It defines NAS.") ==
        std::vector<std::string>{"See 3GPP Rel. 15 spec.", "It defines NAS."});
  CHECK(sentences("Use a timer, e.g. T300. Then retry.") ==
        std::vector<std::string>{"Use a timer, e.g. T300.", "Then retry."});
  CHECK(sentences("The gap is 3.5 ms. Next slot.") == std::vector<std::string>{"The gap is 3.5 ms.", "Next slot."});
  CHECK(sentences("As in Fig. 4 and Sec. 2 we see this. Done.") ==
        std::vector<std::string>{"As in Fig. 4 and Sec. 2 we see this.", "Done."});
  CHECK(sentences("Authors J. R. Smith wrote it. It is cited.") ==
        std::vector<std::string>{"Authors J. R. Smith wrote it.", "It is cited."});
  // An initial after a lowercase word is indistinguishable from "is B." and splits.
  CHECK(text::split_sentences("Written by J. Smith. It is cited.").count() == 3);
  CHECK(sentences("Is it? Yes! It is.") == std::vector<std::string>{"Is it?", "Yes!", "It is."});
  CHECK(sentences("lower case. continues here") == std::vector<std::string>{"lower case. continues here"});
  CHECK(sentences("Line one.\n\nLine   two.") == std::vector<std::string>{"Line one.", "Line two."});
  CHECK(sentences("He said \"Stop.\" Then left.") == std::vector<std::string>{"He said \"Stop.\"", "Then left."});
  CHECK(sentences("No terminator at all") == std::vector<std::string>{"No terminator at all"});
}

TEST_CASE("split_sentences properties", "[core][text][property]") {
  std::mt19937 rng(7);
  const std::vector<std::string> words = {"NAS", "layer", "e.g.", "Rel.", "3.5", "UE", "sends", "A.", "it",
                                          "done.", "Why?", "Yes!", "etc.", "the", "\n", "  ", "i.e.", "cf."};
  for (int trial = 0; trial < 500; ++trial) {
    std::string input;
    const int len = static_cast<int>(rng() % 25);
    for (int i = 0; i < len; ++i) input += words[rng() % words.size()] + (rng() % 4 ? " " : "");
    const auto list = text::split_sentences(input);
    REQUIRE(list.count() == list.sentences.size());
    REQUIRE(text::split_sentences(input).sentences == list.sentences);  // deterministic

    std::size_t total = 0;
    for (const auto& s : list.sentences) {
      total += s.size();
      REQUIRE_FALSE(s.empty());
      // Idempotent on single sentences.
      REQUIRE(text::split_sentences(s).count() == 1);
    }
    REQUIRE(total <= input.size() + list.count());
    // Joining with single spaces recovers the normalized source.
    REQUIRE(text::join(list.sentences, " ") == text::normalize_whitespace(input));
  }
}

TEST_CASE("load_dataset", "[core][dataset]") {
  const std::string good =
      R"({"id":"a","question":"Q1?","contexts":["c1"],"generated_answer":"A1","ground_truth":"G1"})"
      "\n"
      R"({"id":"b","question":"Q2?","contexts":["c2","c3"],"generated_answer":"A2","ground_truth":"G2","retrieval_correct":false,"human_correct":true,"note":{"k":1}})"
      "\n";

  SECTION("valid lines load in order") {
    auto samples = load_dataset(temp_file("good.jsonl", good));
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].id == "a");
    CHECK(samples[1].id == "b");
    CHECK(samples[1].contexts.size() == 2);
    CHECK(samples[1].retrieval_correct == false);
    CHECK(samples[1].human_correct == true);
    CHECK_FALSE(samples[0].retrieval_correct.has_value());
    CHECK(samples[1].extra["note"]["k"] == 1);
  }

  SECTION("missing question reports its line") {
    const auto p = temp_file(
        "missing.jsonl",
        R"({"id":"a","question":"Q1?","contexts":["c"],"generated_answer":"A","ground_truth":"G"})"
        "\n"
        R"({"id":"b","contexts":["c"],"generated_answer":"A","ground_truth":"G"})"
        "\n");
    try {
      load_dataset(p);
      FAIL("expected malformed_record");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::malformed_record);
      CHECK(e.number() == 2);
    }
  }

  SECTION("duplicate ids") {
    const std::string line =
        R"({"id":"q7","question":"Q?","contexts":["c"],"generated_answer":"A","ground_truth":"G"})"
        "\n";
    try {
      load_dataset(temp_file("dup.jsonl", line + line));
      FAIL("expected duplicate_id");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::duplicate_id);
      CHECK(e.detail() == "q7");
    }
  }

  SECTION("whitespace-only required text is malformed") {
    const auto p = temp_file("blank.jsonl",
                             R"({"id":"a","question":"   ","contexts":["c"],"generated_answer":"A","ground_truth":"G"})"
                             "\n");
    CHECK(code_of([&] { load_dataset(p); }) == ErrorCode::malformed_record);
  }

  SECTION("missing file") {
    CHECK(code_of([] { load_dataset("/nonexistent/none.jsonl"); }) == ErrorCode::io_error);
  }

  SECTION("write then load round-trips every field") {
    auto samples = load_dataset(temp_file("rt_in.jsonl", good));
    samples[0].question = "Tabs\tand \"quotes\" and unicode \xCE\xB8";
    const fs::path out = fs::temp_directory_path() / "rageval_core_tests" / "rt_out.jsonl";
    write_dataset(out, samples);
    CHECK(load_dataset(out) == samples);
  }
}

TEST_CASE("validate_sample", "[core][dataset]") {
  const auto all = required_fields(std::vector<MetricName>(kAllMetrics.begin(), kAllMetrics.end()));
  const EvalSample s = complete_sample();
  CHECK(&validate_sample(s, all) == &s);

  EvalSample no_ctx = s;
  no_ctx.contexts.clear();
  CHECK(code_of([&] { validate_sample(no_ctx, required_fields(std::vector{MetricName::faithfulness})); }) ==
        ErrorCode::no_contexts);
  // Context-free metrics do not need contexts.
  CHECK_NOTHROW(validate_sample(no_ctx, required_fields(std::vector{MetricName::factual_correctness})));

  EvalSample unlabeled = s;
  unlabeled.human_correct.reset();
  try {
    validate_sample(unlabeled, {field::human_correct});
    FAIL("expected missing_field");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_field);
    CHECK(e.detail() == "human_correct");
  }

  EvalSample blank = s;
  blank.ground_truth = "  ";
  CHECK(code_of([&] { validate_sample(blank, all); }) == ErrorCode::empty_field);
}
