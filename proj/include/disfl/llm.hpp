// llm.hpp
// Description-then-generation prompting against a completion-style LLM
// endpoint.  A session first sends the data-description prompt, then runs
// generation rounds each carrying a few annotated example sentences; the
// description is re-sent after every max_round generation rounds.  Each
// completion is split into candidate lines, validated against the annotation
// grammar, and collected with per-line rejection reasons.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& detail) : std::runtime_error(detail) {}
};

enum class SessionErrorKind { AllRoundsFailed, BadTemplate, InsufficientExamples, EmptyInput };

class SessionError : public std::runtime_error {
 public:
  SessionError(SessionErrorKind kind, const std::string& detail);
  SessionErrorKind kind() const { return kind_; }

 private:
  SessionErrorKind kind_;
};

// The generation template must contain the examples placeholder exactly once.
inline constexpr const char* kExamplesPlaceholder = "{examples}";

struct PromptTemplates {
  std::string description;
  std::string generation;

  static PromptTemplates load(const std::string& description_path,
                              const std::string& generation_path);
  void validate() const;
  std::string render_generation(const std::vector<std::string>& example_lines) const;
};

struct SamplingParams {
  double temperature = 0.7;
  int max_tokens = 512;
};

struct GenSessionConfig {
  int max_round = 10;        // generation rounds between description re-sends
  int total_rounds = 50;
  int examples_per_prompt = 3;   // 2 or 3
  SamplingParams sampling;
  std::uint64_t rng_seed = 0;
  // Restrict the example pool to sentences containing an edit of this type.
  std::optional<DisfluencyType> example_type_filter;

  void validate() const;
};

struct TranscriptEntry {
  enum class Kind { Description, Generation };
  Kind kind;
  int round = 0;             // 1-based generation round
  std::string prompt;
  std::string completion;
  std::string model;
  double temperature = 0.0;
  std::int64_t timestamp_ms = 0;
};

using Transcript = std::vector<TranscriptEntry>;

void write_transcript(const std::string& path, const Transcript& transcript);

// Request -> completion contract.  `context` is the conversation so far.
// Implementations retry internally and throw TransportError once the retry
// budget is spent.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual std::string complete(const std::string& prompt, const Transcript& context,
                               const SamplingParams& params) = 0;
  virtual std::string model_name() const { return "unknown"; }
};

// Scripted transport for tests: generation calls consume the script in
// order; an empty optional raises TransportError for that call.  Calls whose
// prompt equals the registered description text reply "OK" without touching
// the script.
class MockTransport : public LlmTransport {
 public:
  explicit MockTransport(std::vector<std::optional<std::string>> script);
  void set_description_prompt(std::string text) { description_prompt_ = std::move(text); }
  std::string complete(const std::string& prompt, const Transcript& context,
                       const SamplingParams& params) override;
  std::string model_name() const override { return "mock"; }
  int calls() const { return calls_; }

 private:
  std::vector<std::optional<std::string>> script_;
  std::string description_prompt_;
  std::size_t next_ = 0;
  int calls_ = 0;
};

// Deterministic offline stand-in: completions are numbered annotation lines
// built by applying seeded edit operations to pool sentences.  Description
// prompts are acknowledged without content.
class SyntheticTransport : public LlmTransport {
 public:
  SyntheticTransport(std::vector<AnnotatedSentence> pool, std::uint64_t seed,
                     int lines_per_completion = 4);
  std::string complete(const std::string& prompt, const Transcript& context,
                       const SamplingParams& params) override;
  std::string model_name() const override { return "synthetic"; }

 private:
  std::vector<AnnotatedSentence> pool_;
  std::uint64_t seed_;
  int lines_per_completion_;
  std::uint64_t call_index_ = 0;
};

struct HttpTransportConfig {
  std::string endpoint;                       // e.g. https://api.example.com/v1/completions
  std::string model = "text-davinci-003";
  std::string api_key_env = "DISFL_API_KEY";
  int max_retries = 3;
  int retry_backoff_ms = 500;
  int timeout_seconds = 60;
  std::size_t max_context_chars = 6000;       // older exchange text is truncated
  std::string audit_path;                     // raw request/response JSONL, optional
};

class HttpTransport : public LlmTransport {
 public:
  explicit HttpTransport(HttpTransportConfig config);
  std::string complete(const std::string& prompt, const Transcript& context,
                       const SamplingParams& params) override;
  std::string model_name() const override;

 private:
  HttpTransportConfig config_;
  std::string api_key_;
};

struct RejectionReason {
  enum class Kind { ParseFailure, MissingPos, NoDisfluency, DuplicateOfExample };
  Kind kind;
  std::string detail;
};

const char* rejection_kind_name(RejectionReason::Kind kind);

// Accepts a candidate iff it parses, every token has a POS tag, and at least
// one edit or tagged chunk is present.  List decorations ("1.", "-") are
// stripped before parsing.  `example_renders` holds canonical renderings of
// the example sentences already shown; exact matches are rejected.
std::variant<AnnotatedSentence, RejectionReason> validate_candidate(
    const std::string& raw_line, const std::vector<std::string>& example_renders = {});

// Strips leading list numbering / bullets and surrounding whitespace.
std::string strip_candidate_decoration(const std::string& line);

struct GenerationReport {
  std::vector<AnnotatedSentence> accepted;
  std::vector<bool> near_duplicate;   // same surface multiset as a shown example
  std::vector<std::pair<std::string, RejectionReason>> rejected;
  int rounds_executed = 0;
  int failed_rounds = 0;
  std::map<DisfluencyType, int> type_counts;   // over outer edits of accepted
  Transcript transcript;
};

void write_generation_report(const std::string& path, const GenerationReport& report,
                             const GenSessionConfig& config);

GenerationReport run_session(const PromptTemplates& templates,
                             const GenSessionConfig& config,
                             const std::vector<AnnotatedSentence>& seed_corpus,
                             LlmTransport& transport);

struct TypeHistogram {
  double repetition_pct = 0;
  double substitution_pct = 0;
  double deletion_pct = 0;
  int edits = 0;
  int repetition = 0;
  int substitution = 0;
  int deletion = 0;
};

// Percentages over outer-edit counts, rounded to 2 decimals for display.
TypeHistogram type_histogram(const std::vector<AnnotatedSentence>& sentences);

}  // namespace disfl
