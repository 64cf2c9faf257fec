#include "disfl/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "disfl/heuristic.hpp"
#include "disfl/rng.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace disfl {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::size_t count_placeholders(const std::string& text) {
  std::size_t count = 0;
  std::size_t pos = 0;
  const std::string needle = kExamplesPlaceholder;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> sorted_surfaces(const AnnotatedSentence& s) {
  std::vector<std::string> surfaces;
  for (const Token& t : flatten_tokens(s)) {
    surfaces.push_back(t.surface);
  }
  std::sort(surfaces.begin(), surfaces.end());
  return surfaces;
}

bool has_any_pos(const AnnotatedSentence& s) {
  for (const Token& t : flatten_tokens(s)) {
    if (!t.pos) return false;
  }
  return true;
}

bool has_disfluency_markup(const AnnotatedSentence& s) {
  for (const Chunk& c : s.chunks) {
    if (c.is_edit() || c.is_tagged()) return true;
  }
  return false;
}

json transcript_entry_json(const TranscriptEntry& e) {
  json rec;
  rec["kind"] = e.kind == TranscriptEntry::Kind::Description ? "description" : "generation";
  rec["round"] = e.round;
  rec["prompt"] = e.prompt;
  rec["completion"] = e.completion;
  rec["model"] = e.model;
  rec["temperature"] = e.temperature;
  rec["timestamp_ms"] = e.timestamp_ms;
  return rec;
}

}  // namespace

SessionError::SessionError(SessionErrorKind kind, const std::string& detail)
    : std::runtime_error(detail), kind_(kind) {}

PromptTemplates PromptTemplates::load(const std::string& description_path,
                                      const std::string& generation_path) {
  PromptTemplates t;
  t.description = read_file(description_path);
  t.generation = read_file(generation_path);
  t.validate();
  return t;
}

void PromptTemplates::validate() const {
  if (description.empty()) {
    throw SessionError(SessionErrorKind::BadTemplate, "description prompt is empty");
  }
  if (generation.empty()) {
    throw SessionError(SessionErrorKind::BadTemplate, "generation prompt is empty");
  }
  std::size_t n = count_placeholders(generation);
  if (n != 1) {
    throw SessionError(SessionErrorKind::BadTemplate,
                       "generation prompt must contain " + std::string(kExamplesPlaceholder) +
                       " exactly once (found " + std::to_string(n) + ")");
  }
}

std::string PromptTemplates::render_generation(
    const std::vector<std::string>& example_lines) const {
  std::string examples;
  for (std::size_t i = 0; i < example_lines.size(); ++i) {
    if (i) examples += '\n';
    examples += example_lines[i];
  }
  std::string out = generation;
  std::size_t pos = out.find(kExamplesPlaceholder);
  out.replace(pos, std::string(kExamplesPlaceholder).size(), examples);
  return out;
}

void GenSessionConfig::validate() const {
  if (max_round < 1) throw std::invalid_argument("max_round must be at least 1");
  if (total_rounds < 1) throw std::invalid_argument("total_rounds must be at least 1");
  if (examples_per_prompt != 2 && examples_per_prompt != 3) {
    throw std::invalid_argument("examples_per_prompt must be 2 or 3");
  }
}

void write_transcript(const std::string& path, const Transcript& transcript) {
  std::ofstream out(path, std::ios::app);   // append-only audit trail
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  for (const TranscriptEntry& e : transcript) {
    out << transcript_entry_json(e).dump() << '\n';
  }
}

MockTransport::MockTransport(std::vector<std::optional<std::string>> script)
    : script_(std::move(script)) {}

std::string MockTransport::complete(const std::string& prompt, const Transcript& context,
                                    const SamplingParams& params) {
  (void)context;
  (void)params;
  ++calls_;
  if (!description_prompt_.empty() && prompt == description_prompt_) {
    return "OK";
  }
  if (next_ >= script_.size()) {
    throw TransportError("mock script exhausted");
  }
  std::optional<std::string> entry = script_[next_++];
  if (!entry) {
    throw TransportError("scripted transport failure");
  }
  return *entry;
}

SyntheticTransport::SyntheticTransport(std::vector<AnnotatedSentence> pool,
                                       std::uint64_t seed, int lines_per_completion)
    : pool_(std::move(pool)), seed_(seed), lines_per_completion_(lines_per_completion) {
  if (pool_.empty()) {
    throw std::invalid_argument("synthetic transport needs a non-empty sentence pool");
  }
}

std::string SyntheticTransport::complete(const std::string& prompt,
                                         const Transcript& context,
                                         const SamplingParams& params) {
  (void)context;
  (void)params;
  std::uint64_t call = call_index_++;
  // Description prompts carry no examples placeholder output; detect them by
  // the absence of any annotated line (examples always contain "/").
  if (prompt.find('[') == std::string::npos && prompt.find("Example") == std::string::npos) {
    return "Understood.";
  }
  Rng rng(seed_ ^ (0x9e3779b97f4a7c15ull * (call + 1)));
  std::ostringstream out;
  for (int i = 0; i < lines_per_completion_; ++i) {
    const AnnotatedSentence& src = pool_[rng.below(pool_.size())];
    std::vector<Token> fluent = strip_to_fluent(src);
    if (fluent.empty()) {
      continue;
    }
    AnnotatedSentence gen;
    std::size_t op = rng.below(3);
    if (op == 0 || fluent.size() < 2) {
      std::size_t n = rng.in_range(1, std::min<std::size_t>(2, fluent.size()));
      std::size_t p = rng.below(fluent.size() - n + 1);
      gen = repeat_ngram(fluent, p, n);
    } else if (op == 1) {
      std::size_t n = rng.in_range(1, std::min<std::size_t>(2, fluent.size() - 1));
      std::size_t p = rng.below(fluent.size() - n + 1);
      gen = delete_ngram_variant(fluent, p, n);
    } else {
      const AnnotatedSentence& donor_src = pool_[rng.below(pool_.size())];
      std::vector<Token> donor_fluent = strip_to_fluent(donor_src);
      if (donor_fluent.empty()) donor_fluent = fluent;
      std::size_t n = rng.in_range(1, std::min<std::size_t>(2, donor_fluent.size()));
      std::size_t p = rng.below(donor_fluent.size() - n + 1);
      std::vector<Token> donor(donor_fluent.begin() + p, donor_fluent.begin() + p + n);
      gen = insert_ngram(fluent, rng.below(fluent.size() + 1), donor);
    }
    gen.terminated = src.terminated;
    out << (i + 1) << ". " << render_annotated(gen) << '\n';
  }
  return out.str();
}

std::string HttpTransport::model_name() const { return config_.model; }

HttpTransport::HttpTransport(HttpTransportConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw std::invalid_argument("http transport requires an endpoint URL");
  }
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) {
    throw std::invalid_argument("API credentials not found: set " + config_.api_key_env);
  }
  api_key_ = key;
}

std::string HttpTransport::complete(const std::string& prompt, const Transcript& context,
                                    const SamplingParams& params) {
  // Completion endpoints carry no conversation state; replay the most recent
  // exchange text ahead of the prompt, capped at max_context_chars.
  std::string full;
  for (const TranscriptEntry& e : context) {
    full += e.prompt;
    full += '\n';
    full += e.completion;
    full += '\n';
  }
  if (full.size() > config_.max_context_chars) {
    full.erase(0, full.size() - config_.max_context_chars);
  }
  full += prompt;

  auto split = config_.endpoint.find("://");
  if (split == std::string::npos) {
    throw TransportError("endpoint URL has no scheme: " + config_.endpoint);
  }
  auto path_start = config_.endpoint.find('/', split + 3);
  std::string base = path_start == std::string::npos ? config_.endpoint
                                                     : config_.endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/"
                                                     : config_.endpoint.substr(path_start);

  json body;
  body["model"] = config_.model;
  body["prompt"] = full;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(path, headers, payload, "application/json");

    if (!config_.audit_path.empty()) {
      std::ofstream audit(config_.audit_path, std::ios::app);
      json rec;
      rec["timestamp_ms"] = now_ms();
      rec["attempt"] = attempt;
      rec["request"] = body;
      rec["status"] = res ? res->status : 0;
      rec["response"] = res ? res->body : httplib::to_string(res.error());
      audit << rec.dump() << '\n';
    }

    if (res && res->status == 200) {
      try {
        json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("text").get<std::string>();
      } catch (const json::exception& e) {
        last_error = std::string("unparseable completion response: ") + e.what();
      }
    } else {
      last_error = res ? "HTTP status " + std::to_string(res->status)
                       : "connection error: " + httplib::to_string(res.error());
    }
    if (attempt < config_.max_retries) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
    }
  }
  throw TransportError("completion request failed after " +
                       std::to_string(config_.max_retries) + " attempts: " + last_error);
}

const char* rejection_kind_name(RejectionReason::Kind kind) {
  switch (kind) {
    case RejectionReason::Kind::ParseFailure: return "ParseFailure";
    case RejectionReason::Kind::MissingPos: return "MissingPos";
    case RejectionReason::Kind::NoDisfluency: return "NoDisfluency";
    case RejectionReason::Kind::DuplicateOfExample: return "DuplicateOfExample";
  }
  return "?";
}

std::string strip_candidate_decoration(const std::string& line) {
  std::string s = trim(line);
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) {
    s = trim(s.substr(i + 1));
  } else if (!s.empty() && (s[0] == '-' || s[0] == '*') &&
             (s.size() == 1 || s[1] == ' ')) {
    s = trim(s.substr(1));
  }
  return s;
}

std::variant<AnnotatedSentence, RejectionReason> validate_candidate(
    const std::string& raw_line, const std::vector<std::string>& example_renders) {
  std::string line = strip_candidate_decoration(raw_line);
  ParseError err(ParseErrorKind::EmptySentence, 0, "");
  std::optional<AnnotatedSentence> parsed = try_parse_annotated(line, err);
  if (!parsed) {
    return RejectionReason{RejectionReason::Kind::ParseFailure,
                           std::string(parse_error_kind_name(err.kind())) + ": " + err.what()};
  }
  if (!has_any_pos(*parsed)) {
    return RejectionReason{RejectionReason::Kind::MissingPos,
                           "one or more tokens lack a POS tag"};
  }
  if (!has_disfluency_markup(*parsed)) {
    return RejectionReason{RejectionReason::Kind::NoDisfluency,
                           "no edit or tagged chunk in the sentence"};
  }
  std::string render = render_annotated(*parsed);
  for (const std::string& ex : example_renders) {
    if (render == ex) {
      return RejectionReason{RejectionReason::Kind::DuplicateOfExample,
                             "candidate copies an example sentence"};
    }
  }
  return *parsed;
}

GenerationReport run_session(const PromptTemplates& templates,
                             const GenSessionConfig& config,
                             const std::vector<AnnotatedSentence>& seed_corpus,
                             LlmTransport& transport) {
  templates.validate();
  config.validate();
  if (seed_corpus.empty()) {
    throw SessionError(SessionErrorKind::EmptyInput, "seed corpus is empty");
  }

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < seed_corpus.size(); ++i) {
    if (config.example_type_filter) {
      bool match = false;
      for (const Edit* e : collect_outer_edits(seed_corpus[i])) {
        if (classify_edit(*e) == *config.example_type_filter) {
          match = true;
          break;
        }
      }
      if (!match) continue;
    }
    pool.push_back(i);
  }
  if (pool.size() < static_cast<std::size_t>(config.examples_per_prompt)) {
    throw SessionError(SessionErrorKind::InsufficientExamples,
                       "example pool has " + std::to_string(pool.size()) +
                       " sentences, need " + std::to_string(config.examples_per_prompt));
  }

  GenerationReport report;
  Rng rng(config.rng_seed);
  std::vector<std::string> shown_renders;
  std::vector<std::vector<std::string>> shown_multisets;
  bool description_pending = true;
  int rounds_since_description = 0;

  for (int round = 1; round <= config.total_rounds; ++round) {
    if (description_pending || rounds_since_description >= config.max_round) {
      TranscriptEntry entry;
      entry.kind = TranscriptEntry::Kind::Description;
      entry.round = round;
      entry.prompt = templates.description;
      entry.model = transport.model_name();
      entry.temperature = config.sampling.temperature;
      try {
        entry.completion = transport.complete(templates.description, report.transcript,
                                              config.sampling);
      } catch (const TransportError&) {
        ++report.failed_rounds;
        continue;   // description still pending; retried next round
      }
      report.transcript.push_back(std::move(entry));
      description_pending = false;
      rounds_since_description = 0;
    }

    // Examples sampled without replacement within the round.
    std::vector<std::size_t> indices = pool;
    std::vector<std::string> examples;
    for (int k = 0; k < config.examples_per_prompt; ++k) {
      std::size_t j = k + rng.below(indices.size() - k);
      std::swap(indices[k], indices[j]);
      examples.push_back(render_annotated(seed_corpus[indices[k]]));
    }
    std::string prompt = templates.render_generation(examples);

    TranscriptEntry entry;
    entry.kind = TranscriptEntry::Kind::Generation;
    entry.round = round;
    entry.prompt = prompt;
    entry.model = transport.model_name();
    entry.temperature = config.sampling.temperature;
    std::string completion;
    try {
      completion = transport.complete(prompt, report.transcript, config.sampling);
    } catch (const TransportError&) {
      ++report.failed_rounds;
      continue;
    }
    entry.completion = completion;
    report.transcript.push_back(std::move(entry));
    ++report.rounds_executed;
    ++rounds_since_description;

    for (const std::string& ex : examples) {
      shown_renders.push_back(ex);
      shown_multisets.push_back(sorted_surfaces(parse_annotated(ex)));
    }

    for (const std::string& raw : split_lines(completion)) {
      if (trim(strip_candidate_decoration(raw)).empty()) continue;
      auto verdict = validate_candidate(raw, shown_renders);
      if (std::holds_alternative<RejectionReason>(verdict)) {
        report.rejected.emplace_back(raw, std::get<RejectionReason>(verdict));
        continue;
      }
      AnnotatedSentence s = std::get<AnnotatedSentence>(std::move(verdict));
      std::vector<std::string> multiset = sorted_surfaces(s);
      bool near = std::find(shown_multisets.begin(), shown_multisets.end(), multiset) !=
                  shown_multisets.end();
      for (const Edit* e : collect_outer_edits(s)) {
        ++report.type_counts[classify_edit(*e)];
      }
      report.accepted.push_back(std::move(s));
      report.near_duplicate.push_back(near);
    }
  }

  if (report.rounds_executed == 0) {
    throw SessionError(SessionErrorKind::AllRoundsFailed,
                       "no generation round completed successfully");
  }
  return report;
}

void write_generation_report(const std::string& path, const GenerationReport& report,
                             const GenSessionConfig& config) {
  json rec;
  rec["accepted_count"] = report.accepted.size();
  rec["rejected_count"] = report.rejected.size();
  rec["rounds_executed"] = report.rounds_executed;
  rec["failed_rounds"] = report.failed_rounds;
  json types;
  for (const auto& [type, count] : report.type_counts) {
    types[disfluency_type_name(type)] = count;
  }
  rec["type_counts"] = std::move(types);
  json accepted = json::array();
  for (std::size_t i = 0; i < report.accepted.size(); ++i) {
    json item;
    item["raw"] = render_annotated(report.accepted[i]);
    item["near_duplicate"] = static_cast<bool>(report.near_duplicate[i]);
    accepted.push_back(std::move(item));
  }
  rec["accepted"] = std::move(accepted);
  json rejected = json::array();
  for (const auto& [line, reason] : report.rejected) {
    json item;
    item["line"] = line;
    item["reason"] = rejection_kind_name(reason.kind);
    item["detail"] = reason.detail;
    rejected.push_back(std::move(item));
  }
  rec["rejected"] = std::move(rejected);
  json cfg;
  cfg["max_round"] = config.max_round;
  cfg["total_rounds"] = config.total_rounds;
  cfg["examples_per_prompt"] = config.examples_per_prompt;
  cfg["temperature"] = config.sampling.temperature;
  cfg["max_tokens"] = config.sampling.max_tokens;
  cfg["rng_seed"] = config.rng_seed;
  if (config.example_type_filter) {
    cfg["example_type_filter"] = disfluency_type_name(*config.example_type_filter);
  }
  rec["config"] = std::move(cfg);

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << rec.dump(2) << '\n';
}

TypeHistogram type_histogram(const std::vector<AnnotatedSentence>& sentences) {
  if (sentences.empty()) {
    throw SessionError(SessionErrorKind::EmptyInput, "no sentences to classify");
  }
  TypeHistogram h;
  for (const AnnotatedSentence& s : sentences) {
    for (const Edit* e : collect_outer_edits(s)) {
      switch (classify_edit(*e)) {
        case DisfluencyType::Repetition: ++h.repetition; break;
        case DisfluencyType::Substitution: ++h.substitution; break;
        case DisfluencyType::Deletion: ++h.deletion; break;
      }
      ++h.edits;
    }
  }
  if (h.edits > 0) {
    auto pct = [&](int count) {
      return std::round(10000.0 * count / h.edits) / 100.0;
    };
    h.repetition_pct = pct(h.repetition);
    h.substitution_pct = pct(h.substitution);
    h.deletion_pct = pct(h.deletion);
  }
  return h;
}

}  // namespace disfl
