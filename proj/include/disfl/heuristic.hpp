// heuristic.hpp
// Baseline disfluent-sentence generators: repeating, inserting and deleting
// n-grams over fluent source sentences.  Every operation leaves the fluent
// projection recoverable, so strip_to_fluent(output) == source tokens and
// the I/O labels are exact by construction.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

enum class HeuristicErrorKind { OutOfRange, EmptyDonor, WholeSentence, EmptyCorpus };

class HeuristicError : public std::runtime_error {
 public:
  HeuristicError(HeuristicErrorKind kind, const std::string& detail);
  HeuristicErrorKind kind() const { return kind_; }

 private:
  HeuristicErrorKind kind_;
};

struct HeuristicConfig {
  std::uint64_t rng_seed = 0;
  int max_ngram = 3;
  double repeat_weight = 1.0;
  double insert_weight = 1.0;
  double delete_weight = 1.0;
  int edits_per_sentence = 1;

  // Throws std::invalid_argument on a bad configuration.
  void validate() const;
};

// The n-gram at [position, position+n) becomes an edit whose reparandum and
// repair are both that n-gram.
AnnotatedSentence repeat_ngram(const std::vector<Token>& tokens,
                               std::size_t position, std::size_t n);

// The donor n-gram becomes a reparandum with an empty repair, spliced in
// before `position` (position == tokens.size() appends).
AnnotatedSentence insert_ngram(const std::vector<Token>& tokens,
                               std::size_t position,
                               const std::vector<Token>& donor);

// Restart: the first n tokens of the phrase starting at `position` are
// copied into a reparandum with an empty repair, placed before the phrase.
// Requires n < tokens.size().
AnnotatedSentence delete_ngram_variant(const std::vector<Token>& tokens,
                                       std::size_t position, std::size_t n);

// One disfluent sentence per corpus sentence, each with exactly
// edits_per_sentence outer edits.  Per-sentence RNG state is seeded with
// rng_seed XOR the sentence index, so output is order-independent and
// reproducible.  Source tokens come from each sentence's fluent projection.
std::vector<AnnotatedSentence> generate_batch(
    const std::vector<AnnotatedSentence>& corpus, const HeuristicConfig& config);

// Fluent corpus input: plain annotation-format lines (usually fluent-only;
// annotated lines are reduced to their fluent projection by generate_batch).
std::vector<AnnotatedSentence> read_fluent_corpus(const std::string& path);

}  // namespace disfl
