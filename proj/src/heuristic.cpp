#include "disfl/heuristic.hpp"

#include <algorithm>

#include "disfl/jsonl.hpp"
#include "disfl/rng.hpp"

namespace disfl {

namespace {

enum class Op { Repeat, Insert, Delete };

Op pick_op(const HeuristicConfig& cfg, Rng& rng) {
  double total = cfg.repeat_weight + cfg.insert_weight + cfg.delete_weight;
  double r = rng.unit() * total;
  if (r < cfg.repeat_weight) return Op::Repeat;
  if (r < cfg.repeat_weight + cfg.insert_weight) return Op::Insert;
  return Op::Delete;
}

bool has_content(const std::vector<Token>& tokens, std::size_t begin, std::size_t n) {
  for (std::size_t i = begin; i < begin + n; ++i) {
    if (!is_punct_token(tokens[i])) return true;
  }
  return false;
}

Chunk make_fluent(std::vector<Token> tokens) {
  return Chunk{Fluent{std::move(tokens)}};
}

std::vector<Token> slice(const std::vector<Token>& tokens, std::size_t begin, std::size_t n) {
  return std::vector<Token>(tokens.begin() + begin, tokens.begin() + begin + n);
}

// One planned edit, realized left to right.  `consumed` > 0 only for repeats,
// where the source n-gram itself moves into the edit.
struct PlannedEdit {
  std::size_t position;
  std::size_t consumed;
  Edit edit;
  std::size_t order;   // draw order, to keep same-position edits stable
};

Edit repeat_edit(const std::vector<Token>& tokens, std::size_t position, std::size_t n) {
  Edit e;
  e.reparandum.push_back(make_fluent(slice(tokens, position, n)));
  e.repair.push_back(make_fluent(slice(tokens, position, n)));
  return e;
}

Edit deletion_edit(std::vector<Token> reparandum) {
  Edit e;
  e.reparandum.push_back(make_fluent(std::move(reparandum)));
  return e;
}

AnnotatedSentence realize(const std::vector<Token>& tokens,
                          std::vector<PlannedEdit> edits, bool terminated) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const PlannedEdit& a, const PlannedEdit& b) {
                     if (a.position != b.position) return a.position < b.position;
                     return a.order < b.order;
                   });
  AnnotatedSentence out;
  out.terminated = terminated;
  std::size_t cursor = 0;
  std::vector<Token> run;
  auto flush = [&]() {
    if (!run.empty()) {
      out.chunks.push_back(make_fluent(std::move(run)));
      run.clear();
    }
  };
  for (PlannedEdit& pe : edits) {
    while (cursor < pe.position) {
      run.push_back(tokens[cursor++]);
    }
    flush();
    out.chunks.push_back(Chunk{std::move(pe.edit)});
    cursor += pe.consumed;
  }
  while (cursor < tokens.size()) {
    run.push_back(tokens[cursor++]);
  }
  flush();
  return out;
}

// Positions a repeat may start at: the window must not overlap a range an
// earlier repeat consumed, and must contain at least one non-punctuation
// token so the edit classifies as a repetition.
std::vector<std::size_t> repeat_anchors(const std::vector<Token>& tokens, std::size_t n,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& taken) {
  std::vector<std::size_t> anchors;
  for (std::size_t p = 0; p + n <= tokens.size(); ++p) {
    bool clash = false;
    for (auto [b, e] : taken) {
      if (p < e && b < p + n) { clash = true; break; }
    }
    if (!clash && has_content(tokens, p, n)) anchors.push_back(p);
  }
  return anchors;
}

// Splice points for inserts/restarts: anywhere in [0, size] that does not
// fall strictly inside a consumed range.
std::vector<std::size_t> splice_anchors(std::size_t size,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& taken,
                                        std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> anchors;
  for (std::size_t p = lo; p <= hi && p <= size; ++p) {
    bool inside = false;
    for (auto [b, e] : taken) {
      if (p > b && p < e) { inside = true; break; }
    }
    if (!inside) anchors.push_back(p);
  }
  return anchors;
}

std::vector<Token> draw_donor(const std::vector<std::vector<Token>>& sources,
                              const HeuristicConfig& cfg, Rng& rng) {
  // Donor must contain a non-punctuation token; scan from a random start so
  // the draw stays deterministic without rejection loops.
  std::size_t start = rng.below(sources.size());
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const std::vector<Token>& donor_src = sources[(start + k) % sources.size()];
    if (donor_src.empty()) continue;
    std::size_t n = rng.in_range(1, std::min<std::size_t>(cfg.max_ngram, donor_src.size()));
    std::vector<std::size_t> starts;
    for (std::size_t p = 0; p + n <= donor_src.size(); ++p) {
      if (has_content(donor_src, p, n)) starts.push_back(p);
    }
    if (starts.empty()) continue;
    std::size_t p = starts[rng.below(starts.size())];
    return slice(donor_src, p, n);
  }
  throw HeuristicError(HeuristicErrorKind::EmptyCorpus,
                       "no donor n-gram with word content in the corpus");
}

AnnotatedSentence generate_one(const std::vector<Token>& tokens, bool terminated,
                               const std::vector<std::vector<Token>>& sources,
                               const HeuristicConfig& cfg, Rng& rng) {
  std::vector<PlannedEdit> planned;
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (int k = 0; k < cfg.edits_per_sentence; ++k) {
    Op op = pick_op(cfg, rng);
    if (op == Op::Repeat) {
      std::size_t n = rng.in_range(1, std::min<std::size_t>(cfg.max_ngram, tokens.size()));
      std::vector<std::size_t> anchors;
      while (n >= 1 && (anchors = repeat_anchors(tokens, n, taken)).empty()) {
        --n;   // shrink until a window fits among earlier edits
      }
      if (!anchors.empty()) {
        std::size_t p = anchors[rng.below(anchors.size())];
        planned.push_back({p, n, repeat_edit(tokens, p, n), planned.size()});
        taken.emplace_back(p, p + n);
        continue;
      }
      op = Op::Insert;   // sentence is all punctuation or fully consumed
    }
    if (op == Op::Delete) {
      if (tokens.size() >= 2) {
        std::size_t n = rng.in_range(1, std::min<std::size_t>(cfg.max_ngram, tokens.size() - 1));
        std::vector<std::size_t> anchors = splice_anchors(tokens.size(), taken, 0, tokens.size() - n);
        if (!anchors.empty()) {
          std::size_t p = anchors[rng.below(anchors.size())];
          planned.push_back({p, 0, deletion_edit(slice(tokens, p, n)), planned.size()});
          continue;
        }
      }
      op = Op::Insert;
    }
    std::vector<Token> donor = draw_donor(sources, cfg, rng);
    std::vector<std::size_t> anchors = splice_anchors(tokens.size(), taken, 0, tokens.size());
    std::size_t p = anchors[rng.below(anchors.size())];
    Edit e;
    e.reparandum.push_back(make_fluent(std::move(donor)));
    planned.push_back({p, 0, std::move(e), planned.size()});
  }
  return realize(tokens, std::move(planned), terminated);
}

}  // namespace

HeuristicError::HeuristicError(HeuristicErrorKind kind, const std::string& detail)
    : std::runtime_error(detail), kind_(kind) {}

void HeuristicConfig::validate() const {
  if (max_ngram < 1) {
    throw std::invalid_argument("max_ngram must be at least 1");
  }
  if (edits_per_sentence < 1) {
    throw std::invalid_argument("edits_per_sentence must be at least 1");
  }
  if (repeat_weight < 0 || insert_weight < 0 || delete_weight < 0) {
    throw std::invalid_argument("operation weights must be non-negative");
  }
  if (repeat_weight + insert_weight + delete_weight <= 0) {
    throw std::invalid_argument("operation weights must not all be zero");
  }
}

AnnotatedSentence repeat_ngram(const std::vector<Token>& tokens,
                               std::size_t position, std::size_t n) {
  if (n < 1 || position + n > tokens.size()) {
    throw HeuristicError(HeuristicErrorKind::OutOfRange,
                         "n-gram [" + std::to_string(position) + ", " +
                         std::to_string(position + n) + ") out of range");
  }
  std::vector<PlannedEdit> planned;
  planned.push_back({position, n, repeat_edit(tokens, position, n), 0});
  return realize(tokens, std::move(planned), false);
}

AnnotatedSentence insert_ngram(const std::vector<Token>& tokens,
                               std::size_t position,
                               const std::vector<Token>& donor) {
  if (donor.empty()) {
    throw HeuristicError(HeuristicErrorKind::EmptyDonor, "donor n-gram is empty");
  }
  if (position > tokens.size()) {
    throw HeuristicError(HeuristicErrorKind::OutOfRange,
                         "insert position " + std::to_string(position) + " out of range");
  }
  std::vector<PlannedEdit> planned;
  planned.push_back({position, 0, deletion_edit(donor), 0});
  return realize(tokens, std::move(planned), false);
}

AnnotatedSentence delete_ngram_variant(const std::vector<Token>& tokens,
                                       std::size_t position, std::size_t n) {
  if (n >= tokens.size()) {
    throw HeuristicError(HeuristicErrorKind::WholeSentence,
                         "restart would cover the whole sentence");
  }
  if (n < 1 || position + n > tokens.size()) {
    throw HeuristicError(HeuristicErrorKind::OutOfRange,
                         "n-gram [" + std::to_string(position) + ", " +
                         std::to_string(position + n) + ") out of range");
  }
  std::vector<PlannedEdit> planned;
  planned.push_back({position, 0, deletion_edit(slice(tokens, position, n)), 0});
  return realize(tokens, std::move(planned), false);
}

std::vector<AnnotatedSentence> generate_batch(
    const std::vector<AnnotatedSentence>& corpus, const HeuristicConfig& config) {
  config.validate();
  if (corpus.empty()) {
    throw HeuristicError(HeuristicErrorKind::EmptyCorpus, "source corpus is empty");
  }
  std::vector<std::vector<Token>> sources;
  sources.reserve(corpus.size());
  for (const AnnotatedSentence& s : corpus) {
    sources.push_back(strip_to_fluent(s));
  }
  std::vector<AnnotatedSentence> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (sources[i].empty()) continue;   // nothing fluent to disfluate
    Rng rng(config.rng_seed ^ static_cast<std::uint64_t>(i));
    out.push_back(generate_one(sources[i], corpus[i].terminated, sources, config, rng));
  }
  if (out.empty()) {
    throw HeuristicError(HeuristicErrorKind::EmptyCorpus,
                         "no sentence in the corpus has fluent content");
  }
  return out;
}

std::vector<AnnotatedSentence> read_fluent_corpus(const std::string& path) {
  return read_annotated_lines(path);
}

}  // namespace disfl
