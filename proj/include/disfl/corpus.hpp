// corpus.hpp
// Switchboard-style disfluency annotation: domain types, parser, renderer,
// label projection, disfluency typing.
//
// Text format (one sentence per line, UTF-8):
//
//   sentence   := chunk+ ("E_S")?
//   chunk      := edit | tagged | token
//   edit       := "[" chunk+ "+" chunk* "]"
//   tagged     := "{" CAT? token+ "}"       CAT in {F,E,D,C,A}; missing CAT = F
//   token      := SURFACE ("/" POS)?        POS split on the last "/"
//
// Structural symbols [ ] { } + self-delimit even when written without
// surrounding spaces ("{F um ,}" lexes the same as "{F um , }").  The
// category letter may be attached to the brace ("{F") or stand alone
// ("{ F um }").  "E_S" terminates a sentence and is never a token.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace disfl {

// A surface word plus optional part-of-speech tag.  Surfaces contain no
// whitespace and none of the structural characters.
struct Token {
  std::string surface;
  std::optional<std::string> pos;

  bool operator==(const Token&) const = default;
};

// The five interregnum categories: filled pause, explicit editing term,
// discourse marker, coordinating conjunction, aside.
enum class InterregnumCategory : std::uint8_t { F, E, D, C, A };

char category_letter(InterregnumCategory cat);
std::optional<InterregnumCategory> category_from_letter(char c);

struct Chunk;

// A run of plain words.
struct Fluent {
  std::vector<Token> tokens;
  bool operator==(const Fluent&) const = default;
};

// A brace-delimited filler span, e.g. "{F um , }".
struct Tagged {
  InterregnumCategory category = InterregnumCategory::F;
  std::vector<Token> tokens;
  bool operator==(const Tagged&) const = default;
};

// A bracket-delimited edit region: reparandum "+" interregnum repair.
// The reparandum is never empty; the repair may be (restart/deletion) and
// the interregnum may be.  Edits nest inside reparandum and repair lists;
// the interregnum holds Tagged chunks only.
struct Edit {
  std::vector<Chunk> reparandum;
  std::vector<Chunk> interregnum;
  std::vector<Chunk> repair;
  bool operator==(const Edit&) const = default;
};

struct Chunk {
  std::variant<Fluent, Tagged, Edit> node;

  bool operator==(const Chunk&) const = default;

  bool is_fluent() const { return std::holds_alternative<Fluent>(node); }
  bool is_tagged() const { return std::holds_alternative<Tagged>(node); }
  bool is_edit() const { return std::holds_alternative<Edit>(node); }
  const Fluent& fluent() const { return std::get<Fluent>(node); }
  const Tagged& tagged() const { return std::get<Tagged>(node); }
  const Edit& edit() const { return std::get<Edit>(node); }
};

struct AnnotatedSentence {
  std::vector<Chunk> chunks;
  bool terminated = false;   // trailing E_S marker present

  bool operator==(const AnnotatedSentence&) const = default;
};

enum class Label : std::uint8_t { O = 0, I = 1 };

// Flat projection: tokens in surface order with I/O labels, I marking
// tokens inside a reparandum region at any nesting depth.
struct LabeledSentence {
  std::vector<Token> tokens;
  std::vector<Label> labels;

  bool operator==(const LabeledSentence&) const = default;
};

enum class DisfluencyType : std::uint8_t { Repetition, Substitution, Deletion };

const char* disfluency_type_name(DisfluencyType t);
std::optional<DisfluencyType> disfluency_type_from_name(const std::string& name);

enum class ParseErrorKind {
  UnbalancedBracket,
  UnknownInterregnumCategory,
  MissingPlusInEdit,
  EmptyReparandum,
  StrayPlus,
  EmptyTagged,
  EmptySentence,
  BadToken,
  UnexpectedToken,
};

const char* parse_error_kind_name(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t column, const std::string& detail);

  ParseErrorKind kind() const { return kind_; }
  std::size_t column() const { return column_; }   // 1-based byte offset

 private:
  ParseErrorKind kind_;
  std::size_t column_;
};

// Parses one annotation line.  Throws ParseError with the offending column.
AnnotatedSentence parse_annotated(const std::string& text);

// Non-throwing variant; returns std::nullopt and fills `error` on failure.
std::optional<AnnotatedSentence> try_parse_annotated(const std::string& text,
                                                     ParseError& error);

// Canonical rendering: single-space separated lexemes, category attached to
// the opening brace, trailing E_S iff terminated.  parse(render(s)) == s for
// every sentence whose chunk lists have no two adjacent Fluent chunks.
std::string render_annotated(const AnnotatedSentence& s);
std::string render_token(const Token& t);

// I/O projection per the labeling rule above.  E_S never appears.
LabeledSentence to_labeled(const AnnotatedSentence& s);

// Fluent reading: every reparandum and every tagged filler span dropped,
// repairs kept, order preserved.
std::vector<Token> strip_to_fluent(const AnnotatedSentence& s);

// All tokens in surface order, including reparanda and fillers.
std::vector<Token> flatten_tokens(const AnnotatedSentence& s);

// Deletion if the repair is empty once punctuation-only tokens are dropped;
// Repetition if the punctuation-stripped, case-folded reparandum surface
// sequence equals the repair's; Substitution otherwise.
DisfluencyType classify_edit(const Edit& e);

// Edit chunks not nested inside another edit, in surface order.
std::vector<const Edit*> collect_outer_edits(const AnnotatedSentence& s);

// True for tokens whose surface has no alphanumeric character (",", ".").
bool is_punct_token(const Token& t);

// First violated invariant, if any: non-empty chunk lists, non-empty
// Fluent/Tagged spans, non-empty reparanda, Tagged-only interregna, and
// well-formed token text.  Parser output always passes; programmatically
// built trees may not.
std::optional<std::string> check_invariants(const AnnotatedSentence& s);

}  // namespace disfl
