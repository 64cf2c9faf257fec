#include "disfl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace disfl {

namespace {

bool is_structural(char c) {
  return c == '[' || c == ']' || c == '{' || c == '}' || c == '+';
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Lexeme {
  enum class Kind { OpenEdit, CloseEdit, Plus, OpenTagged, CloseTagged, Word, EndMarker };
  Kind kind;
  std::string text;   // Word: raw token text; OpenTagged: category letter or ""
  std::size_t column; // 1-based byte offset into the input line
};

std::vector<Lexeme> lex(const std::string& text) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t col = i + 1;
    if (c == '[') {
      out.push_back({Lexeme::Kind::OpenEdit, "[", col});
      ++i;
    } else if (c == ']') {
      out.push_back({Lexeme::Kind::CloseEdit, "]", col});
      ++i;
    } else if (c == '+') {
      out.push_back({Lexeme::Kind::Plus, "+", col});
      ++i;
    } else if (c == '}') {
      out.push_back({Lexeme::Kind::CloseTagged, "}", col});
      ++i;
    } else if (c == '{') {
      // Attached category letter ("{F") only when the letter ends the field.
      if (i + 1 < n && std::isalpha(static_cast<unsigned char>(text[i + 1])) &&
          (i + 2 >= n || std::isspace(static_cast<unsigned char>(text[i + 2])) ||
           is_structural(text[i + 2]))) {
        out.push_back({Lexeme::Kind::OpenTagged, std::string(1, text[i + 1]), col});
        i += 2;
      } else {
        out.push_back({Lexeme::Kind::OpenTagged, "", col});
        ++i;
      }
    } else {
      std::size_t start = i;
      while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) &&
             !is_structural(text[i])) {
        ++i;
      }
      std::string word = text.substr(start, i - start);
      if (word == "E_S") {
        out.push_back({Lexeme::Kind::EndMarker, word, col});
      } else {
        out.push_back({Lexeme::Kind::Word, word, col});
      }
    }
  }
  return out;
}

Token make_token(const Lexeme& lx) {
  const std::string& w = lx.text;
  auto slash = w.rfind('/');
  if (slash == std::string::npos) {
    return Token{w, std::nullopt};
  }
  std::string surface = w.substr(0, slash);
  std::string pos = w.substr(slash + 1);
  if (surface.empty()) {
    throw ParseError(ParseErrorKind::BadToken, lx.column,
                     "token '" + w + "' has an empty surface");
  }
  if (pos.empty()) {
    throw ParseError(ParseErrorKind::BadToken, lx.column,
                     "token '" + w + "' has an empty POS tag");
  }
  return Token{surface, pos};
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lexemes_(lex(text)) {}

  AnnotatedSentence parse() {
    if (lexemes_.empty()) {
      throw ParseError(ParseErrorKind::EmptySentence, 1, "no tokens in sentence");
    }
    AnnotatedSentence s;
    s.chunks = parse_chunks(/*inside_edit=*/false);
    if (!at_end() && peek().kind == Lexeme::Kind::EndMarker) {
      consume();
      s.terminated = true;
    }
    if (!at_end()) {
      const Lexeme& lx = peek();
      switch (lx.kind) {
        case Lexeme::Kind::CloseEdit:
        case Lexeme::Kind::CloseTagged:
          throw ParseError(ParseErrorKind::UnbalancedBracket, lx.column,
                           "'" + lx.text + "' without a matching opener");
        case Lexeme::Kind::Plus:
          throw ParseError(ParseErrorKind::StrayPlus, lx.column,
                           "'+' outside an edit region");
        case Lexeme::Kind::EndMarker:
          throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                           "E_S before the end of the sentence");
        default:
          throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                           "unexpected '" + lx.text + "'");
      }
    }
    if (s.chunks.empty()) {
      throw ParseError(ParseErrorKind::EmptySentence, 1,
                       "sentence has a terminator but no tokens");
    }
    return s;
  }

 private:
  bool at_end() const { return pos_ >= lexemes_.size(); }
  const Lexeme& peek() const { return lexemes_[pos_]; }
  const Lexeme& consume() { return lexemes_[pos_++]; }

  // Parses chunks up to (not consuming) the enclosing region's delimiter.
  // Consecutive plain tokens are collected into one Fluent chunk.
  std::vector<Chunk> parse_chunks(bool inside_edit) {
    std::vector<Chunk> chunks;
    std::vector<Token> run;
    auto flush = [&]() {
      if (!run.empty()) {
        chunks.push_back(Chunk{Fluent{std::move(run)}});
        run.clear();
      }
    };
    while (!at_end()) {
      const Lexeme& lx = peek();
      switch (lx.kind) {
        case Lexeme::Kind::Word:
          run.push_back(make_token(lx));
          consume();
          break;
        case Lexeme::Kind::OpenEdit:
          flush();
          chunks.push_back(Chunk{parse_edit()});
          break;
        case Lexeme::Kind::OpenTagged:
          flush();
          chunks.push_back(Chunk{parse_tagged()});
          break;
        case Lexeme::Kind::Plus:
          if (inside_edit) {
            flush();
            return chunks;   // caller handles the separator
          }
          throw ParseError(ParseErrorKind::StrayPlus, lx.column,
                           "'+' outside an edit region");
        case Lexeme::Kind::CloseEdit:
          if (inside_edit) {
            flush();
            return chunks;
          }
          throw ParseError(ParseErrorKind::UnbalancedBracket, lx.column,
                           "']' without a matching '['");
        case Lexeme::Kind::CloseTagged:
          throw ParseError(ParseErrorKind::UnbalancedBracket, lx.column,
                           "'}' without a matching '{'");
        case Lexeme::Kind::EndMarker:
          if (inside_edit) {
            throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                             "E_S inside an edit region");
          }
          flush();
          return chunks;
      }
    }
    flush();
    return chunks;
  }

  Edit parse_edit() {
    const Lexeme& open = consume();   // '['
    Edit edit;
    edit.reparandum = parse_chunks(/*inside_edit=*/true);
    if (at_end()) {
      throw ParseError(ParseErrorKind::UnbalancedBracket, open.column,
                       "'[' without a matching ']'");
    }
    if (peek().kind == Lexeme::Kind::CloseEdit) {
      throw ParseError(ParseErrorKind::MissingPlusInEdit, open.column,
                       "edit region has no '+' separator");
    }
    // parse_chunks only stops on Plus or CloseEdit when inside an edit
    const Lexeme& plus = consume();
    if (edit.reparandum.empty()) {
      throw ParseError(ParseErrorKind::EmptyReparandum, plus.column,
                       "edit region has an empty reparandum");
    }
    std::vector<Chunk> after = parse_chunks(/*inside_edit=*/true);
    if (at_end()) {
      throw ParseError(ParseErrorKind::UnbalancedBracket, open.column,
                       "'[' without a matching ']'");
    }
    if (peek().kind == Lexeme::Kind::Plus) {
      throw ParseError(ParseErrorKind::StrayPlus, peek().column,
                       "second '+' inside one edit region");
    }
    consume();   // ']'
    // Leading Tagged chunks after the '+' form the interregnum.
    std::size_t i = 0;
    while (i < after.size() && after[i].is_tagged()) {
      edit.interregnum.push_back(std::move(after[i]));
      ++i;
    }
    for (; i < after.size(); ++i) {
      edit.repair.push_back(std::move(after[i]));
    }
    return edit;
  }

  Tagged parse_tagged() {
    const Lexeme& open = consume();   // '{' or '{X'
    Tagged tagged;
    if (!open.text.empty()) {
      auto cat = category_from_letter(open.text[0]);
      if (!cat) {
        throw ParseError(ParseErrorKind::UnknownInterregnumCategory, open.column,
                         "unknown interregnum category '" + open.text + "'");
      }
      tagged.category = *cat;
    } else if (!at_end() && peek().kind == Lexeme::Kind::Word &&
               peek().text.size() == 1 && category_from_letter(peek().text[0])) {
      // "{ F um }" spells the category as a standalone letter.
      tagged.category = *category_from_letter(consume().text[0]);
    }
    while (!at_end()) {
      const Lexeme& lx = peek();
      switch (lx.kind) {
        case Lexeme::Kind::Word:
          tagged.tokens.push_back(make_token(lx));
          consume();
          break;
        case Lexeme::Kind::CloseTagged:
          consume();
          if (tagged.tokens.empty()) {
            throw ParseError(ParseErrorKind::EmptyTagged, open.column,
                             "tagged span has no tokens");
          }
          return tagged;
        case Lexeme::Kind::Plus:
          throw ParseError(ParseErrorKind::StrayPlus, lx.column,
                           "'+' inside a tagged span");
        case Lexeme::Kind::OpenEdit:
          throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                           "edit region inside a tagged span");
        case Lexeme::Kind::OpenTagged:
          throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                           "nested tagged span");
        case Lexeme::Kind::CloseEdit:
          throw ParseError(ParseErrorKind::UnbalancedBracket, lx.column,
                           "']' inside a tagged span");
        case Lexeme::Kind::EndMarker:
          throw ParseError(ParseErrorKind::UnexpectedToken, lx.column,
                           "E_S inside a tagged span");
      }
    }
    throw ParseError(ParseErrorKind::UnbalancedBracket, open.column,
                     "'{' without a matching '}'");
  }

  std::vector<Lexeme> lexemes_;
  std::size_t pos_ = 0;
};

void render_chunks(const std::vector<Chunk>& chunks, std::vector<std::string>& out);

void render_chunk(const Chunk& chunk, std::vector<std::string>& out) {
  if (chunk.is_fluent()) {
    for (const Token& t : chunk.fluent().tokens) {
      out.push_back(render_token(t));
    }
  } else if (chunk.is_tagged()) {
    const Tagged& tg = chunk.tagged();
    out.push_back(std::string("{") + category_letter(tg.category));
    for (const Token& t : tg.tokens) {
      out.push_back(render_token(t));
    }
    out.push_back("}");
  } else {
    const Edit& e = chunk.edit();
    out.push_back("[");
    render_chunks(e.reparandum, out);
    out.push_back("+");
    render_chunks(e.interregnum, out);
    render_chunks(e.repair, out);
    out.push_back("]");
  }
}

void render_chunks(const std::vector<Chunk>& chunks, std::vector<std::string>& out) {
  for (const Chunk& c : chunks) {
    render_chunk(c, out);
  }
}

void walk_labels(const std::vector<Chunk>& chunks, bool inside_reparandum,
                 LabeledSentence& out) {
  for (const Chunk& c : chunks) {
    if (c.is_fluent()) {
      for (const Token& t : c.fluent().tokens) {
        out.tokens.push_back(t);
        out.labels.push_back(inside_reparandum ? Label::I : Label::O);
      }
    } else if (c.is_tagged()) {
      for (const Token& t : c.tagged().tokens) {
        out.tokens.push_back(t);
        out.labels.push_back(inside_reparandum ? Label::I : Label::O);
      }
    } else {
      const Edit& e = c.edit();
      walk_labels(e.reparandum, true, out);
      walk_labels(e.interregnum, inside_reparandum, out);
      walk_labels(e.repair, inside_reparandum, out);
    }
  }
}

void walk_fluent(const std::vector<Chunk>& chunks, std::vector<Token>& out) {
  for (const Chunk& c : chunks) {
    if (c.is_fluent()) {
      out.insert(out.end(), c.fluent().tokens.begin(), c.fluent().tokens.end());
    } else if (c.is_edit()) {
      walk_fluent(c.edit().repair, out);
    }
    // Tagged spans are fillers; dropped from the fluent reading.
  }
}

void walk_surfaces(const std::vector<Chunk>& chunks, std::vector<std::string>& out) {
  for (const Chunk& c : chunks) {
    if (c.is_fluent()) {
      for (const Token& t : c.fluent().tokens) out.push_back(t.surface);
    } else if (c.is_tagged()) {
      for (const Token& t : c.tagged().tokens) out.push_back(t.surface);
    } else {
      const Edit& e = c.edit();
      walk_surfaces(e.reparandum, out);
      walk_surfaces(e.interregnum, out);
      walk_surfaces(e.repair, out);
    }
  }
}

std::vector<std::string> comparable_surfaces(const std::vector<Chunk>& chunks) {
  std::vector<std::string> raw;
  walk_surfaces(chunks, raw);
  std::vector<std::string> out;
  for (const std::string& s : raw) {
    if (is_punct_token(Token{s, std::nullopt})) continue;
    out.push_back(lowercase(s));
  }
  return out;
}

void collect_edits(const std::vector<Chunk>& chunks, std::vector<const Edit*>& out) {
  for (const Chunk& c : chunks) {
    if (c.is_edit()) {
      out.push_back(&c.edit());   // outer edit; nested ones belong to it
    }
  }
}

std::optional<std::string> check_token(const Token& t) {
  if (t.surface.empty()) return "empty token surface";
  for (char c : t.surface) {
    if (std::isspace(static_cast<unsigned char>(c)) || is_structural(c)) {
      return "token surface '" + t.surface + "' contains a structural or whitespace character";
    }
  }
  if (t.pos) {
    if (t.pos->empty()) return "empty POS tag on '" + t.surface + "'";
    for (char c : *t.pos) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        return "POS tag on '" + t.surface + "' contains whitespace";
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_chunks(const std::vector<Chunk>& chunks) {
  for (const Chunk& c : chunks) {
    if (c.is_fluent()) {
      if (c.fluent().tokens.empty()) return "empty fluent chunk";
      for (const Token& t : c.fluent().tokens) {
        if (auto err = check_token(t)) return err;
      }
    } else if (c.is_tagged()) {
      if (c.tagged().tokens.empty()) return "empty tagged chunk";
      for (const Token& t : c.tagged().tokens) {
        if (auto err = check_token(t)) return err;
      }
    } else {
      const Edit& e = c.edit();
      if (e.reparandum.empty()) return "edit with empty reparandum";
      for (const Chunk& ic : e.interregnum) {
        if (!ic.is_tagged()) return "interregnum contains a non-tagged chunk";
      }
      if (auto err = check_chunks(e.reparandum)) return err;
      if (auto err = check_chunks(e.interregnum)) return err;
      if (auto err = check_chunks(e.repair)) return err;
    }
  }
  return std::nullopt;
}

}  // namespace

char category_letter(InterregnumCategory cat) {
  switch (cat) {
    case InterregnumCategory::F: return 'F';
    case InterregnumCategory::E: return 'E';
    case InterregnumCategory::D: return 'D';
    case InterregnumCategory::C: return 'C';
    case InterregnumCategory::A: return 'A';
  }
  return '?';
}

std::optional<InterregnumCategory> category_from_letter(char c) {
  switch (c) {
    case 'F': return InterregnumCategory::F;
    case 'E': return InterregnumCategory::E;
    case 'D': return InterregnumCategory::D;
    case 'C': return InterregnumCategory::C;
    case 'A': return InterregnumCategory::A;
    default: return std::nullopt;
  }
}

const char* disfluency_type_name(DisfluencyType t) {
  switch (t) {
    case DisfluencyType::Repetition: return "repetition";
    case DisfluencyType::Substitution: return "substitution";
    case DisfluencyType::Deletion: return "deletion";
  }
  return "?";
}

std::optional<DisfluencyType> disfluency_type_from_name(const std::string& name) {
  if (name == "repetition") return DisfluencyType::Repetition;
  if (name == "substitution") return DisfluencyType::Substitution;
  if (name == "deletion") return DisfluencyType::Deletion;
  return std::nullopt;
}

const char* parse_error_kind_name(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::UnbalancedBracket: return "UnbalancedBracket";
    case ParseErrorKind::UnknownInterregnumCategory: return "UnknownInterregnumCategory";
    case ParseErrorKind::MissingPlusInEdit: return "MissingPlusInEdit";
    case ParseErrorKind::EmptyReparandum: return "EmptyReparandum";
    case ParseErrorKind::StrayPlus: return "StrayPlus";
    case ParseErrorKind::EmptyTagged: return "EmptyTagged";
    case ParseErrorKind::EmptySentence: return "EmptySentence";
    case ParseErrorKind::BadToken: return "BadToken";
    case ParseErrorKind::UnexpectedToken: return "UnexpectedToken";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t column, const std::string& detail)
    : std::runtime_error(std::string(parse_error_kind_name(kind)) + " at column " +
                         std::to_string(column) + ": " + detail),
      kind_(kind),
      column_(column) {}

AnnotatedSentence parse_annotated(const std::string& text) {
  return Parser(text).parse();
}

std::optional<AnnotatedSentence> try_parse_annotated(const std::string& text,
                                                     ParseError& error) {
  try {
    return parse_annotated(text);
  } catch (const ParseError& e) {
    error = e;
    return std::nullopt;
  }
}

std::string render_token(const Token& t) {
  return t.pos ? t.surface + "/" + *t.pos : t.surface;
}

std::string render_annotated(const AnnotatedSentence& s) {
  std::vector<std::string> lexemes;
  render_chunks(s.chunks, lexemes);
  if (s.terminated) {
    lexemes.push_back("E_S");
  }
  std::string out;
  for (std::size_t i = 0; i < lexemes.size(); ++i) {
    if (i) out += ' ';
    out += lexemes[i];
  }
  return out;
}

LabeledSentence to_labeled(const AnnotatedSentence& s) {
  LabeledSentence out;
  walk_labels(s.chunks, false, out);
  return out;
}

std::vector<Token> strip_to_fluent(const AnnotatedSentence& s) {
  std::vector<Token> out;
  walk_fluent(s.chunks, out);
  return out;
}

std::vector<Token> flatten_tokens(const AnnotatedSentence& s) {
  return to_labeled(s).tokens;
}

bool is_punct_token(const Token& t) {
  for (char c : t.surface) {
    if (std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

DisfluencyType classify_edit(const Edit& e) {
  std::vector<std::string> repair = comparable_surfaces(e.repair);
  if (repair.empty()) return DisfluencyType::Deletion;
  std::vector<std::string> reparandum = comparable_surfaces(e.reparandum);
  if (reparandum == repair) return DisfluencyType::Repetition;
  return DisfluencyType::Substitution;
}

std::vector<const Edit*> collect_outer_edits(const AnnotatedSentence& s) {
  std::vector<const Edit*> out;
  collect_edits(s.chunks, out);
  return out;
}

std::optional<std::string> check_invariants(const AnnotatedSentence& s) {
  if (s.chunks.empty()) return "sentence has no chunks";
  if (auto err = check_chunks(s.chunks)) return err;
  if (flatten_tokens(s).empty()) return "sentence flattens to no tokens";
  return std::nullopt;
}

}  // namespace disfl
