#include "disfl/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace disfl {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path + " for reading");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  return out;
}

}  // namespace

MalformedRecord::MalformedRecord(std::size_t line, const std::string& detail)
    : std::runtime_error("malformed record at line " + std::to_string(line) + ": " + detail),
      line_(line) {}

std::string to_jsonl_record(const AnnotatedSentence& s) {
  json rec;
  rec["raw"] = render_annotated(s);
  json tokens = json::array();
  json labels = json::array();
  LabeledSentence labeled = to_labeled(s);
  for (std::size_t i = 0; i < labeled.tokens.size(); ++i) {
    json tok;
    tok["surface"] = labeled.tokens[i].surface;
    if (labeled.tokens[i].pos) {
      tok["pos"] = *labeled.tokens[i].pos;
    }
    tokens.push_back(std::move(tok));
    labels.push_back(labeled.labels[i] == Label::I ? "I" : "O");
  }
  rec["tokens"] = std::move(tokens);
  rec["labels"] = std::move(labels);
  json types = json::array();
  for (const Edit* e : collect_outer_edits(s)) {
    types.push_back(disfluency_type_name(classify_edit(*e)));
  }
  rec["types"] = std::move(types);
  return rec.dump();
}

AnnotatedSentence from_jsonl_record(const std::string& record, std::size_t line) {
  json rec;
  try {
    rec = json::parse(record);
  } catch (const json::exception& e) {
    throw MalformedRecord(line, e.what());
  }
  if (!rec.is_object()) {
    throw MalformedRecord(line, "record is not a JSON object");
  }
  for (const char* field : {"raw", "tokens", "labels", "types"}) {
    if (!rec.contains(field)) {
      throw MalformedRecord(line, std::string("missing `") + field + "` field");
    }
  }
  AnnotatedSentence s;
  try {
    s = parse_annotated(rec["raw"].get<std::string>());
  } catch (const ParseError& e) {
    throw MalformedRecord(line, std::string("raw does not parse: ") + e.what());
  } catch (const json::exception& e) {
    throw MalformedRecord(line, e.what());
  }
  // The projections must agree with the annotation.
  LabeledSentence labeled = to_labeled(s);
  const json& tokens = rec["tokens"];
  const json& labels = rec["labels"];
  if (!tokens.is_array() || tokens.size() != labeled.tokens.size()) {
    throw MalformedRecord(line, "tokens do not match the annotation");
  }
  if (!labels.is_array() || labels.size() != labeled.labels.size()) {
    throw MalformedRecord(line, "labels do not match the annotation");
  }
  for (std::size_t i = 0; i < labeled.tokens.size(); ++i) {
    const json& tok = tokens[i];
    if (!tok.is_object() || !tok.contains("surface") ||
        tok["surface"].get<std::string>() != labeled.tokens[i].surface) {
      throw MalformedRecord(line, "token " + std::to_string(i) + " does not match the annotation");
    }
    bool has_pos = tok.contains("pos") && !tok["pos"].is_null();
    if (has_pos != labeled.tokens[i].pos.has_value() ||
        (has_pos && tok["pos"].get<std::string>() != *labeled.tokens[i].pos)) {
      throw MalformedRecord(line, "token " + std::to_string(i) + " POS does not match the annotation");
    }
    std::string want = labeled.labels[i] == Label::I ? "I" : "O";
    if (!labels[i].is_string() || labels[i].get<std::string>() != want) {
      throw MalformedRecord(line, "label " + std::to_string(i) + " does not match the annotation");
    }
  }
  const json& types = rec["types"];
  std::vector<const Edit*> edits = collect_outer_edits(s);
  if (!types.is_array() || types.size() != edits.size()) {
    throw MalformedRecord(line, "types do not match the annotation");
  }
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (!types[i].is_string() ||
        types[i].get<std::string>() != disfluency_type_name(classify_edit(*edits[i]))) {
      throw MalformedRecord(line, "type " + std::to_string(i) + " does not match the annotation");
    }
  }
  return s;
}

std::vector<AnnotatedSentence> read_jsonl(std::istream& in) {
  std::vector<AnnotatedSentence> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    corpus.push_back(from_jsonl_record(line, lineno));
  }
  return corpus;
}

std::vector<AnnotatedSentence> read_jsonl(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_jsonl(in);
}

void write_jsonl(std::ostream& out, const std::vector<AnnotatedSentence>& corpus) {
  for (const AnnotatedSentence& s : corpus) {
    out << to_jsonl_record(s) << '\n';
  }
}

void write_jsonl(const std::string& path, const std::vector<AnnotatedSentence>& corpus) {
  std::ofstream out = open_output(path);
  write_jsonl(out, corpus);
}

std::vector<AnnotatedSentence> read_annotated_lines(std::istream& in) {
  std::vector<AnnotatedSentence> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    try {
      corpus.push_back(parse_annotated(line));
    } catch (const ParseError& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<AnnotatedSentence> read_annotated_lines(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_annotated_lines(in);
}

void write_annotated_lines(const std::string& path,
                           const std::vector<AnnotatedSentence>& corpus) {
  std::ofstream out = open_output(path);
  for (const AnnotatedSentence& s : corpus) {
    out << render_annotated(s) << '\n';
  }
}

}  // namespace disfl
