// jsonl.hpp
// JSONL interchange for annotated corpora.  One object per line:
//   raw     annotation line (canonical rendering)
//   tokens  [{"surface": ..., "pos": ...}, ...]   pos omitted when absent
//   labels  ["I", "O", ...]
//   types   disfluency type per outer edit, in surface order
// `raw` is authoritative; tokens/labels/types are its projections and are
// verified on read.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

class MalformedRecord : public std::runtime_error {
 public:
  MalformedRecord(std::size_t line, const std::string& detail);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string to_jsonl_record(const AnnotatedSentence& s);
AnnotatedSentence from_jsonl_record(const std::string& record, std::size_t line = 0);

std::vector<AnnotatedSentence> read_jsonl(std::istream& in);
std::vector<AnnotatedSentence> read_jsonl(const std::string& path);

void write_jsonl(std::ostream& out, const std::vector<AnnotatedSentence>& corpus);
void write_jsonl(const std::string& path, const std::vector<AnnotatedSentence>& corpus);

// Annotation-format text corpora: one sentence per line, blank lines skipped.
// Parse failures are reported with the line number prepended.
std::vector<AnnotatedSentence> read_annotated_lines(std::istream& in);
std::vector<AnnotatedSentence> read_annotated_lines(const std::string& path);
void write_annotated_lines(const std::string& path,
                           const std::vector<AnnotatedSentence>& corpus);

}  // namespace disfl
