#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace tp {

// One bibliographic record.
struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  int year = 0;  // 0 = unknown
  std::set<std::string> pub_types;
  std::vector<std::string> mesh_terms;  // descriptor names, no duplicates

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::string source;
};

// A record that was rejected while the rest of the stream kept parsing.
// location is the 1-based line for line-delimited input and the byte offset
// of the citation end for XML.
struct RecordError {
  std::size_t location = 0;
  std::string message;
};

struct ParseResult {
  Corpus corpus;
  std::vector<RecordError> errors;
};

// Streams MedlineCitation elements out of a PubMed/MEDLINE XML stream. Each
// completed Document is handed to sink as soon as its closing tag is seen, so
// memory is bounded by the largest record. Throws ParseError (with byte
// offset) on malformed or truncated XML; records already delivered stay
// delivered.
void stream_pubmed_xml(std::istream& in, const std::function<void(Document&&)>& sink,
                       std::vector<RecordError>& errors);

// Whole-stream variant. Fails closed: a malformed stream yields no corpus.
// Duplicate PMIDs raise Error naming the id.
ParseResult parse_pubmed_xml(std::istream& in, std::string source = {});

// One JSON object per line:
//   {"id": "...", "title": "...", "abstract": "...", "year": 2001,
//    "pub_types": [...], "mesh": [...]}
// id and title are required. Blank lines are ignored.
void stream_records(std::istream& in, const std::function<void(Document&&)>& sink,
                    std::vector<RecordError>& errors);

ParseResult parse_records(std::istream& in, std::string source = {});

// Inverse of parse_records for one document (no trailing newline).
std::string to_record_line(const Document& doc);
void write_records(std::ostream& out, const Corpus& corpus);

// Documents whose publication types intersect patterns. Both sides are
// compared after whitespace normalization.
Corpus select_by_pubtype(const Corpus& corpus, const std::set<std::string>& patterns);

// Keeps a year only if it lies within [1500, 2100].
int sanitize_year(long long year);

}  // namespace tp
