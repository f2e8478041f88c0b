#include "tp/corpus.hpp"

#include <expat.h>

#include <cctype>
#include <memory>
#include <unordered_set>

#include <json.hpp>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

void push_unique(std::vector<std::string>& v, std::string s) {
  for (const auto& x : v)
    if (x == s) return;
  v.push_back(std::move(s));
}

int first_four_digit_year(std::string_view s) {
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    bool run = true;
    for (std::size_t k = 0; k < 4; ++k) run = run && std::isdigit(static_cast<unsigned char>(s[i + k]));
    bool left_ok = i == 0 || !std::isdigit(static_cast<unsigned char>(s[i - 1]));
    bool right_ok = i + 4 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 4]));
    if (run && left_ok && right_ok) return sanitize_year(std::stoi(std::string(s.substr(i, 4))));
  }
  return 0;
}

// Expat handler state for MedlineCitation extraction.
class PubmedHandler {
 public:
  PubmedHandler(XML_Parser parser, const std::function<void(Document&&)>& sink,
                std::vector<RecordError>& errors)
      : parser_(parser), sink_(sink), errors_(errors) {}

  void start(const std::string& name) {
    const std::string& parent = stack_.empty() ? empty_ : stack_.back();
    stack_.push_back(name);
    if (name == "MedlineCitation") {
      in_citation_ = true;
      doc_ = Document{};
      abstract_parts_.clear();
      pub_year_.clear();
      medline_date_.clear();
      return;
    }
    if (!in_citation_ || capture_) return;
    if (name == "PMID" && parent == "MedlineCitation") {
      begin_capture(&doc_.id);
    } else if (name == "ArticleTitle" && parent == "Article") {
      begin_capture(&doc_.title);
    } else if (name == "AbstractText" && parent == "Abstract" && grandparent_is("Article")) {
      abstract_parts_.emplace_back();
      begin_capture(&abstract_parts_.back());
    } else if (name == "Year" && parent == "PubDate") {
      begin_capture(&pub_year_);
    } else if (name == "MedlineDate" && parent == "PubDate") {
      begin_capture(&medline_date_);
    } else if (name == "PublicationType" && parent == "PublicationTypeList") {
      scratch_.clear();
      begin_capture(&scratch_);
      scratch_kind_ = Scratch::PubType;
    } else if (name == "DescriptorName" && parent == "MeshHeading") {
      scratch_.clear();
      begin_capture(&scratch_);
      scratch_kind_ = Scratch::Mesh;
    }
  }

  void end() {
    if (capture_ && capture_depth_ == stack_.size()) {
      capture_ = nullptr;
      if (scratch_kind_ == Scratch::PubType) {
        auto t = trim(scratch_);
        if (!t.empty()) doc_.pub_types.insert(std::move(t));
      } else if (scratch_kind_ == Scratch::Mesh) {
        auto t = trim(scratch_);
        if (!t.empty()) push_unique(doc_.mesh_terms, std::move(t));
      }
      scratch_kind_ = Scratch::None;
    }
    if (!stack_.empty() && stack_.back() == "MedlineCitation") finish_citation();
    if (!stack_.empty()) stack_.pop_back();
  }

  void text(const char* s, int len) {
    if (capture_) capture_->append(s, static_cast<std::size_t>(len));
  }

 private:
  enum class Scratch { None, PubType, Mesh };

  bool grandparent_is(std::string_view n) const {
    return stack_.size() >= 3 && stack_[stack_.size() - 3] == n;
  }

  void begin_capture(std::string* target) {
    capture_ = target;
    capture_depth_ = stack_.size();
  }

  void finish_citation() {
    in_citation_ = false;
    doc_.id = trim(doc_.id);
    doc_.title = normalize_space(doc_.title);
    std::string abstract;
    for (const auto& part : abstract_parts_) {
      auto t = normalize_space(part);
      if (t.empty()) continue;
      if (!abstract.empty()) abstract.push_back(' ');
      abstract += t;
    }
    doc_.abstract = std::move(abstract);
    auto y = trim(pub_year_);
    doc_.year = 0;
    if (!y.empty()) doc_.year = first_four_digit_year(y);
    if (doc_.year == 0) doc_.year = first_four_digit_year(medline_date_);
    if (doc_.id.empty()) {
      errors_.push_back({static_cast<std::size_t>(XML_GetCurrentByteIndex(parser_)),
                         "citation without PMID skipped"});
      return;
    }
    sink_(std::move(doc_));
  }

  XML_Parser parser_;
  const std::function<void(Document&&)>& sink_;
  std::vector<RecordError>& errors_;
  std::vector<std::string> stack_;
  const std::string empty_;
  bool in_citation_ = false;
  Document doc_;
  std::vector<std::string> abstract_parts_;
  std::string pub_year_, medline_date_, scratch_;
  Scratch scratch_kind_ = Scratch::None;
  std::string* capture_ = nullptr;
  std::size_t capture_depth_ = 0;
};

void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char**) {
  static_cast<PubmedHandler*>(ud)->start(name);
}
void XMLCALL on_end(void* ud, const XML_Char*) { static_cast<PubmedHandler*>(ud)->end(); }
void XMLCALL on_text(void* ud, const XML_Char* s, int len) {
  static_cast<PubmedHandler*>(ud)->text(s, len);
}

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

void check_unique(const Corpus& corpus) {
  std::unordered_set<std::string_view> seen;
  for (const auto& d : corpus.documents) {
    if (!seen.insert(d.id).second) throw Error("duplicate document id \"" + d.id + "\"");
  }
}

std::vector<std::string> string_array(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(std::string("\"") + key + "\" must be an array of strings");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(std::string("\"") + key + "\" must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Document document_from_json(const json& j) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  Document d;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty())
    throw Error("missing or empty \"id\" field");
  d.id = id->get<std::string>();
  auto title = j.find("title");
  if (title == j.end() || !title->is_string()) throw Error("missing \"title\" field");
  d.title = title->get<std::string>();
  if (auto a = j.find("abstract"); a != j.end() && !a->is_null()) {
    if (!a->is_string()) throw Error("\"abstract\" must be a string");
    d.abstract = a->get<std::string>();
  }
  if (auto y = j.find("year"); y != j.end() && !y->is_null()) {
    if (!y->is_number_integer()) throw Error("\"year\" must be an integer");
    d.year = sanitize_year(y->get<long long>());
  }
  for (auto& p : string_array(j, "pub_types")) d.pub_types.insert(std::move(p));
  for (auto& m : string_array(j, "mesh")) push_unique(d.mesh_terms, std::move(m));
  return d;
}

}  // namespace

int sanitize_year(long long year) {
  return (year >= 1500 && year <= 2100) ? static_cast<int>(year) : 0;
}

void stream_pubmed_xml(std::istream& in, const std::function<void(Document&&)>& sink,
                       std::vector<RecordError>& errors) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw Error("cannot allocate XML parser");
  PubmedHandler handler(parser.get(), sink, errors);
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);

  std::vector<char> buf(1 << 16);
  while (true) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto got = in.gcount();
    bool final = got < static_cast<std::streamsize>(buf.size());
    if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got), final) == XML_STATUS_ERROR) {
      auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
      throw ParseError(std::string("malformed XML: ") +
                           XML_ErrorString(XML_GetErrorCode(parser.get())) + " at byte " +
                           std::to_string(offset),
                       offset);
    }
    if (final) break;
  }
}

ParseResult parse_pubmed_xml(std::istream& in, std::string source) {
  ParseResult r;
  r.corpus.source = std::move(source);
  stream_pubmed_xml(in, [&](Document&& d) { r.corpus.documents.push_back(std::move(d)); },
                    r.errors);
  check_unique(r.corpus);
  return r;
}

void stream_records(std::istream& in, const std::function<void(Document&&)>& sink,
                    std::vector<RecordError>& errors) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      sink(document_from_json(j));
    } catch (const json::exception& e) {
      errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      errors.push_back({lineno, e.what()});
    }
  }
}

ParseResult parse_records(std::istream& in, std::string source) {
  ParseResult r;
  r.corpus.source = std::move(source);
  stream_records(in, [&](Document&& d) { r.corpus.documents.push_back(std::move(d)); },
                 r.errors);
  check_unique(r.corpus);
  return r;
}

std::string to_record_line(const Document& doc) {
  json j;
  j["id"] = doc.id;
  j["title"] = doc.title;
  j["abstract"] = doc.abstract;
  j["year"] = doc.year;
  j["pub_types"] = doc.pub_types;
  j["mesh"] = doc.mesh_terms;
  return j.dump();
}

void write_records(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.documents) out << to_record_line(d) << '\n';
}

Corpus select_by_pubtype(const Corpus& corpus, const std::set<std::string>& patterns) {
  std::set<std::string> wanted;
  for (const auto& p : patterns) wanted.insert(normalize_space(p));
  Corpus out;
  out.source = corpus.source;
  for (const auto& d : corpus.documents) {
    for (const auto& t : d.pub_types) {
      if (wanted.count(normalize_space(t))) {
        out.documents.push_back(d);
        break;
      }
    }
  }
  return out;
}

}  // namespace tp
