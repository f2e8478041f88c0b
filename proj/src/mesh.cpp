#include "tp/mesh.hpp"

#include <expat.h>

#include <cctype>
#include <memory>
#include <sstream>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

constexpr const char* kHumansTree = "B01.050.150.900.649.313.988.400.112.400.400";

std::set<std::string> split_list(std::string_view s) {
  std::set<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto t = normalize_space(cur);
    if (!t.empty()) out.insert(t);
    cur.clear();
  };
  for (char c : s) {
    if (c == ',')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

class DescriptorHandler {
 public:
  explicit DescriptorHandler(MeshParseResult& out) : out_(out) {}

  void start(const std::string& name) {
    const std::string parent = stack_.empty() ? std::string() : stack_.back();
    stack_.push_back(name);
    if (name == "DescriptorRecord") {
      in_record_ = true;
      cur_ = MeshDescriptor{};
      return;
    }
    if (!in_record_ || capture_) return;
    if (name == "DescriptorUI" && parent == "DescriptorRecord") {
      begin(Field::Ui);
    } else if (name == "String" && parent == "DescriptorName" && depth_is("DescriptorRecord", 3)) {
      begin(Field::Name);
    } else if (name == "TreeNumber" && parent == "TreeNumberList" &&
               depth_is("DescriptorRecord", 3)) {
      begin(Field::Tree);
    }
  }

  void end() {
    if (capture_ && capture_depth_ == stack_.size()) {
      auto t = normalize_space(text_);
      switch (field_) {
        case Field::Ui: cur_.ui = t; break;
        case Field::Name: cur_.name = t; break;
        case Field::Tree:
          if (!t.empty()) cur_.tree_numbers.insert(t);
          break;
      }
      capture_ = false;
    }
    if (stack_.back() == "DescriptorRecord") finish();
    stack_.pop_back();
  }

  void text(const char* s, int len) {
    if (capture_) text_.append(s, static_cast<std::size_t>(len));
  }

 private:
  enum class Field { Ui, Name, Tree };

  bool depth_is(std::string_view n, std::size_t back) const {
    return stack_.size() >= back && stack_[stack_.size() - back] == n;
  }

  void begin(Field f) {
    capture_ = true;
    capture_depth_ = stack_.size();
    field_ = f;
    text_.clear();
  }

  void finish() {
    in_record_ = false;
    if (cur_.name.empty()) {
      out_.warnings.push_back("descriptor " + cur_.ui + " has no name; skipped");
      return;
    }
    if (cur_.tree_numbers.empty()) {
      out_.warnings.push_back("descriptor \"" + cur_.name + "\" has no tree number; skipped");
      return;
    }
    for (const auto& t : cur_.tree_numbers) {
      if (!valid_tree_number(t))
        out_.warnings.push_back("descriptor \"" + cur_.name + "\" has malformed tree number " + t);
    }
    out_.vocab.add(std::move(cur_));
  }

  MeshParseResult& out_;
  std::vector<std::string> stack_;
  bool in_record_ = false;
  bool capture_ = false;
  std::size_t capture_depth_ = 0;
  Field field_ = Field::Ui;
  std::string text_;
  MeshDescriptor cur_;
};

void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char**) {
  static_cast<DescriptorHandler*>(ud)->start(name);
}
void XMLCALL on_end(void* ud, const XML_Char*) { static_cast<DescriptorHandler*>(ud)->end(); }
void XMLCALL on_text(void* ud, const XML_Char* s, int len) {
  static_cast<DescriptorHandler*>(ud)->text(s, len);
}

}  // namespace

CategoryRules CategoryRules::defaults() {
  CategoryRules r;
  r.a_prefixes = {"B01"};
  r.a_exclusions = {kHumansTree};
  r.c_prefixes = {"A11", "B02", "B03", "B04", "G02.111.570"};
  r.h_prefixes = {"M01"};
  r.h_exact = {kHumansTree};
  return r;
}

CategoryRules CategoryRules::parse(std::istream& in) {
  CategoryRules r = defaults();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (normalize_space(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("rules line " + std::to_string(lineno) + ": expected key = list", lineno);
    auto key = normalize_space(line.substr(0, eq));
    auto values = split_list(line.substr(eq + 1));
    if (key == "a_prefixes") r.a_prefixes = values;
    else if (key == "a_exclusions") r.a_exclusions = values;
    else if (key == "c_prefixes") r.c_prefixes = values;
    else if (key == "h_prefixes") r.h_prefixes = values;
    else if (key == "h_exact") r.h_exact = values;
    else throw ParseError("rules line " + std::to_string(lineno) + ": unknown key \"" + key + "\"", lineno);
  }
  return r;
}

std::string AchLabel::str() const {
  if (cats_ == 0) return "none";
  std::string s;
  if (cats_ & kAnimal) s += 'A';
  if (cats_ & kCell) s += 'C';
  if (cats_ & kHuman) s += 'H';
  return s;
}

AchLabel AchLabel::parse(std::string_view s) {
  if (s == "none" || s.empty()) return AchLabel{};
  CategorySet c = 0;
  for (char ch : s) {
    switch (ch) {
      case 'A': c |= kAnimal; break;
      case 'C': c |= kCell; break;
      case 'H': c |= kHuman; break;
      default: throw Error("invalid ACH label \"" + std::string(s) + "\"");
    }
  }
  return AchLabel(c);
}

void MeshVocabulary::add(MeshDescriptor d) {
  auto name = d.name;
  descriptors_[name] = std::move(d);
}

const MeshDescriptor* MeshVocabulary::find(const std::string& name) const {
  auto it = descriptors_.find(name);
  return it == descriptors_.end() ? nullptr : &it->second;
}

MeshParseResult parse_mesh(std::istream& in) {
  MeshParseResult out;
  DescriptorHandler handler(out);
  std::unique_ptr<XML_ParserStruct, void (*)(XML_Parser)> parser(XML_ParserCreate("UTF-8"),
                                                                  XML_ParserFree);
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);

  std::vector<char> buf(1 << 16);
  bool any = false;
  while (true) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto got = in.gcount();
    bool final = got < static_cast<std::streamsize>(buf.size());
    for (std::streamsize i = 0; i < got && !any; ++i)
      any = !std::isspace(static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]));
    if (final && !any) return out;  // empty file: empty vocabulary
    if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got), final) == XML_STATUS_ERROR) {
      auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
      throw ParseError(std::string("malformed MeSH XML: ") +
                           XML_ErrorString(XML_GetErrorCode(parser.get())) + " at byte " +
                           std::to_string(offset),
                       offset);
    }
    if (final) break;
  }
  return out;
}

bool tree_has_prefix(std::string_view tree, std::string_view prefix) {
  if (prefix.empty() || tree.size() < prefix.size()) return false;
  if (tree.substr(0, prefix.size()) != prefix) return false;
  return tree.size() == prefix.size() || tree[prefix.size()] == '.';
}

bool valid_tree_number(std::string_view tree) {
  if (tree.empty() || !std::isupper(static_cast<unsigned char>(tree[0]))) return false;
  bool need_digit = true;
  for (std::size_t i = 1; i < tree.size(); ++i) {
    char c = tree[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      need_digit = false;
    } else if (c == '.' && !need_digit) {
      need_digit = true;
    } else {
      return false;
    }
  }
  return !need_digit;
}

CategorySet classify_tree_number(const CategoryRules& rules, std::string_view tree) {
  auto any_prefix = [&](const std::set<std::string>& ps) {
    for (const auto& p : ps)
      if (tree_has_prefix(tree, p)) return true;
    return false;
  };
  const std::string t(tree);
  CategorySet c = 0;
  bool h_exact = rules.h_exact.count(t) > 0;
  if (any_prefix(rules.a_prefixes) && !rules.a_exclusions.count(t) && !h_exact) c |= kAnimal;
  if (any_prefix(rules.c_prefixes)) c |= kCell;
  if (h_exact || any_prefix(rules.h_prefixes)) c |= kHuman;
  return c;
}

CategorySet classify_term(const MeshVocabulary& vocab, const std::string& name) {
  const auto* d = vocab.find(name);
  if (!d) return 0;
  CategorySet c = 0;
  for (const auto& t : d->tree_numbers) c |= classify_tree_number(vocab.rules(), t);
  return c;
}

std::set<std::string> basic_terms(const MeshVocabulary& vocab) {
  std::set<std::string> out;
  for (const auto& [name, d] : vocab.descriptors())
    if (classify_term(vocab, name) & (kAnimal | kCell)) out.insert(name);
  return out;
}

std::set<std::string> clinical_terms(const MeshVocabulary& vocab) {
  std::set<std::string> out;
  for (const auto& [name, d] : vocab.descriptors())
    if (classify_term(vocab, name) & kHuman) out.insert(name);
  return out;
}

AchLabel classify_paper(const MeshVocabulary& vocab, const Document& doc) {
  CategorySet c = 0;
  for (const auto& m : doc.mesh_terms) c |= classify_term(vocab, m);
  return AchLabel(c);
}

MeshCounts count_categories(const MeshVocabulary& vocab) {
  MeshCounts n;
  n.descriptors = vocab.size();
  for (const auto& [name, d] : vocab.descriptors()) {
    auto c = classify_term(vocab, name);
    n.animal += (c & kAnimal) ? 1 : 0;
    n.cell += (c & kCell) ? 1 : 0;
    n.human += (c & kHuman) ? 1 : 0;
    bool basic = (c & (kAnimal | kCell)) != 0;
    bool clinical = (c & kHuman) != 0;
    n.basic += basic;
    n.clinical += clinical;
    n.basic_and_clinical += basic && clinical;
  }
  return n;
}

}  // namespace tp
