#include "tp/textprep.hpp"

#include <cctype>

#include "tp/error.hpp"

namespace tp {

namespace {

bool is_separator(unsigned char c) {
  return c < 0x80 && (std::isspace(c) || std::ispunct(c) || std::iscntrl(c));
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string join(const TokenStream& t, std::size_t from, std::size_t n) {
  std::string s = t[from];
  for (std::size_t k = 1; k < n; ++k) {
    s.push_back(' ');
    s += t[from + k];
  }
  return s;
}

}  // namespace

std::string_view entity_type_name(EntityType t) {
  switch (t) {
    case EntityType::Gene: return "gene";
    case EntityType::Disease: return "disease";
    case EntityType::Drug: return "drug";
    case EntityType::Species: return "species";
    case EntityType::Mutation: return "mutation";
    case EntityType::Other: return "other";
  }
  return "other";
}

EntityType parse_entity_type(std::string_view s) {
  if (s == "gene") return EntityType::Gene;
  if (s == "disease") return EntityType::Disease;
  if (s == "drug") return EntityType::Drug;
  if (s == "species") return EntityType::Species;
  if (s == "mutation") return EntityType::Mutation;
  if (s == "other") return EntityType::Other;
  throw Error("unknown entity type \"" + std::string(s) + "\"");
}

bool EntityDictionary::add(std::string_view surface, const std::string& id, EntityType type) {
  auto toks = tokenize(surface);
  if (toks.empty() || toks.size() > kMaxSurfaceTokens || id.empty()) return false;
  auto key = join(toks, 0, toks.size());
  auto [it, inserted] = surface_to_id_.emplace(key, id);
  if (!inserted && it->second != id) return false;
  id_to_type_.emplace(id, type);
  return true;
}

EntityDictionary EntityDictionary::load(std::istream& in, std::vector<std::string>* warnings) {
  EntityDictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != 3)
      throw ParseError("entity dictionary line " + std::to_string(lineno) +
                           ": expected 3 TAB-separated fields",
                       lineno);
    EntityType type;
    try {
      type = parse_entity_type(f[2]);
    } catch (const Error& e) {
      throw ParseError("entity dictionary line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
    if (!dict.add(f[0], f[1], type) && warnings) {
      warnings->push_back("entity dictionary line " + std::to_string(lineno) +
                          ": surface \"" + f[0] + "\" rejected");
    }
  }
  return dict;
}

const std::string* EntityDictionary::lookup(const std::string& phrase) const {
  auto it = surface_to_id_.find(phrase);
  return it == surface_to_id_.end() ? nullptr : &it->second;
}

const std::set<std::string, std::less<>>& stopwords() {
  // NLTK English list (179 words).
  static const std::set<std::string, std::less<>> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
      "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
      "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
      "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
      "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
      "be", "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing",
      "a", "an", "the", "and", "but", "if", "or", "because", "as", "until", "while", "of",
      "at", "by", "for", "with", "about", "against", "between", "into", "through", "during",
      "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
      "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
      "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
      "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
      "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now", "d",
      "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
      "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn",
      "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren",
      "weren't", "won", "won't", "wouldn", "wouldn't"};
  return words;
}

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  const auto& stop = stopwords();
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stop.count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      flush();
    } else {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  return out;
}

TokenStream normalize_entities(const TokenStream& tokens, const EntityDictionary& dict) {
  if (dict.empty()) return tokens;
  TokenStream out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t limit = 0;
    while (limit < kMaxSurfaceTokens && i + limit < tokens.size() &&
           !dict.is_entity_id(tokens[i + limit]))
      ++limit;
    const std::string* hit = nullptr;
    std::size_t len = limit;
    for (; len >= 1; --len) {
      hit = dict.lookup(join(tokens, i, len));
      if (hit) break;
    }
    if (hit) {
      out.push_back(*hit);
      i += len;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

TokenStream document_text_tokens(const Document& doc, const EntityDictionary& dict) {
  std::string text = doc.title;
  if (!doc.abstract.empty()) {
    text.push_back(' ');
    text += doc.abstract;
  }
  return normalize_entities(tokenize(text), dict);
}

std::set<std::string> extract_entity_set(const Document& doc, const EntityDictionary& dict) {
  std::set<std::string> out;
  for (auto& t : document_text_tokens(doc, dict))
    if (dict.is_entity_id(t)) out.insert(std::move(t));
  return out;
}

std::string mesh_token(std::string_view descriptor_name) {
  std::string out;
  bool pending = false;
  for (char ch : descriptor_name) {
    auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back('_');
      pending = false;
      out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  return out;
}

TokenStream training_tokens(const Document& doc, const EntityDictionary& dict) {
  auto tokens = document_text_tokens(doc, dict);
  for (const auto& m : doc.mesh_terms) {
    auto t = mesh_token(m);
    if (!t.empty()) tokens.push_back(std::move(t));
  }
  return tokens;
}

}  // namespace tp
