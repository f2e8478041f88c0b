#pragma once

#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tp/corpus.hpp"

namespace tp {

using TokenStream = std::vector<std::string>;

enum class EntityType { Gene, Disease, Drug, Species, Mutation, Other };

std::string_view entity_type_name(EntityType t);
EntityType parse_entity_type(std::string_view s);

// Longest phrase a surface form may span, in tokens.
inline constexpr std::size_t kMaxSurfaceTokens = 5;

// Surface-form dictionary that maps synonyms onto canonical entity ids.
// Surface forms are stored tokenized with the same rules applied to text,
// so a stopword inside a surface form is dropped on both sides.
class EntityDictionary {
 public:
  // Adds one synonym. Returns false (and leaves the dictionary unchanged)
  // when the surface reduces to zero tokens, exceeds kMaxSurfaceTokens, or
  // is already bound to a different id.
  bool add(std::string_view surface, const std::string& id, EntityType type);

  // TAB-separated lines: surface, id, type. Blank lines and lines starting
  // with '#' are ignored. Malformed lines throw ParseError with the line
  // number; rejected synonyms are reported through warnings.
  static EntityDictionary load(std::istream& in, std::vector<std::string>* warnings = nullptr);

  const std::string* lookup(const std::string& phrase) const;
  bool is_entity_id(const std::string& token) const { return id_to_type_.count(token) > 0; }
  const std::unordered_map<std::string, EntityType>& ids() const { return id_to_type_; }
  std::size_t surface_count() const { return surface_to_id_.size(); }
  bool empty() const { return surface_to_id_.empty(); }

 private:
  std::unordered_map<std::string, std::string> surface_to_id_;
  std::unordered_map<std::string, EntityType> id_to_type_;
};

// The frozen English stopword list shipped with the tokenizer.
const std::set<std::string, std::less<>>& stopwords();

// Lowercases ASCII, splits on whitespace and ASCII punctuation, and drops
// stopwords. Bytes >= 0x80 are treated as word characters.
TokenStream tokenize(std::string_view text);

// Leftmost-longest replacement of dictionary phrases by entity id tokens.
// Tokens that already are entity ids never take part in a match.
TokenStream normalize_entities(const TokenStream& tokens, const EntityDictionary& dict);

// tokenize + normalize_entities over title and abstract.
TokenStream document_text_tokens(const Document& doc, const EntityDictionary& dict);

std::set<std::string> extract_entity_set(const Document& doc, const EntityDictionary& dict);

// Renders a MeSH descriptor name as a single token: lowercase, runs of
// whitespace/punctuation become one underscore ("Alzheimer Disease" ->
// "alzheimer_disease").
std::string mesh_token(std::string_view descriptor_name);

// Text tokens followed by one token per MeSH heading, in listed order.
TokenStream training_tokens(const Document& doc, const EntityDictionary& dict);

}  // namespace tp
