#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tp/corpus.hpp"

namespace tp {

struct MeshDescriptor {
  std::string name;
  std::string ui;
  std::set<std::string> tree_numbers;
};

// Tree-number rules for the Animal / Cell-molecular / Human categories.
// A prefix matches a tree number equal to it or lying below it in the tree
// ("B01" matches "B01" and "B01.050", not "B010").
struct CategoryRules {
  std::set<std::string> a_prefixes;
  std::set<std::string> a_exclusions;
  std::set<std::string> c_prefixes;
  std::set<std::string> h_prefixes;
  std::set<std::string> h_exact;

  // Rules for the 2020 descriptor vocabulary.
  static CategoryRules defaults();

  // Text format, one rule per line, '#' starts a comment:
  //   a_prefixes = B01
  //   a_exclusions = B01.050.150.900.649.313.988.400.112.400.400
  //   c_prefixes = A11, B02, B03, B04, G02.111.570
  //   h_prefixes = M01
  //   h_exact = B01.050.150.900.649.313.988.400.112.400.400
  // Keys that are present replace the corresponding default set.
  static CategoryRules parse(std::istream& in);

  friend bool operator==(const CategoryRules&, const CategoryRules&) = default;
};

enum Category : std::uint8_t { kAnimal = 1, kCell = 2, kHuman = 4 };

// Bitwise union of Category flags.
using CategorySet = std::uint8_t;

// The seven-way paper label plus "none". Stored as a CategorySet; printed
// in the canonical A, C, H order ("AC", "ACH", ...).
class AchLabel {
 public:
  AchLabel() = default;
  explicit AchLabel(CategorySet cats) : cats_(cats & 7) {}

  CategorySet categories() const { return cats_; }
  bool none() const { return cats_ == 0; }
  bool has(Category c) const { return (cats_ & c) != 0; }
  std::string str() const;
  static AchLabel parse(std::string_view s);

  friend auto operator<=>(const AchLabel&, const AchLabel&) = default;

 private:
  CategorySet cats_ = 0;
};

class MeshVocabulary {
 public:
  MeshVocabulary() : rules_(CategoryRules::defaults()) {}

  void add(MeshDescriptor d);
  void set_rules(CategoryRules r) { rules_ = std::move(r); }

  const CategoryRules& rules() const { return rules_; }
  const std::map<std::string, MeshDescriptor>& descriptors() const { return descriptors_; }
  const MeshDescriptor* find(const std::string& name) const;
  std::size_t size() const { return descriptors_.size(); }

 private:
  std::map<std::string, MeshDescriptor> descriptors_;
  CategoryRules rules_;
};

struct MeshParseResult {
  MeshVocabulary vocab;
  std::vector<std::string> warnings;
};

// Reads the descriptor XML (DescriptorRecordSet). Descriptors without a tree
// number are skipped with a warning. Malformed XML throws ParseError.
MeshParseResult parse_mesh(std::istream& in);

bool tree_has_prefix(std::string_view tree, std::string_view prefix);
bool valid_tree_number(std::string_view tree);

CategorySet classify_tree_number(const CategoryRules& rules, std::string_view tree);
CategorySet classify_term(const MeshVocabulary& vocab, const std::string& name);

// Terms whose categories intersect {A, C}.
std::set<std::string> basic_terms(const MeshVocabulary& vocab);
// Terms whose categories contain H.
std::set<std::string> clinical_terms(const MeshVocabulary& vocab);

AchLabel classify_paper(const MeshVocabulary& vocab, const Document& doc);

struct MeshCounts {
  std::size_t descriptors = 0;
  std::size_t animal = 0;
  std::size_t cell = 0;
  std::size_t human = 0;
  std::size_t basic = 0;
  std::size_t clinical = 0;
  std::size_t basic_and_clinical = 0;
};

MeshCounts count_categories(const MeshVocabulary& vocab);

}  // namespace tp
