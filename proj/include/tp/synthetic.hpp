#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tp/corpus.hpp"

namespace tp {

// Generator for the desk-scale validation corpus. Documents draw words and
// entity mentions from a "basic" cluster and a "clinical" cluster; the
// clinical share of each document and its MeSH labelling depend on its
// group:
//   basic      clinical share 0, MeSH labels C / A / AC
//   clinical   clinical share 1, label H, some typed Clinical Trial/Guideline
//   mixed      clinical share 0.5, labels CH / AH / ACH
//   phase k    clinical share 0.5 + 0.1 k (k = 1..4), label H,
//              typed "Clinical Trial, Phase k"
struct SyntheticSpec {
  int basic_docs = 3500;
  int clinical_docs = 2500;
  int mixed_docs = 2000;
  int docs_per_phase = 500;
  int text_tokens = 40;        // plain words per document
  int entity_mentions = 12;    // entity surface mentions per document
  double filler_share = 0.3;   // share of plain words drawn from the neutral pool
  int cluster_words = 60;
  int cluster_entities = 30;
  int filler_words = 40;
  int mesh_terms_per_category = 12;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Corpus corpus;
  std::string mesh_xml;         // descriptor XML for the generated vocabulary
  std::string entities_tsv;     // entity dictionary file
  std::map<std::string, std::string> group;  // document id -> group name
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace tp
