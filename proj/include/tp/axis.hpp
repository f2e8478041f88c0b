#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tp/corpus.hpp"
#include "tp/embed_doc.hpp"
#include "tp/embed_entity.hpp"
#include "tp/linalg.hpp"
#include "tp/mesh.hpp"

namespace tp {

enum class AxisLevel : std::uint8_t { Entity = 0, Document = 1 };

std::string_view axis_level_name(AxisLevel level);

// Bench-to-bedside direction: clinical centroid minus basic centroid.
struct AxisVector {
  AxisLevel level = AxisLevel::Entity;
  Vec basic_centroid;
  Vec clinical_centroid;
  Vec axis;
  std::int64_t basic_count = 0;
  std::int64_t clinical_count = 0;

  std::size_t dim() const { return axis.size(); }
  friend bool operator==(const AxisVector&, const AxisVector&) = default;
};

// Terms that were left out of a centroid because the model had no
// information for them.
struct AxisDiagnostics {
  std::int64_t basic_candidates = 0;
  std::int64_t clinical_candidates = 0;
  std::vector<std::string> excluded_basic;
  std::vector<std::string> excluded_clinical;
};

// Arithmetic mean of equally sized vectors. Throws on an empty set or
// mismatched dimensions.
Vec centroid(const std::vector<Vec>& vectors);

// Combines two centroids into an axis. Throws Error("degenerate axis") when
// the difference has norm below 1e-12.
AxisVector make_axis(AxisLevel level, Vec basic_centroid, Vec clinical_centroid,
                     std::int64_t basic_count, std::int64_t clinical_count);

// Entity-level axis over the MeSH term tokens of the basic (A or C) and
// clinical (H) term sets.
AxisVector entity_axis(const EntityModel& model, const MeshVocabulary& vocab,
                       AxisDiagnostics* diagnostics = nullptr);

// Publication-type patterns that mark a clinical paper.
struct ClinicalTypePatterns {
  std::set<std::string> contains = {"Clinical Trial"};
  std::set<std::string> exact = {"Guideline", "Practice Guideline"};

  bool matches(const Document& doc) const;
};

// Basic papers carry only A/C categories (label A, C or AC); clinical papers
// match the publication-type patterns. Documents without a trained vector
// are skipped and counted in diagnostics.
AxisVector doc_axis(const DocModel& model, const Corpus& corpus, const MeshVocabulary& vocab,
                    const ClinicalTypePatterns& patterns = {},
                    AxisDiagnostics* diagnostics = nullptr);

bool is_basic_label(AchLabel label);

// Binary "TAX1" container (vectors stored as little-endian float64).
std::string serialize(const AxisVector& axis);
void save_axis(const AxisVector& axis, const std::filesystem::path& path);
AxisVector deserialize_axis(std::string_view bytes);
AxisVector load_axis(const std::filesystem::path& path);

// Three lines in text vector format: basic_centroid, clinical_centroid, axis.
void export_text(const AxisVector& axis, std::ostream& out);

}  // namespace tp
