#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tp/axis.hpp"
#include "tp/corpus.hpp"
#include "tp/embed_doc.hpp"
#include "tp/embed_entity.hpp"
#include "tp/mesh.hpp"
#include "tp/textprep.hpp"

namespace tp {

// Why a score is missing. Unscored never becomes NaN or 0.
enum class Absence {
  None,
  NoEntities,      // no dictionary entity in title/abstract
  ZeroVector,      // paper vector has zero norm
  NoTokens,        // no in-vocabulary token for document inference
};

std::string_view absence_name(Absence a);

struct TpRecord {
  std::string doc_id;
  std::optional<double> tpe;
  std::optional<double> tpd;
  Absence tpe_absence = Absence::None;
  Absence tpd_absence = Absence::None;
  AchLabel ach;
  int year = 0;
  int entity_count = 0;

  friend bool operator==(const TpRecord&, const TpRecord&) = default;
};

// Sum of entity vectors over the set (set semantics, so duplicates cannot
// occur). Throws NoInformation on an empty set.
Vec paper_vector_entity(const EntityModel& model, const std::set<std::string>& entities);

// Cosine between a paper vector and an axis. Values beyond +-1 by at most
// 1e-12 are clamped; a larger excursion, a zero vector or a dimension
// mismatch throws.
double tp_project(const Vec& paper_vec, const Vec& axis);
double tp_project(const Vec& paper_vec, const AxisVector& axis);

struct ScoreInputs {
  const EntityDictionary& dict;
  const MeshVocabulary& vocab;
  const EntityModel& entity_model;
  const DocModel& doc_model;
  const AxisVector& entity_axis;
  const AxisVector& doc_axis;
};

// One record per document in corpus order. Training documents use their
// trained vector for TPD; others are inferred. Throws DimensionMismatch when
// a model and its axis disagree.
std::vector<TpRecord> score_corpus(const Corpus& corpus, const ScoreInputs& in, int threads = 1);

// CSV with header doc_id,tpe,tpd,ach,year,entity_count. Absent scores are
// empty fields.
std::string scores_csv(const std::vector<TpRecord>& records);
void write_scores(const std::vector<TpRecord>& records, const std::filesystem::path& path);
std::vector<TpRecord> read_scores(std::istream& in);

}  // namespace tp
