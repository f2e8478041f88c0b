#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tp/corpus.hpp"
#include "tp/embed_entity.hpp"
#include "tp/linalg.hpp"
#include "tp/sgd.hpp"
#include "tp/textprep.hpp"

namespace tp {

struct DocHyperparams {
  int dim = 700;
  double lr = 0.0001;
  int window = 30;
  int epochs = 30;
  int threads = 12;
  int negatives = 5;
  int min_count = 5;
  int infer_epochs = 50;
  std::uint64_t seed = 42;

  void validate() const;
  friend bool operator==(const DocHyperparams&, const DocHyperparams&) = default;
};

// PV-DM paragraph-vector model.
struct DocModel {
  DocHyperparams hyperparams;
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::int32_t> word_index;
  Matrix<float> word_vectors;
  Matrix<float> output;  // negative-sampling weights, one row per word
  Matrix<float> doc_vectors;
  std::vector<std::string> doc_ids;  // row -> document id
  std::unordered_map<std::string, std::int32_t> doc_rows;
  sgd::NegativeTable negatives;  // derived from counts by reindex()

  std::optional<std::int32_t> word_id(std::string_view token) const;
  std::optional<std::int32_t> doc_row(std::string_view id) const;
  Vec doc_vector(std::int32_t row) const;
  void reindex();
};

// Initialisation seed for a document vector: hp.seed XOR fnv1a64(id).
std::uint64_t document_seed(std::uint64_t seed, std::string_view doc_id);

// Trains PV-DM over title+abstract. Documents whose token stream is empty
// after preprocessing get no row and are reported in log->warnings.
// Documents are visited in id order, so in deterministic mode (threads = 1)
// the id -> vector mapping does not depend on corpus order.
DocModel train_pvdm(const Corpus& corpus, const EntityDictionary& dict, const DocHyperparams& hp,
                    TrainLog* log = nullptr);

// Gradient descent on a fresh document vector with word and output weights
// frozen. Throws NoInformation when no token is in the vocabulary.
Vec infer_doc_vector(const DocModel& model, const Document& doc, const EntityDictionary& dict);
Vec infer_doc_vector(const DocModel& model, const TokenStream& tokens, std::string_view doc_id);

// Binary "TPD1" container.
std::string serialize(const DocModel& model);
void save(const DocModel& model, const std::filesystem::path& path);
DocModel deserialize_doc_model(std::string_view bytes);
DocModel load_doc_model(const std::filesystem::path& path);

// Text vector format over document ids.
void export_text(const DocModel& model, std::ostream& out);

}  // namespace tp
