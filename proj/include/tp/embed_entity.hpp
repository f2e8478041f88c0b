#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tp/linalg.hpp"
#include "tp/textprep.hpp"

namespace tp {

struct EntityHyperparams {
  int dim = 200;
  double lr = 0.0001;
  int min_subword = 3;
  int max_subword = 6;
  int window = 5;
  int epochs = 5;
  int negatives = 5;
  int min_count = 5;
  std::int64_t buckets = 2'000'000;
  int threads = 12;
  std::uint64_t seed = 42;
  // Largest vector norm tolerated after training before the run is
  // rejected as diverged.
  double max_norm = 1e3;

  void validate() const;
  friend bool operator==(const EntityHyperparams&, const EntityHyperparams&) = default;
};

// Character n-grams of "<word>" for n in [minn, maxn], counted in UTF-8 code
// points. The whole bracketed word is not one of its own n-grams.
std::vector<std::string> subword_ngrams(std::string_view word, int minn, int maxn);

// CBOW + subword model. Rows [0, vocab) of input are word vectors, rows
// [vocab, vocab + buckets) are n-gram buckets. output holds one row per
// vocabulary word.
struct EntityModel {
  EntityHyperparams hyperparams;
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::int32_t> index;
  Matrix<float> input;
  Matrix<float> output;

  std::optional<std::int32_t> word_id(std::string_view token) const;
  std::int32_t bucket_row(std::string_view ngram) const;

  // Input rows averaged into a token's representation: its word row (if in
  // vocabulary) followed by its n-gram bucket rows.
  std::vector<std::int32_t> input_rows(std::string_view token) const;

  // Rebuilds index from words.
  void reindex();
};

struct TermVector {
  Vec values;
  // Set when the term is out of vocabulary and yields no n-grams; values is
  // then the zero vector.
  bool no_information = false;
};

struct TrainLog {
  std::vector<std::string> warnings;
  std::uint64_t tokens = 0;
  double final_loss = 0.0;
};

// Trains CBOW with negative sampling. Out-of-vocabulary tokens (count below
// min_count) are dropped from the streams. threads == 1 with a fixed seed is
// bit-reproducible; threads > 1 uses lock-free asynchronous updates.
EntityModel train_cbow(std::span<const TokenStream> corpus_tokens, const EntityHyperparams& hp,
                       TrainLog* log = nullptr);

TermVector vector(const EntityModel& model, std::string_view term);

// Binary "TPE1" container.
void save(const EntityModel& model, const std::filesystem::path& path);
std::string serialize(const EntityModel& model);
EntityModel load_entity_model(const std::filesystem::path& path);
EntityModel deserialize_entity_model(std::string_view bytes);

// "count dim" header, then "token v1 v2 ..." for each vocabulary word.
void export_text(const EntityModel& model, std::ostream& out);

}  // namespace tp
