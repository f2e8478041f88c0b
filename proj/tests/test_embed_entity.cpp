#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "tp/embed_entity.hpp"
#include "tp/error.hpp"
#include "tp/util.hpp"

using namespace tp;

namespace {

EntityHyperparams tiny(int dim = 8) {
  EntityHyperparams hp;
  hp.dim = dim;
  hp.lr = 0.05;
  hp.epochs = 5;
  hp.window = 2;
  hp.min_count = 1;
  hp.buckets = 997;
  hp.threads = 1;
  return hp;
}

// alpha and beta are adjacent in every sentence of one topic; gamma only
// occurs in a second topic with a disjoint word pool.
std::vector<TokenStream> cooccurrence_corpus() {
  Rng rng(7);
  std::vector<TokenStream> c;
  for (int i = 0; i < 300; ++i) {
    TokenStream a, g;
    for (int k = 0; k < 6; ++k) a.push_back("p" + std::to_string(rng.below(20)));
    a.insert(a.begin() + static_cast<std::ptrdiff_t>(rng.below(6)), {"alpha", "beta"});
    for (int k = 0; k < 7; ++k) g.push_back("q" + std::to_string(rng.below(20)));
    g.insert(g.begin() + static_cast<std::ptrdiff_t>(rng.below(7)), "gamma");
    c.push_back(a);
    c.push_back(g);
  }
  return c;
}

double cosine(const Vec& a, const Vec& b) { return dot(a, b) / (norm(a) * norm(b)); }

// Independent re-derivation of the subword rows: UTF-8 code points of
// "<word>", every n-gram with n in [minn, maxn] except the whole wrapped word,
// FNV-1a 32 modulo the bucket count, offset by the vocabulary size.
std::vector<std::size_t> oracle_rows(const std::string& word, std::size_t vocab, std::uint64_t buckets,
                                     int minn, int maxn) {
  std::vector<std::string> cps;
  std::string w = "<" + word + ">";
  for (std::size_t i = 0; i < w.size();) {
    std::size_t len = 1;
    auto c = static_cast<unsigned char>(w[i]);
    if (c >= 0xf0) len = 4;
    else if (c >= 0xe0) len = 3;
    else if (c >= 0xc0) len = 2;
    cps.push_back(w.substr(i, len));
    i += len;
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    for (int n = minn; n <= maxn && i + n <= cps.size(); ++n) {
      if (i == 0 && i + n == cps.size()) continue;
      std::string g;
      for (int k = 0; k < n; ++k) g += cps[i + k];
      std::uint32_t h = 2166136261u;
      for (unsigned char ch : g) {
        h ^= ch;
        h *= 16777619u;
      }
      rows.push_back(vocab + h % buckets);
    }
  }
  return rows;
}

}  // namespace

TEST(Subwords, Ngrams) {
  EXPECT_EQ(subword_ngrams("ab", 3, 3), (std::vector<std::string>{"<ab", "ab>"}));
  EXPECT_TRUE(subword_ngrams("a", 3, 6).empty());
  EXPECT_EQ(subword_ngrams("\xc3\xa9", 2, 2), (std::vector<std::string>{"<\xc3\xa9", "\xc3\xa9>"}));
  auto g = subword_ngrams("where", 3, 6);
  EXPECT_EQ(g.size(), 5u + 4u + 3u + 2u);
  EXPECT_EQ(g.front(), "<wh");
  EXPECT_EQ(std::count(g.begin(), g.end(), "<where>"), 0);
}

TEST(Subwords, HashIsPure) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  EXPECT_EQ(m.bucket_row("lph"), m.bucket_row(std::string("l") + "ph"));
  EXPECT_EQ(m.bucket_row("lph"), static_cast<std::int32_t>(m.words.size() + fnv1a32("lph") % 997));
}

TEST(TrainCbow, CooccurringTokensAreCloser) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  const double ab = cosine(vector(m, "alpha").values, vector(m, "beta").values);
  const double ag = cosine(vector(m, "alpha").values, vector(m, "gamma").values);
  EXPECT_GT(ab, ag);
  // Golden margin at seed 42.
  EXPECT_NEAR(ab - ag, 0.21073472952865285, 1e-6) << "ab=" << ab << " ag=" << ag;
}

TEST(TrainCbow, ShapeFollowsDim) {
  auto m = train_cbow(cooccurrence_corpus(), tiny(3));
  EXPECT_EQ(m.input.cols(), 3u);
  EXPECT_EQ(m.output.cols(), 3u);
  EXPECT_EQ(m.input.rows(), m.words.size() + 997);
  EXPECT_EQ(vector(m, "alpha").values.size(), 3u);
  EXPECT_EQ(vector(m, "unseen").values.size(), 3u);
}

TEST(TrainCbow, VocabularyDependsOnlyOnCounts) {
  TokenStream doc = {"x", "y", "y", "z", "z", "z"};
  std::vector<TokenStream> repeated(1000, doc);
  std::vector<TokenStream> once = {doc};
  auto hp = tiny();
  auto a = train_cbow(repeated, hp);
  hp.epochs = 1000;
  auto b = train_cbow(once, hp);
  EXPECT_EQ(a.words, b.words);
  EXPECT_EQ(a.words, (std::vector<std::string>{"z", "y", "x"}));
}

TEST(TrainCbow, MinCountFilters) {
  auto hp = tiny();
  std::vector<TokenStream> c(10, TokenStream{"x", "y", "y"});
  hp.min_count = 21;
  EXPECT_THROW(train_cbow(c, hp), Error);
  hp.min_count = 11;
  EXPECT_EQ(train_cbow(c, hp).words, std::vector<std::string>{"y"});
  hp.min_count = 10;
  EXPECT_EQ(train_cbow(c, hp).words, (std::vector<std::string>{"y", "x"}));
}

TEST(TrainCbow, EmptyInputsThrow) {
  EXPECT_THROW(train_cbow(std::vector<TokenStream>{}, tiny()), Error);
  EXPECT_THROW(train_cbow(std::vector<TokenStream>{{}}, tiny()), Error);
}

TEST(TrainCbow, InvalidHyperparamsThrow) {
  auto hp = tiny();
  hp.min_subword = 7;
  EXPECT_THROW(train_cbow(cooccurrence_corpus(), hp), Error);
  hp = tiny();
  hp.lr = 0;
  EXPECT_THROW(train_cbow(cooccurrence_corpus(), hp), Error);
}

TEST(TrainCbow, DeterministicSingleThread) {
  auto a = serialize(train_cbow(cooccurrence_corpus(), tiny()));
  auto b = serialize(train_cbow(cooccurrence_corpus(), tiny()));
  EXPECT_EQ(a, b);
  auto hp = tiny();
  hp.seed = 43;
  EXPECT_NE(serialize(train_cbow(cooccurrence_corpus(), hp)), a);
}

TEST(TrainCbow, MultiThreadedStaysFinite) {
  auto hp = tiny();
  hp.threads = 3;
  auto m = train_cbow(cooccurrence_corpus(), hp);
  EXPECT_TRUE(all_finite(m.input.data()));
}

TEST(TrainCbow, NormBoundEnforced) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  for (std::size_t r = 0; r < m.input.rows(); ++r) {
    auto row = m.input.row(r);
    EXPECT_LE(std::sqrt(dot(std::span<const float>(row), std::span<const float>(row))), 1e3);
  }
  auto hp = tiny();
  hp.max_norm = 1e-6;
  EXPECT_THROW(train_cbow(cooccurrence_corpus(), hp), Error);
}

TEST(EntityVector, InVocabularyComposite) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  auto rows = oracle_rows("alpha", m.words.size(), 997, 3, 6);
  rows.insert(rows.begin(), static_cast<std::size_t>(*m.word_id("alpha")));
  Vec expect(8, 0.0);
  for (auto r : rows)
    for (std::size_t k = 0; k < 8; ++k) expect[k] += m.input.row(r)[k];
  for (auto& x : expect) x /= static_cast<double>(rows.size());
  auto v = vector(m, "alpha");
  EXPECT_FALSE(v.no_information);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(v.values[k], expect[k]);
}

TEST(EntityVector, OutOfVocabularyFromBucketsOnly) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  const std::string term = "xqzv-like";
  ASSERT_FALSE(m.word_id(term));
  auto rows = oracle_rows(term, m.words.size(), 997, 3, 6);
  ASSERT_EQ(rows.size(), 30u);
  Vec expect(8, 0.0);
  for (auto r : rows)
    for (std::size_t k = 0; k < 8; ++k) expect[k] += m.input.row(r)[k];
  for (auto& x : expect) x /= 30.0;
  auto v = vector(m, term);
  EXPECT_FALSE(v.no_information);
  EXPECT_GT(norm(v.values), 0.0);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(v.values[k], expect[k], 1e-15);
  EXPECT_EQ(vector(m, term).values, v.values);
}

TEST(EntityVector, ShortUnknownTermHasNoInformation) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  auto v = vector(m, "q");
  EXPECT_TRUE(v.no_information);
  EXPECT_EQ(norm(v.values), 0.0);
}

TEST(EntityModelIo, RoundTripBitIdentical) {
  auto m = train_cbow(cooccurrence_corpus(), tiny());
  auto path = std::filesystem::temp_directory_path() / "tp_test_entity.tpe";
  save(m, path);
  auto back = load_entity_model(path);
  EXPECT_EQ(back.words, m.words);
  EXPECT_EQ(back.counts, m.counts);
  EXPECT_EQ(back.hyperparams, m.hyperparams);
  EXPECT_TRUE(back.input == m.input);
  EXPECT_TRUE(back.output == m.output);
  EXPECT_EQ(vector(back, "alpha").values, vector(m, "alpha").values);
  std::filesystem::remove(path);
}

TEST(EntityModelIo, WrongMagicNamesFormat) {
  auto bytes = serialize(train_cbow(cooccurrence_corpus(), tiny()));
  bytes[0] = 'X';
  try {
    deserialize_entity_model(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("TPE1"), std::string::npos) << e.what();
  }
}

TEST(EntityModelIo, TruncatedAndVersionErrors) {
  auto bytes = serialize(train_cbow(cooccurrence_corpus(), tiny()));
  EXPECT_THROW(deserialize_entity_model(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(deserialize_entity_model(bytes.substr(0, 10)), FormatError);
  EXPECT_THROW(deserialize_entity_model(bytes + "x"), FormatError);
  auto v2 = bytes;
  v2[4] = 2;
  EXPECT_THROW(deserialize_entity_model(v2), FormatError);
}
