#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tp/error.hpp"
#include "tp/score.hpp"
#include "tp/util.hpp"

using namespace tp;

namespace {

const std::string kHumansTree = "B01.050.150.900.649.313.988.400.112.400.400";

EntityModel hand_model(const std::vector<std::pair<std::string, Vec>>& rows) {
  EntityModel m;
  m.hyperparams.dim = static_cast<int>(rows.front().second.size());
  m.hyperparams.buckets = 0;
  m.input = Matrix<float>(rows.size(), rows.front().second.size());
  m.output = Matrix<float>(rows.size(), rows.front().second.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.words.push_back(rows[i].first);
    m.counts.push_back(1);
    for (std::size_t k = 0; k < rows[i].second.size(); ++k)
      m.input.row(i)[k] = static_cast<float>(rows[i].second[k]);
  }
  m.reindex();
  return m;
}

double oracle_cosine(const Vec& a, const Vec& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(ab / std::sqrt(aa * bb));
}

Vec random_vec(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

struct Fixture {
  EntityDictionary dict;
  MeshVocabulary vocab;
  EntityModel em;
  DocModel dm;
  AxisVector ea, da;

  Fixture() {
    dict.add("aspirin", "CHEM:aspirin", EntityType::Drug);
    dict.add("brca1", "GENE:672", EntityType::Gene);
    vocab.add({"Humans", "D3", {kHumansTree}});
    vocab.add({"Mice", "D1", {"B01.050.1"}});
    em = hand_model({{"CHEM:aspirin", {2, 2}}, {"GENE:672", {1, -1}}});
    ea = make_axis(AxisLevel::Entity, {0, 0}, {1, 1}, 1, 1);
    dm.hyperparams.dim = 2;
    dm.hyperparams.infer_epochs = 5;
    dm.hyperparams.lr = 0.05;
    dm.hyperparams.negatives = 1;
    dm.hyperparams.window = 1;
    dm.words = {"trial", "mouse"};
    dm.counts = {3, 3};
    dm.word_vectors = Matrix<float>(2, 2);
    dm.output = Matrix<float>(2, 2);
    dm.word_vectors.row(0)[0] = 0.3f;
    dm.word_vectors.row(1)[1] = 0.3f;
    dm.output.row(0)[0] = 0.5f;
    dm.output.row(1)[1] = 0.5f;
    dm.doc_ids = {"known"};
    dm.doc_vectors = Matrix<float>(1, 2);
    dm.doc_vectors.row(0)[0] = 0.5f;
    dm.doc_vectors.row(0)[1] = -0.5f;
    dm.reindex();
    da = make_axis(AxisLevel::Document, {0, 1}, {1, 0}, 1, 1);
  }
  ScoreInputs inputs() const { return {dict, vocab, em, dm, ea, da}; }
};

Document paper(const std::string& id, const std::string& title, std::vector<std::string> mesh = {}) {
  Document d;
  d.id = id;
  d.title = title;
  d.mesh_terms = std::move(mesh);
  return d;
}

}  // namespace

TEST(PaperVector, SumOverUniqueEntities) {
  auto m = hand_model({{"e1", {1, 0}}, {"e2", {0, 1}}});
  EXPECT_EQ(paper_vector_entity(m, {"e1", "e2"}), (Vec{1, 1}));
  EXPECT_EQ(paper_vector_entity(m, {"e1", "e1"}), (Vec{1, 0}));
  EXPECT_THROW(paper_vector_entity(m, {}), NoInformation);
}

TEST(TpProject, EdgeCasesExact) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec a = random_vec(rng, 2 + rng.below(49));
    Vec neg = a;
    for (auto& x : neg) x = -x;
    ASSERT_EQ(tp_project(a, a), 1.0);
    ASSERT_EQ(tp_project(neg, a), -1.0);
  }
  EXPECT_EQ(tp_project({1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(tp_project({3, 4, 0}, {-4, 3, 7}), 0.0);
  EXPECT_EQ(tp_project({1, 0}, {1, 1}), 0.7071067811865475);
}

TEST(TpProject, MatchesBruteForceOracle) {
  Rng rng(32);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + rng.below(49);
    Vec v = random_vec(rng, dim), a = random_vec(rng, dim);
    const double c = tp_project(v, a);
    ASSERT_NEAR(c, oracle_cosine(v, a), 1e-12);
    ASSERT_GE(c, -1.0);
    ASSERT_LE(c, 1.0);
  }
}

TEST(TpProject, ScaleInvarianceAndAntipodality) {
  Rng rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 2 + rng.below(49);
    Vec v = random_vec(rng, dim), a = random_vec(rng, dim);
    const double c = rng.uniform(1e-3, 1e3);
    Vec cv = v, ca = a, nv = v;
    for (auto& x : cv) x *= c;
    for (auto& x : ca) x *= c;
    for (auto& x : nv) x = -x;
    const double base = tp_project(v, a);
    ASSERT_NEAR(tp_project(cv, a), base, 1e-12);
    ASSERT_NEAR(tp_project(v, ca), base, 1e-12);
    ASSERT_EQ(tp_project(nv, a), -base);
  }
}

TEST(TpProject, Errors) {
  EXPECT_THROW(tp_project({0, 0}, {1, 0}), Error);
  EXPECT_THROW(tp_project({1, 0}, {0, 0}), Error);
  EXPECT_THROW(tp_project({1, 0, 0}, {1, 0}), DimensionMismatch);
  EXPECT_NO_THROW(tp_project({1e200, 1e200}, {1e200, 0}));
  EXPECT_NEAR(tp_project({1e-200, 1e-200}, {1e-200, 0}), 0.7071067811865475, 1e-15);
}

TEST(ScoreCorpus, ParallelEntitiesScoreOne) {
  Fixture f;
  Corpus c;
  c.documents = {paper("p1", "aspirin given", {"Humans"})};
  auto r = score_corpus(c, f.inputs());
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].tpe, 1.0);
  EXPECT_EQ(r[0].entity_count, 1);
  EXPECT_EQ(r[0].ach.str(), "H");
}

TEST(ScoreCorpus, LevelsIndependent) {
  Fixture f;
  Corpus c;
  c.documents = {paper("p2", "mouse trial"), paper("known", "nothing"), paper("p3", "unrelated words")};
  auto r = score_corpus(c, f.inputs());
  EXPECT_FALSE(r[0].tpe);
  EXPECT_EQ(r[0].tpe_absence, Absence::NoEntities);
  EXPECT_TRUE(r[0].tpd);
  EXPECT_EQ(r[1].tpd, 1.0);  // trained vector (0.5, -0.5) is parallel to the axis
  EXPECT_FALSE(r[2].tpd);
  EXPECT_EQ(r[2].tpd_absence, Absence::NoTokens);
}

TEST(ScoreCorpus, AxisScaleDoesNotChangeScores) {
  Fixture f;
  Corpus c;
  c.documents = {paper("a", "aspirin brca1"), paper("b", "brca1 mouse trial")};
  auto base = score_corpus(c, f.inputs());
  for (auto& x : f.ea.axis) x *= 10;
  auto scaled = score_corpus(c, f.inputs());
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(*scaled[i].tpe, *base[i].tpe, 1e-15);
}

TEST(ScoreCorpus, DeterministicAcrossThreadCounts) {
  Fixture f;
  Corpus c;
  Rng rng(34);
  const char* words[] = {"aspirin", "brca1", "mouse", "trial", "other"};
  for (int i = 0; i < 50; ++i) {
    std::string t;
    for (int k = 0; k < 4; ++k) t += std::string(words[rng.below(5)]) + " ";
    c.documents.push_back(paper("d" + std::to_string(i), t, {"Mice"}));
  }
  auto one = score_corpus(c, f.inputs(), 1);
  EXPECT_EQ(score_corpus(c, f.inputs(), 1), one);
  EXPECT_EQ(score_corpus(c, f.inputs(), 4), one);
  for (const auto& r : one) {
    if (r.tpe) EXPECT_LE(std::abs(*r.tpe), 1.0);
    if (r.tpd) EXPECT_LE(std::abs(*r.tpd), 1.0);
  }
}

TEST(ScoreCorpus, DimensionMismatchDetected) {
  Fixture f;
  f.da = make_axis(AxisLevel::Document, {0, 0, 1}, {1, 0, 0}, 1, 1);
  Corpus c;
  c.documents = {paper("a", "aspirin")};
  EXPECT_THROW(score_corpus(c, f.inputs()), DimensionMismatch);
}

TEST(ScoresCsv, RoundTrip) {
  Fixture f;
  Corpus c;
  c.documents = {paper("a", "aspirin trial", {"Humans", "Mice"}), paper("b", "nothing"), paper("c", "brca1")};
  c.documents[0].year = 2001;
  auto r = score_corpus(c, f.inputs());
  auto csv = scores_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "doc_id,tpe,tpd,ach,year,entity_count");
  std::istringstream in(csv);
  EXPECT_EQ(read_scores(in), r);
}
