#include <gtest/gtest.h>

#include <cmath>

#include "tp/error.hpp"
#include "tp/report.hpp"
#include "tp/util.hpp"

using namespace tp;

namespace {

TpRecord rec(const std::string& id, std::optional<double> tpe, std::optional<double> tpd, const char* ach = "H",
             int year = 2000) {
  TpRecord r;
  r.doc_id = id;
  r.tpe = tpe;
  r.tpd = tpd;
  r.ach = AchLabel::parse(ach);
  r.year = year;
  r.entity_count = tpe ? 1 : 0;
  if (!tpe) r.tpe_absence = Absence::NoEntities;
  if (!tpd) r.tpd_absence = Absence::NoTokens;
  return r;
}

PhaseGroups phases(double a, double b, double c, double d) { return {{{a}, {b}, {c}, {d}}}; }

// Textbook Pearson over long doubles.
double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Rank of v: 1 + (#smaller) + (#equal - 1) / 2.
std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r;
  for (double a : v) {
    double less = 0, equal = 0;
    for (double b : v) {
      if (b < a) ++less;
      if (b == a) ++equal;
    }
    r.push_back(1 + less + (equal - 1) / 2);
  }
  return r;
}

}  // namespace

TEST(GroupStats, PopulationStatistics) {
  auto g = group_stats("2001", {0.0, 0.2});
  EXPECT_EQ(g.count, 2);
  EXPECT_DOUBLE_EQ(g.mean, 0.1);
  EXPECT_DOUBLE_EQ(g.std_dev, 0.1);
  EXPECT_EQ(group_stats("x", {0.3}).std_dev, 0.0);
  EXPECT_THROW(group_stats("x", {}), Error);
  auto same = group_stats("x", {0.1, 0.1, 0.1});
  EXPECT_GE(same.mean, same.min);
  EXPECT_LE(same.mean, same.max);
}

TEST(Phase, DetectsPhases) {
  Document d;
  d.pub_types = {"Clinical Trial, Phase II"};
  EXPECT_EQ(clinical_phase(d), 2);
  d.pub_types = {"Clinical Trials, Phase IV", "Clinical Trial, Phase I"};
  EXPECT_EQ(clinical_phase(d), 4);
  d.pub_types = {"Clinical Trial"};
  EXPECT_FALSE(clinical_phase(d));
}

TEST(Phase, ReportFlags) {
  auto r = phase_report(phases(0.1, 0.2, 0.3, 0.4));
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.positive);
  r = phase_report(phases(0.3, 0.2, 0.3, 0.4));
  EXPECT_FALSE(r.monotone);
  r = phase_report(phases(-0.1, 0.2, 0.3, 0.4));
  EXPECT_TRUE(r.monotone);
  EXPECT_FALSE(r.positive);
  r = phase_report(phases(0.1, 0.2, 0.2, 0.4));
  EXPECT_FALSE(r.monotone);
}

TEST(Phase, MissingPhaseNamed) {
  PhaseGroups g = {{{0.1}, {0.2}, {}, {0.4}}};
  try {
    phase_report(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Phase III"), std::string::npos) << e.what();
  }
}

TEST(Phase, GroupsJoinById) {
  Corpus c;
  for (int k = 1; k <= 4; ++k) {
    Document d;
    d.id = "p" + std::to_string(k);
    d.pub_types = {"Clinical Trial, Phase " + std::string(k == 1 ? "I" : k == 2 ? "II" : k == 3 ? "III" : "IV")};
    c.documents.push_back(d);
  }
  Document other;
  other.id = "x";
  c.documents.push_back(other);
  std::vector<TpRecord> rs = {rec("p4", 0.4, 0.1), rec("p1", 0.1, std::nullopt), rec("x", 0.9, 0.9),
                              rec("p2", 0.2, 0.2), rec("p3", 0.3, 0.3)};
  auto g = group_by_phase(c, rs, ScoreLevel::Tpe);
  EXPECT_EQ(g[0], std::vector<double>{0.1});
  EXPECT_EQ(g[3], std::vector<double>{0.4});
  auto t = group_by_phase(c, rs, ScoreLevel::Tpd);
  EXPECT_TRUE(t[0].empty());
}

TEST(Ach, OrderingWithTies) {
  std::vector<TpRecord> rs = {rec("1", -0.2, 0, "C"), rec("2", 0.1, 0, "AC"), rec("3", 0.1, 0, "A"),
                              rec("4", 0.3, 0, "H"), rec("5", 0.9, 0, "none")};
  auto r = ach_report(rs, ScoreLevel::Tpe);
  EXPECT_EQ(r.ordering, "C < A = AC < H");
  ASSERT_EQ(r.ties.size(), 3u);
  EXPECT_TRUE(r.ties[1]);
  EXPECT_FALSE(r.ties[0]);
}

TEST(Ach, SingleLabelThrows) {
  EXPECT_THROW(ach_report({rec("1", 0.1, 0, "H"), rec("2", 0.2, 0, "H")}, ScoreLevel::Tpe), Error);
}

TEST(Density, BimodalHasTwoPeaks) {
  Rng rng(51);
  std::vector<double> v;
  for (int i = 0; i < 2000; ++i) v.push_back((i % 2 ? 0.25 : -0.25) + rng.uniform(-0.02, 0.02));
  auto r = density(v, 40);
  ASSERT_EQ(r.peaks.size(), 2u);
  EXPECT_NEAR(r.peaks[0], -0.25, 0.05);
  EXPECT_NEAR(r.peaks[1], 0.25, 0.05);
}

TEST(Density, SingleBinSinglePeak) {
  auto r = density(std::vector<double>(10, 0.51), 40);
  ASSERT_EQ(r.peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(r.peaks[0], 0.525);
  auto edge = density(std::vector<double>(3, 1.0), 40);
  ASSERT_EQ(edge.peaks.size(), 1u);
  EXPECT_EQ(edge.histogram.counts.back(), 3);
}

TEST(Density, CountConservationAndNormalisation) {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v;
    const int n = 1 + static_cast<int>(rng.below(500));
    for (int i = 0; i < n; ++i) v.push_back(rng.uniform(-1, 1));
    if (trial % 5 == 0) v.push_back(1.0), v.push_back(-1.0);
    const int bins = 2 + static_cast<int>(rng.below(99));
    auto r = density(v, bins);
    std::int64_t total = 0;
    double area = 0;
    for (std::size_t i = 0; i < r.histogram.counts.size(); ++i) {
      total += r.histogram.counts[i];
      area += r.histogram.density[i] * (r.histogram.bin_edges[i + 1] - r.histogram.bin_edges[i]);
    }
    ASSERT_EQ(total, static_cast<std::int64_t>(v.size()));
    ASSERT_NEAR(area, 1.0, 1e-12);
  }
  EXPECT_THROW(density(std::vector<double>{}, 10), Error);
  EXPECT_THROW(density(std::vector<double>{1.5}, 10), Error);
  EXPECT_THROW(density(std::vector<double>{0.5}, 1), Error);
}

TEST(Density, RecordsSkipAbsentScores) {
  auto r = density({rec("a", 0.1, std::nullopt), rec("b", std::nullopt, 0.2), rec("c", 0.3, 0.3)}, ScoreLevel::Tpe, 10);
  std::int64_t total = 0;
  for (auto c : r.histogram.counts) total += c;
  EXPECT_EQ(total, 2);
}

TEST(Correlation, Examples) {
  auto c = correlation({{1, 2}, {2, 4}, {3, 6}});
  EXPECT_DOUBLE_EQ(c.pearson, 1.0);
  EXPECT_DOUBLE_EQ(c.spearman, 1.0);
  EXPECT_DOUBLE_EQ(correlation({{1, 6}, {2, 4}, {3, 2}}).pearson, -1.0);
  EXPECT_THROW(correlation({{1, 1}, {1, 2}, {1, 3}}), Error);
  EXPECT_THROW(correlation({{1, 1}, {2, 2}}), Error);
}

TEST(Correlation, AverageRanks) {
  EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Correlation, MatchesBruteForceOracle) {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(-1, 1);
      double b = 0.6 * a + rng.uniform(-0.5, 0.5);
      if (trial % 2) {  // coarse values force ties
        a = std::round(a * 10) / 10;
        b = std::round(b * 10) / 10;
      }
      pairs.emplace_back(a, b);
      x.push_back(a);
      y.push_back(b);
    }
    auto c = correlation(pairs);
    ASSERT_NEAR(c.pearson, oracle_pearson(x, y), 1e-12);
    ASSERT_NEAR(c.spearman, oracle_pearson(oracle_ranks(x), oracle_ranks(y)), 1e-12);
  }
}

TEST(Correlation, TransformInvariance) {
  Rng rng(54);
  std::vector<std::pair<double, double>> pairs, affine, monotone;
  for (int i = 0; i < 300; ++i) {
    double a = rng.uniform(-1, 1), b = a * a + rng.uniform(-0.3, 0.3);
    pairs.emplace_back(a, b);
    affine.emplace_back(3 * a + 7, 0.5 * b - 2);
    monotone.emplace_back(std::exp(3 * a), std::atan(b) + b * b * b);
  }
  auto base = correlation(pairs);
  EXPECT_NEAR(correlation(affine).pearson, base.pearson, 1e-12);
  EXPECT_NEAR(correlation(monotone).spearman, base.spearman, 1e-12);
}

TEST(Trend, YearStatistics) {
  auto t = yearly_trend({rec("a", 0.0, 0, "H", 2001), rec("b", 0.2, 0, "H", 2001), rec("c", 0.5, 0, "H", 0),
                         rec("d", 0.4, 0, "H", 1999)},
                        ScoreLevel::Tpe);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].group_key, "1999");
  EXPECT_EQ(t[0].std_dev, 0.0);
  EXPECT_EQ(t[1].group_key, "2001");
  EXPECT_DOUBLE_EQ(t[1].mean, 0.1);
  EXPECT_DOUBLE_EQ(t[1].std_dev, 0.1);
}

TEST(Trend, YearOffsetShiftsKeysOnly) {
  Rng rng(55);
  std::vector<TpRecord> rs, shifted;
  for (int i = 0; i < 200; ++i) {
    auto r = rec(std::to_string(i), rng.uniform(-1, 1), rng.uniform(-1, 1), "H", 1990 + static_cast<int>(rng.below(20)));
    rs.push_back(r);
    r.year += 7;
    shifted.push_back(r);
  }
  auto a = yearly_trend(rs, ScoreLevel::Tpd), b = yearly_trend(shifted, ScoreLevel::Tpd);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::stoi(b[i].group_key), std::stoi(a[i].group_key) + 7);
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].std_dev, b[i].std_dev);
    EXPECT_EQ(a[i].count, b[i].count);
  }
}

TEST(Grid, Examples) {
  auto g = heatmap_grid({{0, 0}, {0, 0}, {0, 0}, {0, 0}}, 2, 2);
  EXPECT_EQ(g.at(1, 1), 4);
  EXPECT_EQ(g.total(), 4);
  auto corner = heatmap_grid({{1, 1}, {-1, -1}}, 10, 10);
  EXPECT_EQ(corner.at(9, 9), 1);
  EXPECT_EQ(corner.at(0, 0), 1);
  EXPECT_EQ(bin_index(1.0, 40), 39);
  EXPECT_EQ(bin_index(-1.0, 40), 0);
  EXPECT_THROW(bin_index(1.0000001, 40), Error);
}

TEST(Grid, ConservesCounts) {
  Rng rng(56);
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 1000; ++i) pairs.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
  EXPECT_EQ(heatmap_grid(pairs, 17, 5).total(), 1000);
}

TEST(Renderers, PureFunctionsOfInput) {
  Rng rng(57);
  std::vector<TpRecord> rs;
  const char* labels[] = {"A", "C", "AC", "H", "AH", "CH", "ACH"};
  for (int i = 0; i < 300; ++i)
    rs.push_back(rec(std::to_string(i), rng.uniform(-1, 1), rng.uniform(-1, 1), labels[i % 7], 2000 + i % 5));
  for (int pass = 0; pass < 2; ++pass) {
    static std::vector<std::string> first;
    auto d = density(rs, ScoreLevel::Tpe, 40);
    auto a = ach_report(rs, ScoreLevel::Tpd);
    auto t = yearly_trend(rs, ScoreLevel::Tpe);
    auto g = heatmap_grid(paired_scores(rs), 20, 20);
    std::vector<std::string> out = {density_csv(d), peaks_csv(d), density_svg(d, ScoreLevel::Tpe),
                                    ach_csv(a, ScoreLevel::Tpd), ach_svg(a, ScoreLevel::Tpd),
                                    trend_csv(t, ScoreLevel::Tpe), trend_svg(t, ScoreLevel::Tpe),
                                    grid_csv(g), grid_svg(g), correlation_csv(correlation(paired_scores(rs)))};
    if (pass == 0) first = out;
    else EXPECT_EQ(out, first);
  }
}

TEST(Renderers, PhaseCsvFlags) {
  auto csv = phase_csv(phase_report(phases(0.1, 0.2, 0.3, 0.4)), ScoreLevel::Tpe);
  EXPECT_NE(csv.find("# monotone=true positive=true"), std::string::npos);
  EXPECT_NE(csv.find("tpe,Phase I,1,"), std::string::npos);
  auto svg = phase_svg(phase_report(phases(0.1, 0.2, 0.3, 0.4)), ScoreLevel::Tpe);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}
