#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tp/corpus.hpp"
#include "tp/score.hpp"

namespace tp {

enum class ScoreLevel { Tpe, Tpd };

std::string_view score_level_name(ScoreLevel level);
ScoreLevel parse_score_level(std::string_view s);
std::optional<double> score_of(const TpRecord& r, ScoreLevel level);

// Population statistics over one group.
struct GroupStats {
  std::string group_key;
  std::int64_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Throws on an empty value set.
GroupStats group_stats(std::string key, const std::vector<double>& values);

// ---- clinical trial phases ----

// 1..4 for "Clinical Trial, Phase I".."Clinical Trial, Phase IV" (the plural
// "Clinical Trials" spelling is accepted too); nullopt otherwise. A document
// tagged with several phases reports the highest.
std::optional<int> clinical_phase(const Document& doc);

using PhaseGroups = std::array<std::vector<double>, 4>;

// Collects the scores of phase-tagged documents. records are joined to the
// corpus by document id.
PhaseGroups group_by_phase(const Corpus& corpus, const std::vector<TpRecord>& records, ScoreLevel level);

struct PhaseReport {
  std::array<GroupStats, 4> phases;
  bool monotone = false;  // mean(I) < mean(II) < mean(III) < mean(IV)
  bool positive = false;  // every phase mean > 0
};

// Throws Error naming the first empty phase.
PhaseReport phase_report(const PhaseGroups& groups);

// ---- ACH categories ----

struct AchReport {
  std::vector<GroupStats> groups;  // ascending by mean, ties by label
  // ties[i] is true when groups[i] and groups[i + 1] have equal means.
  std::vector<bool> ties;
  // e.g. "C < AC = A < H"
  std::string ordering;
};

// Groups scored records by label ("none" excluded). Throws when fewer than
// two labels are present.
AchReport ach_report(const std::vector<TpRecord>& records, ScoreLevel level);

// ---- density ----

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::vector<double> density;
};

struct DensityReport {
  Histogram histogram;
  std::vector<double> peaks;  // bin centres of strict local maxima, ascending
};

// Uniform bins over [-1, 1]; the last bin is closed on the right. Bins
// outside the range count as zero density when testing edge bins for peaks.
DensityReport density(const std::vector<double>& values, int bins);
DensityReport density(const std::vector<TpRecord>& records, ScoreLevel level, int bins);

// ---- correlation ----

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
  std::int64_t n = 0;
};

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

Correlation correlation(const std::vector<std::pair<double, double>>& pairs);

// Pairs (tpe, tpd) of records that carry both scores.
std::vector<std::pair<double, double>> paired_scores(const std::vector<TpRecord>& records);

// ---- time ----

std::vector<GroupStats> yearly_trend(const std::vector<TpRecord>& records, ScoreLevel level);

struct Grid {
  int x_bins = 0;
  int y_bins = 0;
  std::vector<std::int64_t> counts;  // row-major: counts[y * x_bins + x]

  std::int64_t at(int x, int y) const { return counts[static_cast<std::size_t>(y * x_bins + x)]; }
  std::int64_t total() const;
};

// Counts over [-1, 1]^2 with right-closed final bins.
Grid heatmap_grid(const std::vector<std::pair<double, double>>& pairs, int x_bins, int y_bins);

// Bin index of x in `bins` uniform bins over [-1, 1]. Throws outside the range.
int bin_index(double x, int bins);

// ---- CSV renderings ----

std::string stats_csv(const std::vector<GroupStats>& groups, const std::string& key_header);
std::string phase_csv(const PhaseReport& r, ScoreLevel level);
std::string ach_csv(const AchReport& r, ScoreLevel level);
std::string density_csv(const DensityReport& r);
std::string peaks_csv(const DensityReport& r);
std::string correlation_csv(const Correlation& c);
std::string trend_csv(const std::vector<GroupStats>& years, ScoreLevel level);
std::string grid_csv(const Grid& g);

// ---- SVG renderings ----

std::string phase_svg(const PhaseReport& r, ScoreLevel level);
std::string ach_svg(const AchReport& r, ScoreLevel level);
std::string density_svg(const DensityReport& r, ScoreLevel level);
std::string trend_svg(const std::vector<GroupStats>& years, ScoreLevel level);
std::string grid_svg(const Grid& g);

}  // namespace tp
