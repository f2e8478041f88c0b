#include "tp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

const std::array<const char*, 4> kPhaseNames = {"Phase I", "Phase II", "Phase III", "Phase IV"};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<double> level_values(const std::vector<TpRecord>& records, ScoreLevel level) {
  std::vector<double> v;
  for (const auto& r : records)
    if (auto s = score_of(r, level)) v.push_back(*s);
  return v;
}

double pearson_of(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::string_view score_level_name(ScoreLevel level) { return level == ScoreLevel::Tpe ? "tpe" : "tpd"; }

ScoreLevel parse_score_level(std::string_view s) {
  if (s == "tpe") return ScoreLevel::Tpe;
  if (s == "tpd") return ScoreLevel::Tpd;
  throw Error("unknown score level \"" + std::string(s) + "\" (expected tpe or tpd)");
}

std::optional<double> score_of(const TpRecord& r, ScoreLevel level) {
  return level == ScoreLevel::Tpe ? r.tpe : r.tpd;
}

GroupStats group_stats(std::string key, const std::vector<double>& values) {
  if (values.empty()) throw Error("statistics of an empty group \"" + key + "\"");
  GroupStats g;
  g.group_key = std::move(key);
  g.count = static_cast<std::int64_t>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  g.min = *lo;
  g.max = *hi;
  const double n = static_cast<double>(values.size());
  g.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  g.mean = std::clamp(g.mean, g.min, g.max);
  double ss = 0.0;
  for (double v : values) ss += (v - g.mean) * (v - g.mean);
  g.std_dev = std::sqrt(ss / n);
  return g;
}

std::optional<int> clinical_phase(const Document& doc) {
  std::optional<int> best;
  for (const auto& t : doc.pub_types) {
    auto n = normalize_space(t);
    std::string_view rest;
    for (std::string_view prefix : {"Clinical Trial, Phase ", "Clinical Trials, Phase "}) {
      if (n.size() > prefix.size() && std::string_view(n).substr(0, prefix.size()) == prefix) {
        rest = std::string_view(n).substr(prefix.size());
        break;
      }
    }
    int p = 0;
    if (rest == "I") p = 1;
    else if (rest == "II") p = 2;
    else if (rest == "III") p = 3;
    else if (rest == "IV") p = 4;
    if (p && (!best || p > *best)) best = p;
  }
  return best;
}

PhaseGroups group_by_phase(const Corpus& corpus, const std::vector<TpRecord>& records, ScoreLevel level) {
  std::unordered_map<std::string, int> phase;
  for (const auto& d : corpus.documents)
    if (auto p = clinical_phase(d)) phase.emplace(d.id, *p);
  PhaseGroups g;
  for (const auto& r : records) {
    auto it = phase.find(r.doc_id);
    if (it == phase.end()) continue;
    if (auto s = score_of(r, level)) g[static_cast<std::size_t>(it->second - 1)].push_back(*s);
  }
  return g;
}

PhaseReport phase_report(const PhaseGroups& groups) {
  PhaseReport r;
  for (std::size_t i = 0; i < 4; ++i) {
    if (groups[i].empty()) throw Error(std::string("phase report: no scored papers in ") + kPhaseNames[i]);
    r.phases[i] = group_stats(kPhaseNames[i], groups[i]);
  }
  r.monotone = true;
  r.positive = true;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i > 0 && !(r.phases[i - 1].mean < r.phases[i].mean)) r.monotone = false;
    if (!(r.phases[i].mean > 0.0)) r.positive = false;
  }
  return r;
}

AchReport ach_report(const std::vector<TpRecord>& records, ScoreLevel level) {
  std::map<std::string, std::vector<double>> by_label;
  for (const auto& r : records) {
    if (r.ach.none()) continue;
    if (auto s = score_of(r, level)) by_label[r.ach.str()].push_back(*s);
  }
  if (by_label.size() < 2)
    throw Error("ACH report: need at least two labels with scored papers, found " +
                std::to_string(by_label.size()));
  AchReport out;
  for (const auto& [label, values] : by_label) out.groups.push_back(group_stats(label, values));
  std::stable_sort(out.groups.begin(), out.groups.end(),
                   [](const GroupStats& a, const GroupStats& b) { return a.mean < b.mean; });
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    if (i > 0) {
      const bool tie = out.groups[i - 1].mean == out.groups[i].mean;
      out.ties.push_back(tie);
      out.ordering += tie ? " = " : " < ";
    }
    out.ordering += out.groups[i].group_key;
  }
  return out;
}

int bin_index(double x, int bins) {
  if (!(x >= -1.0 && x <= 1.0)) throw Error("value " + num(x) + " outside [-1, 1]");
  const double width = 2.0 / bins;
  auto i = static_cast<int>(std::floor((x + 1.0) / width));
  return std::clamp(i, 0, bins - 1);
}

DensityReport density(const std::vector<double>& values, int bins) {
  if (bins < 2) throw Error("density: need at least 2 bins");
  if (values.empty()) throw Error("density: no scored records");
  DensityReport r;
  auto& h = r.histogram;
  const double width = 2.0 / bins;
  for (int i = 0; i <= bins; ++i) h.bin_edges.push_back(i == bins ? 1.0 : -1.0 + width * i);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_index(v, bins))];
  const double n = static_cast<double>(values.size());
  for (auto c : h.counts) h.density.push_back(static_cast<double>(c) / (n * width));
  for (int i = 0; i < bins; ++i) {
    const double d = h.density[static_cast<std::size_t>(i)];
    const double left = i > 0 ? h.density[static_cast<std::size_t>(i - 1)] : 0.0;
    const double right = i + 1 < bins ? h.density[static_cast<std::size_t>(i + 1)] : 0.0;
    if (d > left && d > right) r.peaks.push_back(-1.0 + width * (i + 0.5));
  }
  return r;
}

DensityReport density(const std::vector<TpRecord>& records, ScoreLevel level, int bins) {
  return density(level_values(records, level), bins);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

Correlation correlation(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw Error("correlation: need at least 3 pairs");
  std::vector<double> x, y;
  for (const auto& [a, b] : pairs) {
    x.push_back(a);
    y.push_back(b);
  }
  Correlation c;
  c.n = static_cast<std::int64_t>(pairs.size());
  c.pearson = pearson_of(x, y);
  c.spearman = pearson_of(average_ranks(x), average_ranks(y));
  return c;
}

std::vector<std::pair<double, double>> paired_scores(const std::vector<TpRecord>& records) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : records)
    if (r.tpe && r.tpd) out.emplace_back(*r.tpe, *r.tpd);
  return out;
}

std::vector<GroupStats> yearly_trend(const std::vector<TpRecord>& records, ScoreLevel level) {
  std::map<int, std::vector<double>> by_year;
  for (const auto& r : records) {
    if (r.year <= 0) continue;
    if (auto s = score_of(r, level)) by_year[r.year].push_back(*s);
  }
  std::vector<GroupStats> out;
  for (const auto& [year, values] : by_year) out.push_back(group_stats(std::to_string(year), values));
  return out;
}

std::int64_t Grid::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

Grid heatmap_grid(const std::vector<std::pair<double, double>>& pairs, int x_bins, int y_bins) {
  if (x_bins < 1 || y_bins < 1) throw Error("heatmap: need at least one bin per axis");
  Grid g;
  g.x_bins = x_bins;
  g.y_bins = y_bins;
  g.counts.assign(static_cast<std::size_t>(x_bins) * static_cast<std::size_t>(y_bins), 0);
  for (const auto& [x, y] : pairs) {
    const auto xi = bin_index(x, x_bins);
    const auto yi = bin_index(y, y_bins);
    ++g.counts[static_cast<std::size_t>(yi * x_bins + xi)];
  }
  return g;
}

std::string stats_csv(const std::vector<GroupStats>& groups, const std::string& key_header) {
  std::string s = key_header + ",count,mean,std_dev,min,max\n";
  for (const auto& g : groups) {
    s += g.group_key + ',' + std::to_string(g.count) + ',' + num(g.mean) + ',' + num(g.std_dev) +
         ',' + num(g.min) + ',' + num(g.max) + '\n';
  }
  return s;
}

std::string phase_csv(const PhaseReport& r, ScoreLevel level) {
  std::string s = "level,phase,count,mean,std_dev,min,max\n";
  for (const auto& g : r.phases) {
    s += std::string(score_level_name(level)) + ',' + g.group_key + ',' + std::to_string(g.count) +
         ',' + num(g.mean) + ',' + num(g.std_dev) + ',' + num(g.min) + ',' + num(g.max) + '\n';
  }
  s += "# monotone=" + std::string(r.monotone ? "true" : "false") +
       " positive=" + std::string(r.positive ? "true" : "false") + '\n';
  return s;
}

std::string ach_csv(const AchReport& r, ScoreLevel level) {
  std::string s = "level,rank,label,count,mean,std_dev,min,max\n";
  for (std::size_t i = 0; i < r.groups.size(); ++i) {
    const auto& g = r.groups[i];
    s += std::string(score_level_name(level)) + ',' + std::to_string(i + 1) + ',' + g.group_key + ',' +
         std::to_string(g.count) + ',' + num(g.mean) + ',' + num(g.std_dev) + ',' + num(g.min) + ',' +
         num(g.max) + '\n';
  }
  s += "# ordering=" + r.ordering + '\n';
  return s;
}

std::string density_csv(const DensityReport& r) {
  const auto& h = r.histogram;
  std::string s = "bin_lo,bin_hi,count,density\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    s += num(h.bin_edges[i]) + ',' + num(h.bin_edges[i + 1]) + ',' + std::to_string(h.counts[i]) + ',' +
         num(h.density[i]) + '\n';
  return s;
}

std::string peaks_csv(const DensityReport& r) {
  std::string s = "peak\n";
  for (double p : r.peaks) s += num(p) + '\n';
  return s;
}

std::string correlation_csv(const Correlation& c) {
  return "n,pearson,spearman\n" + std::to_string(c.n) + ',' + num(c.pearson) + ',' + num(c.spearman) + '\n';
}

std::string trend_csv(const std::vector<GroupStats>& years, ScoreLevel level) {
  std::string s = "level,year,count,mean,std_dev,min,max\n";
  for (const auto& g : years)
    s += std::string(score_level_name(level)) + ',' + g.group_key + ',' + std::to_string(g.count) + ',' +
         num(g.mean) + ',' + num(g.std_dev) + ',' + num(g.min) + ',' + num(g.max) + '\n';
  return s;
}

std::string grid_csv(const Grid& g) {
  std::string s = "x_lo,x_hi,y_lo,y_hi,count\n";
  const double wx = 2.0 / g.x_bins, wy = 2.0 / g.y_bins;
  for (int y = 0; y < g.y_bins; ++y)
    for (int x = 0; x < g.x_bins; ++x)
      s += num(-1.0 + wx * x) + ',' + num(x + 1 == g.x_bins ? 1.0 : -1.0 + wx * (x + 1)) + ',' +
           num(-1.0 + wy * y) + ',' + num(y + 1 == g.y_bins ? 1.0 : -1.0 + wy * (y + 1)) + ',' +
           std::to_string(g.at(x, y)) + '\n';
  return s;
}

}  // namespace tp
