// Minimal self-contained SVG charts for the report subcommands.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "tp/report.hpp"

namespace tp {

namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 50;

std::string f(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const std::string& title, double ymin, double ymax) : ymin_(ymin), ymax_(ymax) {
    if (ymax_ <= ymin_) ymax_ = ymin_ + 1.0;
    s_ = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(kWidth) + "\" height=\"" + f(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 20, title, "middle", 14);
    line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, "black");
    line(kMargin, kMargin, kMargin, kHeight - kMargin, "black");
    text(kMargin - 4, y(ymax_) + 4, num(ymax_), "end");
    text(kMargin - 4, y(ymin_) + 4, num(ymin_), "end");
    if (ymin_ < 0 && ymax_ > 0) line(kMargin, y(0), kWidth - kMargin, y(0), "#999");
  }

  double y(double v) const {
    return kHeight - kMargin - (v - ymin_) / (ymax_ - ymin_) * (kHeight - 2 * kMargin);
  }
  static double x(double frac) { return kMargin + frac * (kWidth - 2 * kMargin); }

  void line(double x1, double y1, double x2, double y2, const std::string& color) {
    s_ += "<line x1=\"" + f(x1) + "\" y1=\"" + f(y1) + "\" x2=\"" + f(x2) + "\" y2=\"" + f(y2) +
          "\" stroke=\"" + color + "\"/>\n";
  }
  void rect(double x0, double y0, double w, double h, const std::string& color) {
    if (h < 0) {
      y0 += h;
      h = -h;
    }
    s_ += "<rect x=\"" + f(x0) + "\" y=\"" + f(y0) + "\" width=\"" + f(w) + "\" height=\"" + f(h) +
          "\" fill=\"" + color + "\"/>\n";
  }
  void text(double x0, double y0, const std::string& t, const char* anchor = "start", int size = 11) {
    s_ += "<text x=\"" + f(x0) + "\" y=\"" + f(y0) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
          std::to_string(size) + "\">" + escape(t) + "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    s_ += "<polyline fill=\"none\" stroke=\"" + color + "\" points=\"";
    for (const auto& [px, py] : pts) s_ += f(px) + "," + f(py) + " ";
    s_ += "\"/>\n";
  }
  std::string finish() { return s_ + "</svg>\n"; }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

 private:
  double ymin_, ymax_;
  std::string s_;
};

std::string bars(const std::string& title, const std::vector<GroupStats>& groups) {
  double lo = 0, hi = 0;
  for (const auto& g : groups) {
    lo = std::min(lo, g.mean - g.std_dev);
    hi = std::max(hi, g.mean + g.std_dev);
  }
  Canvas c(title, lo, hi);
  const double slot = 1.0 / static_cast<double>(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double x0 = Canvas::x(slot * (static_cast<double>(i) + 0.15));
    const double w = Canvas::x(slot * 0.7) - Canvas::x(0);
    c.rect(x0, c.y(0), w, c.y(g.mean) - c.y(0), "#4a78b5");
    const double xm = x0 + w / 2;
    c.line(xm, c.y(g.mean - g.std_dev), xm, c.y(g.mean + g.std_dev), "black");
    c.text(xm, kHeight - kMargin + 14, g.group_key, "middle");
    c.text(xm, c.y(g.mean) - 4, Canvas::num(g.mean), "middle");
  }
  return c.finish();
}

}  // namespace

std::string phase_svg(const PhaseReport& r, ScoreLevel level) {
  return bars("Mean " + std::string(score_level_name(level)) + " by clinical trial phase",
              std::vector<GroupStats>(r.phases.begin(), r.phases.end()));
}

std::string ach_svg(const AchReport& r, ScoreLevel level) {
  return bars("Mean " + std::string(score_level_name(level)) + " by ACH label: " + r.ordering, r.groups);
}

std::string density_svg(const DensityReport& r, ScoreLevel level) {
  const auto& h = r.histogram;
  double hi = 0;
  for (double d : h.density) hi = std::max(hi, d);
  Canvas c("Density of " + std::string(score_level_name(level)), 0, hi);
  const double w = (Canvas::x(1) - Canvas::x(0)) / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    c.rect(Canvas::x(0) + w * static_cast<double>(i), c.y(0), w * 0.95, c.y(h.density[i]) - c.y(0), "#8fb3de");
  for (double p : r.peaks) {
    const double px = Canvas::x((p + 1.0) / 2.0);
    c.line(px, kMargin, px, kHeight - kMargin, "#c0392b");
  }
  c.text(Canvas::x(0), kHeight - kMargin + 14, "-1", "middle");
  c.text(Canvas::x(1), kHeight - kMargin + 14, "1", "middle");
  return c.finish();
}

std::string trend_svg(const std::vector<GroupStats>& years, ScoreLevel level) {
  double lo = 0, hi = 0;
  for (const auto& g : years) {
    lo = std::min(lo, g.mean - g.std_dev);
    hi = std::max(hi, g.mean + g.std_dev);
  }
  Canvas c("Yearly mean " + std::string(score_level_name(level)) + " (+-1 sd)", lo, hi);
  std::vector<std::pair<double, double>> mean, up, down;
  const double n = years.size() > 1 ? static_cast<double>(years.size() - 1) : 1.0;
  for (std::size_t i = 0; i < years.size(); ++i) {
    const double px = Canvas::x(static_cast<double>(i) / n);
    mean.emplace_back(px, c.y(years[i].mean));
    up.emplace_back(px, c.y(years[i].mean + years[i].std_dev));
    down.emplace_back(px, c.y(years[i].mean - years[i].std_dev));
  }
  c.polyline(up, "#e67e22");
  c.polyline(down, "#e67e22");
  c.polyline(mean, "#2c6fbb");
  if (!years.empty()) {
    c.text(Canvas::x(0), kHeight - kMargin + 14, years.front().group_key, "middle");
    c.text(Canvas::x(1), kHeight - kMargin + 14, years.back().group_key, "middle");
  }
  return c.finish();
}

std::string grid_svg(const Grid& g) {
  std::int64_t peak = 1;
  for (auto v : g.counts) peak = std::max(peak, v);
  Canvas c("TPE (x) vs TPD (y) counts", -1, 1);
  const double cw = (Canvas::x(1) - Canvas::x(0)) / g.x_bins;
  const double ch = (c.y(-1) - c.y(1)) / g.y_bins;
  for (int y = 0; y < g.y_bins; ++y) {
    for (int x = 0; x < g.x_bins; ++x) {
      const auto v = g.at(x, y);
      if (v == 0) continue;
      const double t = std::log1p(static_cast<double>(v)) / std::log1p(static_cast<double>(peak));
      const int shade = static_cast<int>(255 - 200 * t);
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02xff", shade, shade);
      c.rect(Canvas::x(0) + cw * x, c.y(-1) - ch * (y + 1), cw, ch, color);
    }
  }
  return c.finish();
}

}  // namespace tp
