#include "tp/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

constexpr double kClampSlack = 1e-12;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

TpRecord score_one(const Document& d, const ScoreInputs& in) {
  TpRecord r;
  r.doc_id = d.id;
  r.year = d.year;
  r.ach = classify_paper(in.vocab, d);

  auto entities = extract_entity_set(d, in.dict);
  r.entity_count = static_cast<int>(entities.size());
  if (entities.empty()) {
    r.tpe_absence = Absence::NoEntities;
  } else {
    auto p = paper_vector_entity(in.entity_model, entities);
    if (norm(p) > 0.0) {
      r.tpe = tp_project(p, in.entity_axis);
    } else {
      r.tpe_absence = Absence::ZeroVector;
    }
  }

  Vec dv;
  if (auto row = in.doc_model.doc_row(d.id)) {
    dv = in.doc_model.doc_vector(*row);
  } else {
    try {
      dv = infer_doc_vector(in.doc_model, d, in.dict);
    } catch (const NoInformation&) {
      r.tpd_absence = Absence::NoTokens;
      return r;
    }
  }
  if (norm(dv) > 0.0) {
    r.tpd = tp_project(dv, in.doc_axis);
  } else {
    r.tpd_absence = Absence::ZeroVector;
  }
  return r;
}

}  // namespace

std::string_view absence_name(Absence a) {
  switch (a) {
    case Absence::None: return "none";
    case Absence::NoEntities: return "no-entities";
    case Absence::ZeroVector: return "zero-vector";
    case Absence::NoTokens: return "no-tokens";
  }
  return "none";
}

Vec paper_vector_entity(const EntityModel& model, const std::set<std::string>& entities) {
  if (entities.empty()) throw NoInformation("no-entities: paper mentions no entity");
  Vec sum(static_cast<std::size_t>(model.hyperparams.dim), 0.0);
  for (const auto& e : entities) {
    auto v = vector(model, e);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v.values[k];
  }
  return sum;
}

namespace {

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Rescales v in place when its magnitude would over- or underflow a dot product.
const Vec& tame(const Vec& v, double m, Vec& scratch) {
  if (m > 1e-70 && m < 1e70) return v;
  scratch = v;
  for (auto& x : scratch) x /= m;
  return scratch;
}

}  // namespace

double tp_project(const Vec& paper_vec, const Vec& axis) {
  if (paper_vec.size() != axis.size())
    throw DimensionMismatch("tp_project: paper vector has dimension " +
                            std::to_string(paper_vec.size()) + ", axis has " +
                            std::to_string(axis.size()));
  const double pm = max_abs(paper_vec), am = max_abs(axis);
  if (!(pm > 0.0)) throw Error("tp_project: zero paper vector");
  if (!(am > 0.0)) throw Error("tp_project: zero axis");
  Vec ps, as;
  const Vec& p = tame(paper_vec, pm, ps);
  const Vec& a = tame(axis, am, as);
  const double denom = std::sqrt(dot(p, p) * dot(a, a));
  double c = dot(p, a) / denom;
  if (!std::isfinite(c)) throw Error("tp_project: non-finite cosine");
  if (c > 1.0) {
    if (c - 1.0 > kClampSlack) throw Error("tp_project: cosine " + fmt_double(c) + " out of range");
    c = 1.0;
  } else if (c < -1.0) {
    if (-1.0 - c > kClampSlack) throw Error("tp_project: cosine " + fmt_double(c) + " out of range");
    c = -1.0;
  }
  return c;
}

double tp_project(const Vec& paper_vec, const AxisVector& axis) { return tp_project(paper_vec, axis.axis); }

std::vector<TpRecord> score_corpus(const Corpus& corpus, const ScoreInputs& in, int threads) {
  if (static_cast<std::size_t>(in.entity_model.hyperparams.dim) != in.entity_axis.dim())
    throw DimensionMismatch("entity model dimension " + std::to_string(in.entity_model.hyperparams.dim) +
                            " does not match entity axis dimension " +
                            std::to_string(in.entity_axis.dim()));
  if (static_cast<std::size_t>(in.doc_model.hyperparams.dim) != in.doc_axis.dim())
    throw DimensionMismatch("document model dimension " + std::to_string(in.doc_model.hyperparams.dim) +
                            " does not match document axis dimension " +
                            std::to_string(in.doc_axis.dim()));
  std::vector<TpRecord> out(corpus.documents.size());
  if (threads < 1) threads = 1;
  auto worker = [&](std::size_t tid) {
    for (std::size_t i = tid; i < out.size(); i += static_cast<std::size_t>(threads))
      out[i] = score_one(corpus.documents[i], in);
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
  }
  return out;
}

std::string scores_csv(const std::vector<TpRecord>& records) {
  std::string s = "doc_id,tpe,tpd,ach,year,entity_count\n";
  for (const auto& r : records) {
    s += csv_field(r.doc_id);
    s += ',';
    if (r.tpe) s += fmt_double(*r.tpe);
    s += ',';
    if (r.tpd) s += fmt_double(*r.tpd);
    s += ',';
    s += r.ach.str();
    s += ',';
    s += std::to_string(r.year);
    s += ',';
    s += std::to_string(r.entity_count);
    s += '\n';
  }
  return s;
}

void write_scores(const std::vector<TpRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, scores_csv(records));
}

std::vector<TpRecord> read_scores(std::istream& in) {
  std::vector<TpRecord> out;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("scores file is empty", 0);
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "doc_id,tpe,tpd,ach,year,entity_count")
    throw ParseError("scores file: unexpected header \"" + line + "\"", 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw ParseError("scores line " + std::to_string(lineno) + ": expected 6 fields", lineno);
    try {
      TpRecord r;
      r.doc_id = f[0];
      r.ach = AchLabel::parse(f[3]);
      r.year = std::stoi(f[4]);
      r.entity_count = std::stoi(f[5]);
      // The file does not carry reason codes; recover the likely one.
      if (!f[1].empty()) r.tpe = std::stod(f[1]);
      else r.tpe_absence = r.entity_count == 0 ? Absence::NoEntities : Absence::ZeroVector;
      if (!f[2].empty()) r.tpd = std::stod(f[2]);
      else r.tpd_absence = Absence::NoTokens;
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError("scores line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace tp
