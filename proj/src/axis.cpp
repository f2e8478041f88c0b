#include "tp/axis.hpp"

#include <cstdio>

#include "tp/binio.hpp"
#include "tp/error.hpp"
#include "tp/textprep.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

constexpr std::uint32_t kAxisFormatVersion = 1;
constexpr double kDegenerateNorm = 1e-12;

}  // namespace

std::string_view axis_level_name(AxisLevel level) {
  return level == AxisLevel::Entity ? "entity" : "document";
}

Vec centroid(const std::vector<Vec>& vectors) {
  if (vectors.empty()) throw Error("centroid of an empty set");
  Vec c(vectors.front().size(), 0.0);
  for (const auto& v : vectors) {
    if (v.size() != c.size()) throw DimensionMismatch("centroid: vectors differ in dimension");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += v[k];
  }
  for (auto& x : c) x /= static_cast<double>(vectors.size());
  return c;
}

AxisVector make_axis(AxisLevel level, Vec basic_centroid, Vec clinical_centroid,
                     std::int64_t basic_count, std::int64_t clinical_count) {
  if (basic_centroid.size() != clinical_centroid.size())
    throw DimensionMismatch("axis: centroid dimensions differ");
  AxisVector a;
  a.level = level;
  a.axis.resize(basic_centroid.size());
  for (std::size_t k = 0; k < a.axis.size(); ++k) a.axis[k] = clinical_centroid[k] - basic_centroid[k];
  if (!(norm(a.axis) >= kDegenerateNorm))
    throw Error(std::string("degenerate axis at the ") + std::string(axis_level_name(level)) +
                " level: basic and clinical centroids coincide");
  a.basic_centroid = std::move(basic_centroid);
  a.clinical_centroid = std::move(clinical_centroid);
  a.basic_count = basic_count;
  a.clinical_count = clinical_count;
  return a;
}

AxisVector entity_axis(const EntityModel& model, const MeshVocabulary& vocab,
                       AxisDiagnostics* diagnostics) {
  auto basic = basic_terms(vocab);
  auto clinical = clinical_terms(vocab);
  if (basic.empty() || clinical.empty()) {
    std::string which = basic.empty() && clinical.empty() ? "basic and clinical"
                        : basic.empty()                   ? "basic"
                                                          : "clinical";
    throw Error("entity axis: no " + which + " MeSH terms in the vocabulary");
  }
  AxisDiagnostics diag;
  diag.basic_candidates = static_cast<std::int64_t>(basic.size());
  diag.clinical_candidates = static_cast<std::int64_t>(clinical.size());
  auto collect = [&](const std::set<std::string>& terms, std::vector<std::string>& excluded) {
    std::vector<Vec> vs;
    for (const auto& name : terms) {
      auto tok = mesh_token(name);
      if (tok.empty()) {
        excluded.push_back(name);
        continue;
      }
      auto tv = vector(model, tok);
      if (tv.no_information) {
        excluded.push_back(name);
        continue;
      }
      vs.push_back(std::move(tv.values));
    }
    return vs;
  };
  auto bv = collect(basic, diag.excluded_basic);
  auto cv = collect(clinical, diag.excluded_clinical);
  if (diagnostics) *diagnostics = diag;
  if (bv.empty() || cv.empty())
    throw Error(std::string("entity axis: every ") + (bv.empty() ? "basic" : "clinical") +
                " MeSH term resolved to a no-information vector");
  const auto nb = static_cast<std::int64_t>(bv.size());
  const auto nc = static_cast<std::int64_t>(cv.size());
  return make_axis(AxisLevel::Entity, centroid(bv), centroid(cv), nb, nc);
}

bool ClinicalTypePatterns::matches(const Document& doc) const {
  for (const auto& t : doc.pub_types) {
    auto n = normalize_space(t);
    if (exact.count(n)) return true;
    for (const auto& c : contains)
      if (n.find(c) != std::string::npos) return true;
  }
  return false;
}

bool is_basic_label(AchLabel label) {
  return !label.none() && !label.has(kHuman);
}

AxisVector doc_axis(const DocModel& model, const Corpus& corpus, const MeshVocabulary& vocab,
                    const ClinicalTypePatterns& patterns, AxisDiagnostics* diagnostics) {
  std::vector<Vec> bv, cv;
  AxisDiagnostics diag;
  for (const auto& d : corpus.documents) {
    const bool basic = is_basic_label(classify_paper(vocab, d));
    const bool clinical = patterns.matches(d);
    if (!basic && !clinical) continue;
    auto row = model.doc_row(d.id);
    if (basic) ++diag.basic_candidates;
    if (clinical) ++diag.clinical_candidates;
    if (!row) {
      if (basic) diag.excluded_basic.push_back(d.id);
      if (clinical) diag.excluded_clinical.push_back(d.id);
      continue;
    }
    auto v = model.doc_vector(*row);
    if (basic) bv.push_back(v);
    if (clinical) cv.push_back(std::move(v));
  }
  if (diagnostics) *diagnostics = diag;
  if (bv.empty() || cv.empty()) {
    std::string which = bv.empty() && cv.empty() ? "basic and clinical"
                        : bv.empty()             ? "basic"
                                                 : "clinical";
    throw Error("document axis: no " + which + " papers with trained vectors in the corpus");
  }
  const auto nb = static_cast<std::int64_t>(bv.size());
  const auto nc = static_cast<std::int64_t>(cv.size());
  return make_axis(AxisLevel::Document, centroid(bv), centroid(cv), nb, nc);
}

std::string serialize(const AxisVector& a) {
  binio::Writer w;
  w.magic("TAX1");
  w.u32(kAxisFormatVersion);
  w.u8(static_cast<std::uint8_t>(a.level));
  w.i32(static_cast<std::int32_t>(a.dim()));
  w.i64(a.basic_count);
  w.i64(a.clinical_count);
  w.f64s(a.basic_centroid);
  w.f64s(a.clinical_centroid);
  w.f64s(a.axis);
  return w.data();
}

void save_axis(const AxisVector& axis, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(axis));
}

AxisVector deserialize_axis(std::string_view bytes) {
  binio::Reader r(bytes, "TAX1 axis");
  r.expect_magic("TAX1");
  if (auto v = r.u32(); v != kAxisFormatVersion) r.fail("unsupported format version " + std::to_string(v));
  AxisVector a;
  auto level = r.u8();
  if (level > 1) r.fail("invalid axis level");
  a.level = static_cast<AxisLevel>(level);
  auto dim = r.i32();
  if (dim < 1 || static_cast<std::size_t>(dim) * 24 > bytes.size()) r.fail("invalid dimension");
  a.basic_count = r.i64();
  a.clinical_count = r.i64();
  a.basic_centroid.resize(static_cast<std::size_t>(dim));
  a.clinical_centroid.resize(static_cast<std::size_t>(dim));
  a.axis.resize(static_cast<std::size_t>(dim));
  r.f64s(a.basic_centroid);
  r.f64s(a.clinical_centroid);
  r.f64s(a.axis);
  if (!r.at_end()) r.fail("trailing bytes");
  return a;
}

AxisVector load_axis(const std::filesystem::path& path) { return deserialize_axis(read_file(path)); }

void export_text(const AxisVector& a, std::ostream& out) {
  out << 3 << ' ' << a.dim() << '\n';
  char buf[40];
  auto line = [&](const char* name, const Vec& v) {
    out << name;
    for (double x : v) {
      std::snprintf(buf, sizeof buf, " %.17g", x);
      out << buf;
    }
    out << '\n';
  };
  line("basic_centroid", a.basic_centroid);
  line("clinical_centroid", a.clinical_centroid);
  line("axis", a.axis);
}

}  // namespace tp
