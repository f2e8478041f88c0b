#include "tp/synthetic.hpp"

#include <array>
#include <cstdio>

#include "tp/util.hpp"

namespace tp {

namespace {

const std::array<const char*, 4> kRoman = {"I", "II", "III", "IV"};

struct Pools {
  std::vector<std::string> basic_words, clinical_words, filler;
  // surface forms per entity (two synonyms each)
  std::vector<std::array<std::string, 2>> basic_entities, clinical_entities;
  std::vector<std::string> a_terms, c_terms, h_terms;
};

std::string numbered(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%d", stem, i);
  return buf;
}

Pools make_pools(const SyntheticSpec& s) {
  Pools p;
  for (int i = 0; i < s.cluster_words; ++i) {
    p.basic_words.push_back(numbered("molec", i));
    p.clinical_words.push_back(numbered("patien", i));
  }
  for (int i = 0; i < s.filler_words; ++i) p.filler.push_back(numbered("studyw", i));
  for (int i = 0; i < s.cluster_entities; ++i) {
    p.basic_entities.push_back({numbered("bkin", i) + " protein", numbered("bkin", i) + "p"});
    p.clinical_entities.push_back({numbered("csyn", i) + " disorder", numbered("csyn", i) + "d"});
  }
  for (int i = 0; i < s.mesh_terms_per_category; ++i) {
    p.a_terms.push_back(numbered("Murine Strain ", i));
    p.c_terms.push_back(numbered("Cell Line ", i));
    p.h_terms.push_back(numbered("Patient Cohort ", i));
  }
  return p;
}

std::string xml_escape(const std::string& s) {
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

std::string descriptor(const std::string& ui, const std::string& name,
                       const std::vector<std::string>& trees) {
  std::string s = "  <DescriptorRecord DescriptorClass=\"1\">\n    <DescriptorUI>" + ui +
                  "</DescriptorUI>\n    <DescriptorName>\n      <String>" + xml_escape(name) +
                  "</String>\n    </DescriptorName>\n    <TreeNumberList>\n";
  for (const auto& t : trees) s += "      <TreeNumber>" + t + "</TreeNumber>\n";
  s += "    </TreeNumberList>\n  </DescriptorRecord>\n";
  return s;
}

std::string make_mesh_xml(const Pools& p) {
  std::string s = "<?xml version=\"1.0\"?>\n<DescriptorRecordSet LanguageCode=\"eng\">\n";
  int ui = 1;
  auto next_ui = [&] { return numbered("D9", 100000 + ui++); };
  s += descriptor(next_ui(), "Humans", {"B01.050.150.900.649.313.988.400.112.400.400"});
  for (std::size_t i = 0; i < p.a_terms.size(); ++i)
    s += descriptor(next_ui(), p.a_terms[i], {"B01.050.150." + std::to_string(100 + i)});
  for (std::size_t i = 0; i < p.c_terms.size(); ++i)
    s += descriptor(next_ui(), p.c_terms[i], {"A11.251." + std::to_string(100 + i)});
  for (std::size_t i = 0; i < p.h_terms.size(); ++i)
    s += descriptor(next_ui(), p.h_terms[i], {"M01." + std::to_string(100 + i)});
  s += descriptor(next_ui(), "Chemical Compound", {"D03.633"});
  s += "</DescriptorRecordSet>\n";
  return s;
}

std::string make_entities_tsv(const Pools& p) {
  std::string s = "# surface\tid\ttype\n";
  for (std::size_t i = 0; i < p.basic_entities.size(); ++i)
    for (const auto& surface : p.basic_entities[i])
      s += surface + "\tGENE:bkin" + std::to_string(i) + "\tgene\n";
  for (std::size_t i = 0; i < p.clinical_entities.size(); ++i)
    for (const auto& surface : p.clinical_entities[i])
      s += surface + "\tDISEASE:csyn" + std::to_string(i) + "\tdisease\n";
  return s;
}

class DocBuilder {
 public:
  DocBuilder(const SyntheticSpec& s, const Pools& p, Rng& rng) : s_(s), p_(p), rng_(rng) {}

  Document build(const std::string& id, double clinical_share, std::vector<std::string> mesh,
                 std::set<std::string> pub_types) {
    std::vector<std::string> words;
    for (int i = 0; i < s_.text_tokens; ++i) {
      if (rng_.unit() < s_.filler_share) {
        words.push_back(pick(p_.filler));
      } else {
        words.push_back(rng_.unit() < clinical_share ? pick(p_.clinical_words) : pick(p_.basic_words));
      }
    }
    for (int i = 0; i < s_.entity_mentions; ++i) {
      const auto& pool = rng_.unit() < clinical_share ? p_.clinical_entities : p_.basic_entities;
      const auto& e = pool[rng_.below(pool.size())];
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng_.below(words.size() + 1)),
                   e[rng_.below(2)]);
    }
    Document d;
    d.id = id;
    const std::size_t title_len = 8;
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::string& dst = i < title_len ? d.title : d.abstract;
      if (!dst.empty()) dst.push_back(' ');
      dst += words[i];
    }
    d.title += ".";
    d.abstract += ".";
    d.year = 1990 + static_cast<int>(rng_.below(31));
    d.pub_types = std::move(pub_types);
    d.mesh_terms = std::move(mesh);
    return d;
  }

  const std::string& pick(const std::vector<std::string>& v) { return v[rng_.below(v.size())]; }

 private:
  const SyntheticSpec& s_;
  const Pools& p_;
  Rng& rng_;
};

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  const Pools pools = make_pools(spec);
  SyntheticData out;
  out.mesh_xml = make_mesh_xml(pools);
  out.entities_tsv = make_entities_tsv(pools);
  out.corpus.source = "synthetic";

  Rng rng(derive_seed(spec.seed, "synthetic"));
  DocBuilder b(spec, pools, rng);
  int serial = 0;
  auto add = [&](const std::string& group, Document d) {
    out.group.emplace(d.id, group);
    out.corpus.documents.push_back(std::move(d));
  };
  auto next_id = [&] { return numbered("SYN", 100000 + serial++); };
  const std::set<std::string> article = {"Journal Article"};

  for (int i = 0; i < spec.basic_docs; ++i) {
    std::vector<std::string> mesh;
    switch (i % 10) {
      case 0: case 1: case 2: case 3:
        mesh = {b.pick(pools.c_terms), b.pick(pools.c_terms)};
        break;
      case 4: case 5: case 6:
        mesh = {b.pick(pools.a_terms), b.pick(pools.a_terms)};
        break;
      default:
        mesh = {b.pick(pools.a_terms), b.pick(pools.c_terms)};
    }
    if (mesh.size() == 2 && mesh[0] == mesh[1]) mesh.pop_back();
    add("basic", b.build(next_id(), 0.0, mesh, article));
  }
  for (int i = 0; i < spec.clinical_docs; ++i) {
    std::set<std::string> types = article;
    if (i % 3 == 0) types.insert("Clinical Trial");
    if (i % 3 == 1) types.insert("Guideline");
    add("clinical", b.build(next_id(), 1.0, {"Humans", b.pick(pools.h_terms)}, types));
  }
  for (int i = 0; i < spec.mixed_docs; ++i) {
    std::vector<std::string> mesh = {"Humans"};
    if (i % 3 != 1) mesh.push_back(b.pick(pools.c_terms));  // CH, ACH
    if (i % 3 != 0) mesh.push_back(b.pick(pools.a_terms));  // AH, ACH
    add("mixed", b.build(next_id(), 0.5, mesh, article));
  }
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < spec.docs_per_phase; ++i) {
      std::set<std::string> types = {"Journal Article", std::string("Clinical Trial, Phase ") + kRoman[static_cast<std::size_t>(k)]};
      add(std::string("phase ") + kRoman[static_cast<std::size_t>(k)],
          b.build(next_id(), 0.6 + 0.1 * k, {"Humans", b.pick(pools.h_terms)}, types));
    }
  }
  return out;
}

}  // namespace tp
