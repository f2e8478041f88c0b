#include "tp/config.hpp"

#include <charconv>
#include <cstdio>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error("config: invalid value \"" + value + "\" for " + key);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error("config: invalid value \"" + value + "\" for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error("config: invalid boolean \"" + value + "\" for " + key);
}

std::set<std::string> parse_list(const std::string& value) {
  std::set<std::string> out;
  std::string cur;
  for (char c : value + ";") {
    if (c == ';') {
      auto t = normalize_space(cur);
      if (!t.empty()) out.insert(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

std::string join_list(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) {
    if (!out.empty()) out += "; ";
    out += x;
  }
  return out;
}

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view preset_name(Preset p) { return p == Preset::Paper ? "paper" : "desk"; }

Preset parse_preset(std::string_view s) {
  if (s == "paper") return Preset::Paper;
  if (s == "desk") return Preset::Desk;
  throw Error("unknown preset \"" + std::string(s) + "\" (expected paper or desk)");
}

PipelineConfig preset_config(Preset p) {
  PipelineConfig c;
  c.preset = p;
  if (p == Preset::Desk) {
    c.entity.dim = 50;
    c.entity.buckets = 100'000;
    c.entity.lr = 0.05;
    c.doc.dim = 50;
    c.doc.lr = 0.025;
    c.doc.window = 2;
    c.doc.epochs = 30;
  }
  return c;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (normalize_space(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value", lineno);
    out.emplace_back(normalize_space(line.substr(0, eq)), normalize_space(line.substr(eq + 1)));
  }
  return out;
}

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& v) {
  if (key == "preset") c.preset = parse_preset(v);
  else if (key == "corpus") c.corpus = v;
  else if (key == "format") {
    if (v != "records" && v != "pubmed-xml") throw Error("config: format must be records or pubmed-xml");
    c.format = v;
  }
  else if (key == "mesh") c.mesh = v;
  else if (key == "mesh_rules") c.mesh_rules = v;
  else if (key == "entities") c.entities = v;
  else if (key == "out") c.out = v;
  else if (key == "seed") c.seed = c.entity.seed = c.doc.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "threads") c.threads = c.entity.threads = c.doc.threads = parse_number<int>(key, v);
  else if (key == "bins") c.bins = parse_number<int>(key, v);
  else if (key == "svg") c.svg = parse_bool(key, v);
  else if (key == "strict") c.strict = parse_bool(key, v);
  else if (key == "clinical_contains") c.clinical_contains = parse_list(v);
  else if (key == "clinical_exact") c.clinical_exact = parse_list(v);
  else if (key == "entity.dim") c.entity.dim = parse_number<int>(key, v);
  else if (key == "entity.lr") c.entity.lr = parse_real(key, v);
  else if (key == "entity.min_subword") c.entity.min_subword = parse_number<int>(key, v);
  else if (key == "entity.max_subword") c.entity.max_subword = parse_number<int>(key, v);
  else if (key == "entity.window") c.entity.window = parse_number<int>(key, v);
  else if (key == "entity.epochs") c.entity.epochs = parse_number<int>(key, v);
  else if (key == "entity.negatives") c.entity.negatives = parse_number<int>(key, v);
  else if (key == "entity.min_count") c.entity.min_count = parse_number<int>(key, v);
  else if (key == "entity.buckets") c.entity.buckets = parse_number<std::int64_t>(key, v);
  else if (key == "entity.max_norm") c.entity.max_norm = parse_real(key, v);
  else if (key == "doc.dim") c.doc.dim = parse_number<int>(key, v);
  else if (key == "doc.lr") c.doc.lr = parse_real(key, v);
  else if (key == "doc.window") c.doc.window = parse_number<int>(key, v);
  else if (key == "doc.epochs") c.doc.epochs = parse_number<int>(key, v);
  else if (key == "doc.negatives") c.doc.negatives = parse_number<int>(key, v);
  else if (key == "doc.min_count") c.doc.min_count = parse_number<int>(key, v);
  else if (key == "doc.infer_epochs") c.doc.infer_epochs = parse_number<int>(key, v);
  else throw Error("config: unknown key \"" + key + "\"");
}

PipelineConfig resolve_config(const KeyValues& file, const KeyValues& cli) {
  Preset preset = Preset::Paper;
  for (const auto& [k, v] : file)
    if (k == "preset") preset = parse_preset(v);
  for (const auto& [k, v] : cli)
    if (k == "preset") preset = parse_preset(v);
  PipelineConfig c = preset_config(preset);
  for (const auto& [k, v] : file)
    if (k != "preset") apply_setting(c, k, v);
  for (const auto& [k, v] : cli)
    if (k != "preset") apply_setting(c, k, v);
  c.entity.validate();
  c.doc.validate();
  if (c.bins < 1) throw Error("config: bins must be >= 1");
  return c;
}

std::string dump_config(const PipelineConfig& c) {
  std::map<std::string, std::string> kv = {
      {"preset", std::string(preset_name(c.preset))},
      {"corpus", c.corpus},
      {"format", c.format},
      {"mesh", c.mesh},
      {"mesh_rules", c.mesh_rules},
      {"entities", c.entities},
      {"out", c.out},
      {"seed", std::to_string(c.seed)},
      {"threads", std::to_string(c.threads)},
      {"bins", std::to_string(c.bins)},
      {"svg", c.svg ? "true" : "false"},
      {"strict", c.strict ? "true" : "false"},
      {"clinical_contains", join_list(c.clinical_contains)},
      {"clinical_exact", join_list(c.clinical_exact)},
      {"entity.dim", std::to_string(c.entity.dim)},
      {"entity.lr", real(c.entity.lr)},
      {"entity.min_subword", std::to_string(c.entity.min_subword)},
      {"entity.max_subword", std::to_string(c.entity.max_subword)},
      {"entity.window", std::to_string(c.entity.window)},
      {"entity.epochs", std::to_string(c.entity.epochs)},
      {"entity.negatives", std::to_string(c.entity.negatives)},
      {"entity.min_count", std::to_string(c.entity.min_count)},
      {"entity.buckets", std::to_string(c.entity.buckets)},
      {"entity.max_norm", real(c.entity.max_norm)},
      {"doc.dim", std::to_string(c.doc.dim)},
      {"doc.lr", real(c.doc.lr)},
      {"doc.window", std::to_string(c.doc.window)},
      {"doc.epochs", std::to_string(c.doc.epochs)},
      {"doc.negatives", std::to_string(c.doc.negatives)},
      {"doc.min_count", std::to_string(c.doc.min_count)},
      {"doc.infer_epochs", std::to_string(c.doc.infer_epochs)},
  };
  std::string s;
  for (const auto& [k, v] : kv) s += k + " = " + v + '\n';
  return s;
}

}  // namespace tp
