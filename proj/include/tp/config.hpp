#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tp/embed_doc.hpp"
#include "tp/embed_entity.hpp"

namespace tp {

enum class Preset { Paper, Desk };

std::string_view preset_name(Preset p);
Preset parse_preset(std::string_view s);

// Everything a pipeline run needs, resolved from preset, config file and
// command-line flags (in increasing precedence).
struct PipelineConfig {
  Preset preset = Preset::Paper;
  std::string corpus;
  std::string format = "records";  // records | pubmed-xml
  std::string mesh;
  std::string mesh_rules;
  std::string entities;
  std::string out;
  std::uint64_t seed = 42;
  int threads = 12;
  int bins = 100;
  bool svg = false;
  bool strict = false;
  std::set<std::string> clinical_contains = {"Clinical Trial"};
  std::set<std::string> clinical_exact = {"Guideline", "Practice Guideline"};
  EntityHyperparams entity;
  DocHyperparams doc;
};

// Hyperparameters of each preset. "paper" keeps the published settings;
// "desk" shrinks the matrices and raises learning rates for small corpora.
PipelineConfig preset_config(Preset p);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat "key = value" lines; '#' starts a comment.
KeyValues parse_key_values(std::istream& in);

// Applies one setting. Unknown keys and unparsable values throw Error.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

// preset (from cli, else file, else "paper") -> file values -> cli values.
// seed and threads are propagated to both trainers.
PipelineConfig resolve_config(const KeyValues& file, const KeyValues& cli);

// Effective configuration as sorted "key = value" lines.
std::string dump_config(const PipelineConfig& cfg);

}  // namespace tp
