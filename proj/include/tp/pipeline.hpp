#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tp/config.hpp"
#include "tp/synthetic.hpp"

namespace tp {

// Subcommand names in pipeline order.
const std::vector<std::string>& pipeline_commands();

struct CommandOptions {
  std::string level = "both";           // tpe | tpd | both (reports)
  std::string model = "entity";         // entity | doc | entity-axis | doc-axis (export-vectors)
  SyntheticSpec synthetic;              // synth
};

// Artifact locations under the output root.
struct ArtifactPaths {
  std::filesystem::path root;
  std::filesystem::path corpus() const { return root / "corpus.jsonl"; }
  std::filesystem::path entity_model() const { return root / "entity.tpe"; }
  std::filesystem::path doc_model() const { return root / "doc.tpd"; }
  std::filesystem::path entity_axis() const { return root / "entity.tax"; }
  std::filesystem::path doc_axis() const { return root / "document.tax"; }
  std::filesystem::path scores() const { return root / "scores.csv"; }
  std::filesystem::path reports() const { return root / "reports"; }
};

// Output root: cfg.out, else $TP_HOME, else "tp_out".
ArtifactPaths artifact_paths(const PipelineConfig& cfg);

// Runs one subcommand. Returns the process exit code: 0 on success, 1 on a
// failed validation under --strict, 2 on an error (message written to err).
int run_command(const std::string& command, const PipelineConfig& cfg, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace tp
