#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tp/error.hpp"
#include "tp/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Translational progression scoring pipeline"};
  app.require_subcommand(1, 1);

  std::string config_file;
  tp::KeyValues cli;
  tp::CommandOptions opts;

  // Every flag is recorded only when given, so config-file values survive.
  auto setting = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&cli, key](const std::string& v) { cli.emplace_back(key, v); }, help);
  };
  auto toggle = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_flag_callback(flag, [&cli, key] { cli.emplace_back(key, "true"); }, help);
  };

  const std::map<std::string, std::string> help = {
      {"ingest", "parse a corpus and store it as records"},
      {"mesh-stats", "count MeSH descriptors per category"},
      {"train-entity", "train the entity (word/subword) embedding"},
      {"train-doc", "train the paragraph-vector model"},
      {"build-axis", "build the entity and document axes"},
      {"score", "score every paper at both levels"},
      {"report-phase", "mean scores by clinical trial phase"},
      {"report-ach", "mean scores by A/C/H label"},
      {"report-density", "score histogram and peaks"},
      {"report-correlation", "entity vs document score agreement"},
      {"report-trend", "mean score per publication year"},
      {"validate-all", "phase and label ordering checks"},
      {"synth", "write a synthetic corpus, MeSH file and dictionary"},
      {"export-vectors", "dump a model or axis as text"},
      {"show-config", "print the effective configuration"},
  };

  for (const auto& name : tp::pipeline_commands()) {
    auto* cmd = app.add_subcommand(name, help.at(name));
    cmd->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    setting(cmd, "--preset", "preset", "paper | desk");
    setting(cmd, "--corpus", "corpus", "corpus file (default: stored records)");
    setting(cmd, "--format", "format", "records | pubmed-xml");
    setting(cmd, "--mesh", "mesh", "MeSH descriptor XML");
    setting(cmd, "--mesh-rules", "mesh_rules", "category rules file");
    setting(cmd, "--entities", "entities", "entity dictionary (TSV)");
    setting(cmd, "--out", "out", "output directory (default: $TP_HOME or tp_out)");
    setting(cmd, "--seed", "seed", "root random seed");
    setting(cmd, "--threads", "threads", "worker threads");
    setting(cmd, "--bins", "bins", "histogram / heatmap bins");
    toggle(cmd, "--svg", "svg", "also write SVG figures");
    toggle(cmd, "--strict", "strict", "exit 1 when a validation check fails");
    cmd->add_option("--level", opts.level, "tpe | tpd | both")
        ->check(CLI::IsMember({"tpe", "tpd", "both"}));
    if (name == "export-vectors")
      cmd->add_option("--model", opts.model, "entity | doc | entity-axis | doc-axis")
          ->check(CLI::IsMember({"entity", "doc", "entity-axis", "doc-axis"}));
    if (name == "synth") {
      auto& s = opts.synthetic;
      cmd->add_option("--basic", s.basic_docs, "basic papers");
      cmd->add_option("--clinical", s.clinical_docs, "clinical papers");
      cmd->add_option("--mixed", s.mixed_docs, "mixed papers");
      cmd->add_option("--per-phase", s.docs_per_phase, "papers per trial phase");
      cmd->add_option("--synth-seed", s.seed, "generator seed");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  tp::PipelineConfig cfg;
  try {
    tp::KeyValues file;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      file = tp::parse_key_values(in);
    }
    cfg = tp::resolve_config(file, cli);
  } catch (const std::exception& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return 2;
  }
  return tp::run_command(command, cfg, opts, std::cout, std::cerr);
}
