#include "tp/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tp/axis.hpp"
#include "tp/corpus.hpp"
#include "tp/embed_doc.hpp"
#include "tp/embed_entity.hpp"
#include "tp/error.hpp"
#include "tp/mesh.hpp"
#include "tp/report.hpp"
#include "tp/score.hpp"
#include "tp/textprep.hpp"
#include "tp/util.hpp"

namespace tp {

namespace fs = std::filesystem;

namespace {

// Failed --strict validation.
struct ValidationFailed {};

struct Context {
  const PipelineConfig& cfg;
  const CommandOptions& opts;
  ArtifactPaths paths;
  std::ostream& out;
  std::ostream& err;
};

void require_file(const fs::path& p, const std::string& what, const std::string& hint) {
  if (!fs::exists(p)) throw Error("missing " + what + " " + p.string() + ": " + hint);
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  return in;
}

Corpus load_corpus(const Context& c) {
  fs::path path;
  std::string format = c.cfg.format;
  if (!c.cfg.corpus.empty()) {
    path = c.cfg.corpus;
  } else {
    path = c.paths.corpus();
    format = "records";
    require_file(path, "corpus", "run `tp ingest --corpus <file>` or pass --corpus");
  }
  auto in = open_in(path);
  ParseResult r = format == "pubmed-xml" ? parse_pubmed_xml(in, path.string()) : parse_records(in, path.string());
  for (const auto& e : r.errors)
    c.err << "warning: " << path.string() << ":" << e.location << ": " << e.message << '\n';
  return std::move(r.corpus);
}

MeshVocabulary load_mesh(const Context& c) {
  if (c.cfg.mesh.empty()) throw Error("no MeSH descriptor file: pass --mesh <desc.xml>");
  auto in = open_in(c.cfg.mesh);
  auto r = parse_mesh(in);
  for (const auto& w : r.warnings) c.err << "warning: " << w << '\n';
  if (!c.cfg.mesh_rules.empty()) {
    auto rin = open_in(c.cfg.mesh_rules);
    r.vocab.set_rules(CategoryRules::parse(rin));
  }
  return std::move(r.vocab);
}

EntityDictionary load_dict(const Context& c) {
  if (c.cfg.entities.empty()) throw Error("no entity dictionary: pass --entities <file.tsv>");
  auto in = open_in(c.cfg.entities);
  std::vector<std::string> warnings;
  auto d = EntityDictionary::load(in, &warnings);
  for (const auto& w : warnings) c.err << "warning: " << w << '\n';
  return d;
}

EntityModel need_entity_model(const Context& c) {
  require_file(c.paths.entity_model(), "entity model", "run `tp train-entity` first");
  return load_entity_model(c.paths.entity_model());
}

DocModel need_doc_model(const Context& c) {
  require_file(c.paths.doc_model(), "document model", "run `tp train-doc` first");
  return load_doc_model(c.paths.doc_model());
}

std::vector<TpRecord> need_scores(const Context& c) {
  require_file(c.paths.scores(), "scores", "run `tp score` first");
  auto in = open_in(c.paths.scores());
  return read_scores(in);
}

std::vector<ScoreLevel> levels(const Context& c) {
  if (c.opts.level == "both") return {ScoreLevel::Tpe, ScoreLevel::Tpd};
  return {parse_score_level(c.opts.level)};
}

void write_report(const Context& c, const std::string& name, const std::string& content) {
  write_file_atomic(c.paths.reports() / name, content);
}

int cmd_ingest(Context& c) {
  if (c.cfg.corpus.empty()) throw Error("ingest needs --corpus <file>");
  auto corpus = load_corpus(c);
  std::ostringstream ss;
  write_records(ss, corpus);
  write_file_atomic(c.paths.corpus(), ss.str());
  c.out << "ingest: " << corpus.documents.size() << " documents -> " << c.paths.corpus().string() << '\n';
  return 0;
}

int cmd_mesh_stats(Context& c) {
  auto vocab = load_mesh(c);
  auto n = count_categories(vocab);
  std::string csv = "descriptors,animal,cell,human,basic,clinical,basic_and_clinical\n" +
                    std::to_string(n.descriptors) + ',' + std::to_string(n.animal) + ',' +
                    std::to_string(n.cell) + ',' + std::to_string(n.human) + ',' +
                    std::to_string(n.basic) + ',' + std::to_string(n.clinical) + ',' +
                    std::to_string(n.basic_and_clinical) + '\n';
  write_report(c, "mesh_stats.csv", csv);
  c.out << "mesh-stats: " << n.descriptors << " descriptors, A=" << n.animal << " C=" << n.cell
        << " H=" << n.human << ", basic=" << n.basic << " clinical=" << n.clinical << '\n';
  return 0;
}

int cmd_train_entity(Context& c) {
  auto corpus = load_corpus(c);
  auto dict = load_dict(c);
  std::vector<TokenStream> streams;
  streams.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) streams.push_back(training_tokens(d, dict));
  TrainLog log;
  auto model = train_cbow(streams, c.cfg.entity, &log);
  for (const auto& w : log.warnings) c.err << "warning: " << w << '\n';
  save(model, c.paths.entity_model());
  c.out << "train-entity: vocabulary " << model.words.size() << ", " << log.tokens << " tokens, dim "
        << model.hyperparams.dim << " -> " << c.paths.entity_model().string() << '\n';
  return 0;
}

int cmd_train_doc(Context& c) {
  auto corpus = load_corpus(c);
  auto dict = load_dict(c);
  TrainLog log;
  auto model = train_pvdm(corpus, dict, c.cfg.doc, &log);
  for (const auto& w : log.warnings) c.err << "warning: " << w << '\n';
  save(model, c.paths.doc_model());
  c.out << "train-doc: " << model.doc_ids.size() << " documents, vocabulary " << model.words.size()
        << ", dim " << model.hyperparams.dim << " -> " << c.paths.doc_model().string() << '\n';
  return 0;
}

ClinicalTypePatterns patterns_of(const PipelineConfig& cfg) {
  ClinicalTypePatterns p;
  p.contains = cfg.clinical_contains;
  p.exact = cfg.clinical_exact;
  return p;
}

int cmd_build_axis(Context& c) {
  auto entity_model = need_entity_model(c);
  auto doc_model = need_doc_model(c);
  auto vocab = load_mesh(c);
  auto corpus = load_corpus(c);
  AxisDiagnostics ed, dd;
  auto ea = entity_axis(entity_model, vocab, &ed);
  auto da = doc_axis(doc_model, corpus, vocab, patterns_of(c.cfg), &dd);
  save_axis(ea, c.paths.entity_axis());
  save_axis(da, c.paths.doc_axis());
  std::string diag = "level,side,candidates,used,excluded\n";
  diag += "entity,basic," + std::to_string(ed.basic_candidates) + ',' + std::to_string(ea.basic_count) + ',' +
          std::to_string(ed.excluded_basic.size()) + '\n';
  diag += "entity,clinical," + std::to_string(ed.clinical_candidates) + ',' + std::to_string(ea.clinical_count) +
          ',' + std::to_string(ed.excluded_clinical.size()) + '\n';
  diag += "document,basic," + std::to_string(dd.basic_candidates) + ',' + std::to_string(da.basic_count) + ',' +
          std::to_string(dd.excluded_basic.size()) + '\n';
  diag += "document,clinical," + std::to_string(dd.clinical_candidates) + ',' + std::to_string(da.clinical_count) +
          ',' + std::to_string(dd.excluded_clinical.size()) + '\n';
  write_report(c, "axis_diagnostics.csv", diag);
  c.out << "build-axis: entity axis from " << ea.basic_count << " basic / " << ea.clinical_count
        << " clinical terms (" << ed.excluded_basic.size() + ed.excluded_clinical.size()
        << " excluded); document axis from " << da.basic_count << " basic / " << da.clinical_count
        << " clinical papers\n";
  return 0;
}

int cmd_score(Context& c) {
  auto corpus = load_corpus(c);
  auto dict = load_dict(c);
  auto vocab = load_mesh(c);
  auto em = need_entity_model(c);
  auto dm = need_doc_model(c);
  require_file(c.paths.entity_axis(), "entity axis", "run `tp build-axis` first");
  require_file(c.paths.doc_axis(), "document axis", "run `tp build-axis` first");
  auto ea = load_axis(c.paths.entity_axis());
  auto da = load_axis(c.paths.doc_axis());
  ScoreInputs in{dict, vocab, em, dm, ea, da};
  auto records = score_corpus(corpus, in, c.cfg.threads);
  write_scores(records, c.paths.scores());
  std::map<std::string, int> absent;
  for (const auto& r : records) {
    if (!r.tpe) ++absent["tpe " + std::string(absence_name(r.tpe_absence))];
    if (!r.tpd) ++absent["tpd " + std::string(absence_name(r.tpd_absence))];
  }
  c.out << "score: " << records.size() << " records -> " << c.paths.scores().string();
  for (const auto& [k, n] : absent) c.out << "; " << k << ": " << n;
  c.out << '\n';
  return 0;
}

bool run_phase(Context& c, const Corpus& corpus, const std::vector<TpRecord>& records, ScoreLevel level) {
  auto rep = phase_report(group_by_phase(corpus, records, level));
  const std::string lv(score_level_name(level));
  write_report(c, "phase_" + lv + ".csv", phase_csv(rep, level));
  if (c.cfg.svg) write_report(c, "phase_" + lv + ".svg", phase_svg(rep, level));
  c.out << "report-phase " << lv << ": means";
  for (const auto& g : rep.phases) c.out << ' ' << g.group_key << '=' << g.mean;
  c.out << "; monotone=" << (rep.monotone ? "true" : "false")
        << " positive=" << (rep.positive ? "true" : "false") << '\n';
  return rep.monotone && rep.positive;
}

// C below every mixed label (AH, CH, ACH) below H.
bool coarse_ach_ordering(const AchReport& rep, std::string* why) {
  std::map<std::string, double> mean;
  for (const auto& g : rep.groups) mean[g.group_key] = g.mean;
  if (!mean.count("C") || !mean.count("H")) {
    if (why) *why = "labels C and H must both be present";
    return false;
  }
  bool ok = mean["C"] < mean["H"];
  for (const char* m : {"AH", "CH", "ACH"}) {
    auto it = mean.find(m);
    if (it == mean.end()) continue;
    ok = ok && mean["C"] < it->second && it->second < mean["H"];
  }
  if (!ok && why) *why = "expected C < {AH, CH, ACH} < H";
  return ok;
}

bool run_ach(Context& c, const std::vector<TpRecord>& records, ScoreLevel level) {
  auto rep = ach_report(records, level);
  const std::string lv(score_level_name(level));
  write_report(c, "ach_" + lv + ".csv", ach_csv(rep, level));
  if (c.cfg.svg) write_report(c, "ach_" + lv + ".svg", ach_svg(rep, level));
  std::string why;
  bool ok = coarse_ach_ordering(rep, &why);
  c.out << "report-ach " << lv << ": " << rep.ordering << "; coarse ordering "
        << (ok ? "holds" : "fails (" + why + ")") << '\n';
  return ok;
}

int finish(const Context& c, bool ok) {
  if (!ok && c.cfg.strict) throw ValidationFailed{};
  return 0;
}

int cmd_report_phase(Context& c) {
  auto corpus = load_corpus(c);
  auto records = need_scores(c);
  bool ok = true;
  for (auto lv : levels(c)) ok = run_phase(c, corpus, records, lv) && ok;
  return finish(c, ok);
}

int cmd_report_ach(Context& c) {
  auto records = need_scores(c);
  bool ok = true;
  for (auto lv : levels(c)) ok = run_ach(c, records, lv) && ok;
  return finish(c, ok);
}

int cmd_report_density(Context& c) {
  auto records = need_scores(c);
  for (auto lv : levels(c)) {
    auto rep = density(records, lv, c.cfg.bins);
    const std::string name(score_level_name(lv));
    write_report(c, "density_" + name + ".csv", density_csv(rep));
    write_report(c, "peaks_" + name + ".csv", peaks_csv(rep));
    if (c.cfg.svg) write_report(c, "density_" + name + ".svg", density_svg(rep, lv));
    c.out << "report-density " << name << ": " << rep.peaks.size() << " peak(s)";
    for (double p : rep.peaks) c.out << ' ' << p;
    c.out << '\n';
  }
  return 0;
}

int cmd_report_correlation(Context& c) {
  auto records = need_scores(c);
  auto pairs = paired_scores(records);
  auto corr = correlation(pairs);
  write_report(c, "correlation.csv", correlation_csv(corr));
  auto grid = heatmap_grid(pairs, c.cfg.bins, c.cfg.bins);
  write_report(c, "heatmap.csv", grid_csv(grid));
  if (c.cfg.svg) write_report(c, "heatmap.svg", grid_svg(grid));
  c.out << "report-correlation: n=" << corr.n << " pearson=" << corr.pearson
        << " spearman=" << corr.spearman << '\n';
  return 0;
}

int cmd_report_trend(Context& c) {
  auto records = need_scores(c);
  for (auto lv : levels(c)) {
    auto years = yearly_trend(records, lv);
    const std::string name(score_level_name(lv));
    write_report(c, "trend_" + name + ".csv", trend_csv(years, lv));
    if (c.cfg.svg) write_report(c, "trend_" + name + ".svg", trend_svg(years, lv));
    c.out << "report-trend " << name << ": " << years.size() << " year(s)\n";
  }
  return 0;
}

int cmd_validate_all(Context& c) {
  auto corpus = load_corpus(c);
  auto records = need_scores(c);
  bool ok = true;
  for (auto lv : {ScoreLevel::Tpe, ScoreLevel::Tpd}) ok = run_phase(c, corpus, records, lv) && ok;
  for (auto lv : {ScoreLevel::Tpe, ScoreLevel::Tpd}) ok = run_ach(c, records, lv) && ok;
  c.out << "validate-all: " << (ok ? "PASS" : "FAIL") << '\n';
  return finish(c, ok);
}

int cmd_synth(Context& c) {
  auto data = generate_synthetic(c.opts.synthetic);
  std::ostringstream ss;
  write_records(ss, data.corpus);
  write_file_atomic(c.paths.root / "synthetic_corpus.jsonl", ss.str());
  write_file_atomic(c.paths.root / "synthetic_desc.xml", data.mesh_xml);
  write_file_atomic(c.paths.root / "synthetic_entities.tsv", data.entities_tsv);
  std::string groups = "doc_id,group\n";
  for (const auto& d : data.corpus.documents) groups += d.id + ',' + data.group.at(d.id) + '\n';
  write_file_atomic(c.paths.root / "synthetic_groups.csv", groups);
  c.out << "synth: " << data.corpus.documents.size() << " documents -> " << c.paths.root.string() << '\n';
  return 0;
}

int cmd_export_vectors(Context& c) {
  std::ostringstream ss;
  fs::path target;
  if (c.opts.model == "entity") {
    export_text(need_entity_model(c), ss);
    target = c.paths.root / "entity_vectors.txt";
  } else if (c.opts.model == "doc") {
    export_text(need_doc_model(c), ss);
    target = c.paths.root / "doc_vectors.txt";
  } else if (c.opts.model == "entity-axis" || c.opts.model == "doc-axis") {
    auto p = c.opts.model == "entity-axis" ? c.paths.entity_axis() : c.paths.doc_axis();
    require_file(p, "axis", "run `tp build-axis` first");
    export_text(load_axis(p), ss);
    target = c.paths.root / (c.opts.model + ".txt");
  } else {
    throw Error("unknown model \"" + c.opts.model + "\" (entity, doc, entity-axis, doc-axis)");
  }
  write_file_atomic(target, ss.str());
  c.out << "export-vectors: " << target.string() << '\n';
  return 0;
}

int cmd_show_config(Context& c) {
  c.out << dump_config(c.cfg);
  return 0;
}

const std::map<std::string, std::function<int(Context&)>>& table() {
  static const std::map<std::string, std::function<int(Context&)>> t = {
      {"ingest", cmd_ingest},
      {"mesh-stats", cmd_mesh_stats},
      {"train-entity", cmd_train_entity},
      {"train-doc", cmd_train_doc},
      {"build-axis", cmd_build_axis},
      {"score", cmd_score},
      {"report-phase", cmd_report_phase},
      {"report-ach", cmd_report_ach},
      {"report-density", cmd_report_density},
      {"report-correlation", cmd_report_correlation},
      {"report-trend", cmd_report_trend},
      {"validate-all", cmd_validate_all},
      {"synth", cmd_synth},
      {"export-vectors", cmd_export_vectors},
      {"show-config", cmd_show_config},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> names = {
      "ingest",       "mesh-stats",         "train-entity", "train-doc",    "build-axis",
      "score",        "report-phase",       "report-ach",   "report-density",
      "report-correlation", "report-trend", "validate-all", "synth",        "export-vectors",
      "show-config"};
  return names;
}

ArtifactPaths artifact_paths(const PipelineConfig& cfg) {
  if (!cfg.out.empty()) return {cfg.out};
  if (const char* home = std::getenv("TP_HOME"); home && *home) return {home};
  return {"tp_out"};
}

int run_command(const std::string& command, const PipelineConfig& cfg, const CommandOptions& opts,
                std::ostream& out, std::ostream& err) {
  Context c{cfg, opts, artifact_paths(cfg), out, err};
  auto it = table().find(command);
  if (it == table().end()) {
    err << "error: unknown command \"" << command << "\"\n";
    return 2;
  }
  try {
    return it->second(c);
  } catch (const ValidationFailed&) {
    err << command << ": validation failed (--strict)\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tp
