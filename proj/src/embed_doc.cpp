#include "tp/embed_doc.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <atomic>
#include <thread>

#include "tp/binio.hpp"
#include "tp/error.hpp"
#include "tp/sgd.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

constexpr std::uint32_t kDocFormatVersion = 1;

void init_uniform(std::span<float> v, Rng& rng, std::size_t dim) {
  const double bound = 0.5 / static_cast<double>(dim);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-bound, bound));
}

std::vector<std::int32_t> to_ids(const DocModel& m, const TokenStream& tokens) {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto id = m.word_id(t)) ids.push_back(*id);
  return ids;
}

// Runs one pass of PV-DM updates over a document. Const word/output
// matrices freeze everything except doc_vec.
template <class Words, class Output>
double train_document(const DocHyperparams& hp, Words& words, Output& output,
                      std::span<float> doc_vec, const std::vector<std::int32_t>& ids,
                      const sgd::NegativeTable& table, Rng& rng, float lr,
                      std::vector<float>& hidden, std::vector<float>& step,
                      std::vector<std::int32_t>& ctx, std::vector<std::int32_t>& negs) {
  const bool use_negatives = words.rows() > 1 && hp.negatives > 0;
  double loss = 0.0;
  for (std::size_t w = 0; w < ids.size(); ++w) {
    const auto b = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(hp.window)));
    ctx.clear();
    const std::size_t lo = w >= b ? w - b : 0;
    const std::size_t hi = std::min(ids.size() - 1, w + b);
    for (std::size_t c = lo; c <= hi; ++c)
      if (c != w) ctx.push_back(ids[c]);
    std::span<const std::int32_t> neg_span;
    if (use_negatives) {
      for (auto& n : negs) n = table.sample(rng, ids[w]);
      neg_span = negs;
    }
    loss = sgd::pvdm_update<float, std::int32_t>(words, output, doc_vec,
                                                 std::span<const std::int32_t>(ctx), ids[w],
                                                 neg_span, lr, std::span<float>(hidden),
                                                 std::span<float>(step));
  }
  return loss;
}

void write_hyperparams(binio::Writer& w, const DocHyperparams& hp) {
  w.i32(hp.dim);
  w.f64(hp.lr);
  w.i32(hp.window);
  w.i32(hp.epochs);
  w.i32(hp.threads);
  w.i32(hp.negatives);
  w.i32(hp.min_count);
  w.i32(hp.infer_epochs);
  w.u64(hp.seed);
}

DocHyperparams read_hyperparams(binio::Reader& r) {
  DocHyperparams hp;
  hp.dim = r.i32();
  hp.lr = r.f64();
  hp.window = r.i32();
  hp.epochs = r.i32();
  hp.threads = r.i32();
  hp.negatives = r.i32();
  hp.min_count = r.i32();
  hp.infer_epochs = r.i32();
  hp.seed = r.u64();
  return hp;
}

}  // namespace

void DocHyperparams::validate() const {
  if (dim < 1) throw Error("doc hyperparameters: dim must be >= 1");
  if (window < 1) throw Error("doc hyperparameters: window must be >= 1");
  if (epochs < 1) throw Error("doc hyperparameters: epochs must be >= 1");
  if (!(lr > 0.0)) throw Error("doc hyperparameters: lr must be > 0");
  if (threads < 1) throw Error("doc hyperparameters: threads must be >= 1");
  if (negatives < 0) throw Error("doc hyperparameters: negatives must be >= 0");
  if (min_count < 1) throw Error("doc hyperparameters: min_count must be >= 1");
  if (infer_epochs < 1) throw Error("doc hyperparameters: infer_epochs must be >= 1");
}

std::optional<std::int32_t> DocModel::word_id(std::string_view token) const {
  auto it = word_index.find(std::string(token));
  if (it == word_index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> DocModel::doc_row(std::string_view id) const {
  auto it = doc_rows.find(std::string(id));
  if (it == doc_rows.end()) return std::nullopt;
  return it->second;
}

Vec DocModel::doc_vector(std::int32_t row) const {
  auto r = doc_vectors.row(static_cast<std::size_t>(row));
  return Vec(r.begin(), r.end());
}

void DocModel::reindex() {
  word_index.clear();
  for (std::size_t i = 0; i < words.size(); ++i) word_index.emplace(words[i], static_cast<std::int32_t>(i));
  doc_rows.clear();
  for (std::size_t i = 0; i < doc_ids.size(); ++i) doc_rows.emplace(doc_ids[i], static_cast<std::int32_t>(i));
  negatives = sgd::NegativeTable(counts);
}

std::uint64_t document_seed(std::uint64_t seed, std::string_view doc_id) {
  return seed ^ fnv1a64(doc_id);
}

DocModel train_pvdm(const Corpus& corpus, const EntityDictionary& dict, const DocHyperparams& hp,
                    TrainLog* log) {
  hp.validate();
  if (corpus.documents.empty()) throw Error("train_pvdm: empty corpus");

  std::vector<TokenStream> streams;
  streams.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) streams.push_back(document_text_tokens(d, dict));

  DocModel m;
  m.hyperparams = hp;
  {
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& s : streams)
      for (const auto& t : s) ++freq[t];
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [w, c] : freq)
      if (c >= static_cast<std::uint64_t>(hp.min_count)) kept.emplace_back(w, c);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (auto& [w, c] : kept) {
      m.words.push_back(w);
      m.counts.push_back(c);
    }
  }
  m.reindex();

  std::vector<std::vector<std::int32_t>> doc_tokens;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    auto ids = to_ids(m, streams[i]);
    if (ids.empty()) {
      if (log)
        log->warnings.push_back("document \"" + corpus.documents[i].id +
                                "\" has no in-vocabulary tokens; skipped");
      continue;
    }
    m.doc_ids.push_back(corpus.documents[i].id);
    doc_tokens.push_back(std::move(ids));
  }
  if (m.doc_ids.empty()) throw Error("train_pvdm: every document is empty after preprocessing");
  m.reindex();
  if (m.doc_rows.size() != m.doc_ids.size()) throw Error("train_pvdm: duplicate document ids");

  const auto dim = static_cast<std::size_t>(hp.dim);
  const auto nwords = m.words.size();
  m.word_vectors = Matrix<float>(nwords, dim);
  m.output = Matrix<float>(nwords, dim);
  m.doc_vectors = Matrix<float>(m.doc_ids.size(), dim);
  {
    Rng rng(derive_seed(hp.seed, "doc.words"));
    init_uniform(m.word_vectors.data(), rng, dim);
  }
  for (std::size_t r = 0; r < m.doc_ids.size(); ++r) {
    Rng rng(document_seed(hp.seed, m.doc_ids[r]));
    init_uniform(m.doc_vectors.row(r), rng, dim);
  }
  // Canonical visiting order: by document id.
  std::vector<std::size_t> order(m.doc_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.doc_ids[a] < m.doc_ids[b]; });

  std::uint64_t total_tokens = 0;
  for (const auto& t : doc_tokens) total_tokens += t.size();
  const double total_work = static_cast<double>(total_tokens) * hp.epochs;

  std::vector<double> thread_loss(static_cast<std::size_t>(hp.threads), 0.0);
  std::atomic<std::uint64_t> processed{0};
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    {
      // Deterministic per-epoch shuffle of the canonical order.
      Rng shuffle(derive_seed(hp.seed, "doc.epoch." + std::to_string(epoch)));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    auto worker = [&](int tid) {
      Rng rng(derive_seed(hp.seed, "doc.thread." + std::to_string(tid) + "." + std::to_string(epoch)));
      std::vector<float> hidden(dim), step(dim);
      std::vector<std::int32_t> ctx, negs(static_cast<std::size_t>(hp.negatives));
      for (std::size_t i = static_cast<std::size_t>(tid); i < order.size();
           i += static_cast<std::size_t>(hp.threads)) {
        const auto row = order[i];
        const auto& ids = doc_tokens[row];
        const double progress =
            static_cast<double>(processed.fetch_add(ids.size(), std::memory_order_relaxed));
        const auto lr = static_cast<float>(hp.lr * std::max(0.0, 1.0 - progress / total_work));
        thread_loss[static_cast<std::size_t>(tid)] =
            train_document(hp, m.word_vectors, m.output, m.doc_vectors.row(row), ids, m.negatives,
                           rng, lr, hidden, step, ctx, negs);
      }
    };
    if (hp.threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < hp.threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
  }

  if (!all_finite(m.word_vectors.data()) || !all_finite(m.doc_vectors.data()) ||
      !all_finite(m.output.data()))
    throw Error("train_pvdm: non-finite values after training (diverged)");
  if (log) {
    log->tokens = total_tokens;
    log->final_loss = thread_loss[0];
  }
  return m;
}

Vec infer_doc_vector(const DocModel& model, const TokenStream& tokens, std::string_view doc_id) {
  const auto& hp = model.hyperparams;
  auto ids = to_ids(model, tokens);
  if (ids.empty())
    throw NoInformation("document \"" + std::string(doc_id) + "\" has no in-vocabulary tokens");
  const auto dim = static_cast<std::size_t>(hp.dim);
  const auto seed = document_seed(hp.seed, doc_id);
  std::vector<float> doc(dim);
  {
    Rng init(seed);
    init_uniform(doc, init, dim);
  }
  Rng rng(derive_seed(seed, "infer"));
  std::vector<float> hidden(dim), step(dim);
  std::vector<std::int32_t> ctx, negs(static_cast<std::size_t>(hp.negatives));
  const double total = static_cast<double>(ids.size()) * hp.infer_epochs;
  double done = 0.0;
  for (int e = 0; e < hp.infer_epochs; ++e) {
    const auto lr = static_cast<float>(hp.lr * std::max(0.0, 1.0 - done / total));
    train_document(hp, model.word_vectors, model.output, std::span<float>(doc), ids,
                   model.negatives, rng, lr, hidden, step, ctx, negs);
    done += static_cast<double>(ids.size());
  }
  return Vec(doc.begin(), doc.end());
}

Vec infer_doc_vector(const DocModel& model, const Document& doc, const EntityDictionary& dict) {
  return infer_doc_vector(model, document_text_tokens(doc, dict), doc.id);
}

std::string serialize(const DocModel& m) {
  binio::Writer w;
  w.magic("TPD1");
  w.u32(kDocFormatVersion);
  write_hyperparams(w, m.hyperparams);
  w.i64(static_cast<std::int64_t>(m.words.size()));
  for (std::size_t i = 0; i < m.words.size(); ++i) {
    w.str(m.words[i]);
    w.u64(m.counts[i]);
  }
  w.i64(static_cast<std::int64_t>(m.doc_ids.size()));
  for (const auto& id : m.doc_ids) w.str(id);
  w.f32s(m.word_vectors.data());
  w.f32s(m.output.data());
  w.f32s(m.doc_vectors.data());
  return w.data();
}

void save(const DocModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(model));
}

DocModel deserialize_doc_model(std::string_view bytes) {
  binio::Reader r(bytes, "TPD1 document model");
  r.expect_magic("TPD1");
  if (auto v = r.u32(); v != kDocFormatVersion) r.fail("unsupported format version " + std::to_string(v));
  DocModel m;
  m.hyperparams = read_hyperparams(r);
  try {
    m.hyperparams.validate();
  } catch (const Error& e) {
    r.fail(std::string("invalid header: ") + e.what());
  }
  auto nwords = r.i64();
  if (nwords < 0 || static_cast<std::uint64_t>(nwords) > bytes.size()) r.fail("invalid vocabulary size");
  for (std::int64_t i = 0; i < nwords; ++i) {
    m.words.push_back(r.str());
    m.counts.push_back(r.u64());
  }
  auto ndocs = r.i64();
  if (ndocs < 0 || static_cast<std::uint64_t>(ndocs) > bytes.size()) r.fail("invalid document count");
  for (std::int64_t i = 0; i < ndocs; ++i) m.doc_ids.push_back(r.str());
  const auto dim = static_cast<std::size_t>(m.hyperparams.dim);
  if ((2 * static_cast<std::size_t>(nwords) + static_cast<std::size_t>(ndocs)) * dim * 4 > bytes.size())
    r.fail("truncated file");
  m.word_vectors = Matrix<float>(static_cast<std::size_t>(nwords), dim);
  m.output = Matrix<float>(static_cast<std::size_t>(nwords), dim);
  m.doc_vectors = Matrix<float>(static_cast<std::size_t>(ndocs), dim);
  r.f32s(m.word_vectors.data());
  r.f32s(m.output.data());
  r.f32s(m.doc_vectors.data());
  if (!r.at_end()) r.fail("trailing bytes");
  m.reindex();
  return m;
}

DocModel load_doc_model(const std::filesystem::path& path) {
  return deserialize_doc_model(read_file(path));
}

void export_text(const DocModel& model, std::ostream& out) {
  out << model.doc_ids.size() << ' ' << model.hyperparams.dim << '\n';
  char buf[32];
  for (std::size_t r = 0; r < model.doc_ids.size(); ++r) {
    out << model.doc_ids[r];
    for (float x : model.doc_vectors.row(r)) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(x));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace tp
