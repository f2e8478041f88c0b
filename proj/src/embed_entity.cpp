#include "tp/embed_entity.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "tp/binio.hpp"
#include "tp/error.hpp"
#include "tp/sgd.hpp"
#include "tp/util.hpp"

namespace tp {

namespace {

constexpr std::uint32_t kEntityFormatVersion = 1;

std::size_t utf8_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

struct Vocab {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
};

// Count-filtered vocabulary ordered by count (descending), then token, so
// the index assignment is independent of corpus order.
Vocab build_vocab(std::span<const TokenStream> corpus, int min_count) {
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& s : corpus)
    for (const auto& t : s) ++freq[t];
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : freq)
    if (c >= static_cast<std::uint64_t>(min_count)) kept.emplace_back(w, c);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocab v;
  for (auto& [w, c] : kept) {
    v.words.push_back(w);
    v.counts.push_back(c);
  }
  return v;
}

void write_hyperparams(binio::Writer& w, const EntityHyperparams& hp) {
  w.i32(hp.dim);
  w.f64(hp.lr);
  w.i32(hp.min_subword);
  w.i32(hp.max_subword);
  w.i32(hp.window);
  w.i32(hp.epochs);
  w.i32(hp.negatives);
  w.i32(hp.min_count);
  w.i64(hp.buckets);
  w.i32(hp.threads);
  w.u64(hp.seed);
  w.f64(hp.max_norm);
}

EntityHyperparams read_hyperparams(binio::Reader& r) {
  EntityHyperparams hp;
  hp.dim = r.i32();
  hp.lr = r.f64();
  hp.min_subword = r.i32();
  hp.max_subword = r.i32();
  hp.window = r.i32();
  hp.epochs = r.i32();
  hp.negatives = r.i32();
  hp.min_count = r.i32();
  hp.buckets = r.i64();
  hp.threads = r.i32();
  hp.seed = r.u64();
  hp.max_norm = r.f64();
  return hp;
}

}  // namespace

void EntityHyperparams::validate() const {
  if (dim < 1) throw Error("entity hyperparameters: dim must be >= 1");
  if (min_subword < 1 || min_subword > max_subword)
    throw Error("entity hyperparameters: need 1 <= min_subword <= max_subword");
  if (!(lr > 0.0)) throw Error("entity hyperparameters: lr must be > 0");
  if (window < 1) throw Error("entity hyperparameters: window must be >= 1");
  if (epochs < 1) throw Error("entity hyperparameters: epochs must be >= 1");
  if (negatives < 0) throw Error("entity hyperparameters: negatives must be >= 0");
  if (min_count < 1) throw Error("entity hyperparameters: min_count must be >= 1");
  if (buckets < 0) throw Error("entity hyperparameters: buckets must be >= 0");
  if (threads < 1) throw Error("entity hyperparameters: threads must be >= 1");
}

std::vector<std::string> subword_ngrams(std::string_view word, int minn, int maxn) {
  std::string w;
  w.reserve(word.size() + 2);
  w.push_back('<');
  w.append(word);
  w.push_back('>');
  // Code point boundaries.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < w.size(); i += utf8_len(static_cast<unsigned char>(w[i])))
    starts.push_back(i);
  const std::size_t cps = starts.size();
  starts.push_back(w.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cps; ++i) {
    for (int n = minn; n <= maxn; ++n) {
      std::size_t end = i + static_cast<std::size_t>(n);
      if (end > cps) break;
      if (i == 0 && end == cps) continue;
      out.emplace_back(w.substr(starts[i], starts[end] - starts[i]));
    }
  }
  return out;
}

std::optional<std::int32_t> EntityModel::word_id(std::string_view token) const {
  auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::int32_t EntityModel::bucket_row(std::string_view ngram) const {
  return static_cast<std::int32_t>(words.size() +
                                   fnv1a32(ngram) % static_cast<std::uint64_t>(hyperparams.buckets));
}

std::vector<std::int32_t> EntityModel::input_rows(std::string_view token) const {
  std::vector<std::int32_t> rows;
  if (auto id = word_id(token)) rows.push_back(*id);
  if (hyperparams.buckets > 0) {
    for (const auto& g : subword_ngrams(token, hyperparams.min_subword, hyperparams.max_subword))
      rows.push_back(bucket_row(g));
  }
  return rows;
}

void EntityModel::reindex() {
  index.clear();
  for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], static_cast<std::int32_t>(i));
}

EntityModel train_cbow(std::span<const TokenStream> corpus_tokens, const EntityHyperparams& hp,
                       TrainLog* log) {
  hp.validate();
  if (corpus_tokens.empty()) throw Error("train_cbow: empty corpus");

  EntityModel m;
  m.hyperparams = hp;
  {
    auto v = build_vocab(corpus_tokens, hp.min_count);
    if (v.words.empty()) throw Error("train_cbow: empty vocabulary (no token reaches min_count)");
    m.words = std::move(v.words);
    m.counts = std::move(v.counts);
  }
  m.reindex();
  const auto nwords = m.words.size();
  const auto dim = static_cast<std::size_t>(hp.dim);

  std::vector<std::vector<std::int32_t>> word_rows(nwords);
  for (std::size_t i = 0; i < nwords; ++i) word_rows[i] = m.input_rows(m.words[i]);

  std::vector<std::vector<std::int32_t>> docs;
  docs.reserve(corpus_tokens.size());
  std::uint64_t total_tokens = 0;
  for (const auto& s : corpus_tokens) {
    std::vector<std::int32_t> ids;
    ids.reserve(s.size());
    for (const auto& t : s)
      if (auto id = m.word_id(t)) ids.push_back(*id);
    total_tokens += ids.size();
    docs.push_back(std::move(ids));
  }

  m.input = Matrix<float>(nwords + static_cast<std::size_t>(hp.buckets), dim);
  m.output = Matrix<float>(nwords, dim);
  {
    Rng init(derive_seed(hp.seed, "entity.init"));
    const double bound = 1.0 / static_cast<double>(dim);
    for (auto& x : m.input.data()) x = static_cast<float>(init.uniform(-bound, bound));
  }
  sgd::NegativeTable table(m.counts);
  const bool use_negatives = nwords > 1 && hp.negatives > 0;

  const double total_work = static_cast<double>(total_tokens) * hp.epochs;
  std::atomic<std::uint64_t> processed{0};
  std::vector<double> thread_loss(static_cast<std::size_t>(hp.threads), 0.0);

  auto worker = [&](int tid) {
    Rng rng(derive_seed(hp.seed, "entity.thread." + std::to_string(tid)));
    std::vector<float> hidden(dim), step(dim);
    std::vector<std::int32_t> ctx, negs(static_cast<std::size_t>(hp.negatives));
    double loss = 0.0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
      for (std::size_t d = static_cast<std::size_t>(tid); d < docs.size();
           d += static_cast<std::size_t>(hp.threads)) {
        const auto& doc = docs[d];
        for (std::size_t w = 0; w < doc.size(); ++w) {
          const double progress = static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed));
          const auto lr = static_cast<float>(hp.lr * std::max(0.0, 1.0 - progress / total_work));
          const auto b = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(hp.window)));
          ctx.clear();
          const std::size_t lo = w >= b ? w - b : 0;
          const std::size_t hi = std::min(doc.size() - 1, w + b);
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == w) continue;
            const auto& rows = word_rows[static_cast<std::size_t>(doc[c])];
            ctx.insert(ctx.end(), rows.begin(), rows.end());
          }
          if (ctx.empty()) continue;
          const std::int32_t target = doc[w];
          std::span<const std::int32_t> neg_span;
          if (use_negatives) {
            for (auto& n : negs) n = table.sample(rng, target);
            neg_span = negs;
          }
          loss = sgd::cbow_update<float, std::int32_t>(m.input, m.output, ctx, target, neg_span,
                                                       lr, hidden, step);
        }
      }
    }
    thread_loss[static_cast<std::size_t>(tid)] = loss;
  };

  if (hp.threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < hp.threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  if (!all_finite(m.input.data()) || !all_finite(m.output.data()))
    throw Error("train_cbow: non-finite values after training (diverged)");
  for (std::size_t r = 0; r < m.input.rows(); ++r) {
    auto row = m.input.row(r);
    double n = std::sqrt(dot(std::span<const float>(row), std::span<const float>(row)));
    if (n > hp.max_norm)
      throw Error("train_cbow: vector norm " + std::to_string(n) + " exceeds bound " +
                  std::to_string(hp.max_norm) + " (diverged)");
  }
  if (log) {
    log->tokens = total_tokens;
    log->final_loss = thread_loss[0];
  }
  return m;
}

TermVector vector(const EntityModel& model, std::string_view term) {
  if (term.empty()) throw Error("vector: empty term");
  TermVector out;
  out.values.assign(static_cast<std::size_t>(model.hyperparams.dim), 0.0);
  auto rows = model.input_rows(term);
  if (rows.empty()) {
    out.no_information = true;
    return out;
  }
  for (auto r : rows) {
    auto row = model.input.row(static_cast<std::size_t>(r));
    for (std::size_t k = 0; k < row.size(); ++k) out.values[k] += static_cast<double>(row[k]);
  }
  for (auto& x : out.values) x /= static_cast<double>(rows.size());
  return out;
}

std::string serialize(const EntityModel& m) {
  binio::Writer w;
  w.magic("TPE1");
  w.u32(kEntityFormatVersion);
  write_hyperparams(w, m.hyperparams);
  w.i64(static_cast<std::int64_t>(m.words.size()));
  for (std::size_t i = 0; i < m.words.size(); ++i) {
    w.str(m.words[i]);
    w.u64(m.counts[i]);
  }
  w.f32s(m.input.data());
  w.f32s(m.output.data());
  return w.data();
}

void save(const EntityModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(model));
}

EntityModel deserialize_entity_model(std::string_view bytes) {
  binio::Reader r(bytes, "TPE1 entity model");
  r.expect_magic("TPE1");
  if (auto v = r.u32(); v != kEntityFormatVersion)
    r.fail("unsupported format version " + std::to_string(v));
  EntityModel m;
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
  const auto dim = static_cast<std::size_t>(m.hyperparams.dim);
  const auto in_rows = static_cast<std::size_t>(nwords) + static_cast<std::size_t>(m.hyperparams.buckets);
  if ((in_rows + static_cast<std::size_t>(nwords)) * dim * 4 > bytes.size()) r.fail("truncated file");
  m.input = Matrix<float>(in_rows, dim);
  m.output = Matrix<float>(static_cast<std::size_t>(nwords), dim);
  r.f32s(m.input.data());
  r.f32s(m.output.data());
  if (!r.at_end()) r.fail("trailing bytes");
  m.reindex();
  return m;
}

EntityModel load_entity_model(const std::filesystem::path& path) {
  return deserialize_entity_model(read_file(path));
}

void export_text(const EntityModel& model, std::ostream& out) {
  out << model.words.size() << ' ' << model.hyperparams.dim << '\n';
  char buf[32];
  for (const auto& w : model.words) {
    auto v = vector(model, w);
    out << w;
    for (double x : v.values) {
      std::snprintf(buf, sizeof buf, " %.9g", x);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace tp
