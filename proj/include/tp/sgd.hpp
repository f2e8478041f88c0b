#pragma once

// Negative-sampling SGD kernels shared by the entity (CBOW) and document
// (PV-DM) trainers. Templated on the scalar type so the float training path
// and the double-precision gradient checks run the same code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "tp/linalg.hpp"
#include "tp/util.hpp"

namespace tp::sgd {

template <class Real>
Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

// -log(sigmoid(x)) without overflow.
inline double log1p_exp_neg(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// hidden = mean of the listed input rows.
template <class Real, class Index>
void mean_of_rows(const Matrix<Real>& input, std::span<const Index> rows, std::span<Real> hidden) {
  for (auto& h : hidden) h = Real(0);
  const std::size_t dim = hidden.size();
  for (auto r : rows) {
    const Real* src = input.row(static_cast<std::size_t>(r)).data();
    for (std::size_t k = 0; k < dim; ++k) hidden[k] += src[k];
  }
  const Real inv = Real(1) / static_cast<Real>(rows.size());
  for (auto& h : hidden) h *= inv;
}

// One logistic update for the target (label 1) and each negative (label 0).
// The step for the hidden vector (-lr * dLoss/dhidden, evaluated before any
// output row moved) is accumulated into hidden_step. Output rows are updated
// in place unless Output is a const matrix. Returns the loss at the starting
// point:  -log s(u_t . h) - sum_n log s(-u_n . h)
template <class Real, class Index, class Output>
double negative_sampling_step(std::span<const Real> hidden, std::span<Real> hidden_step,
                              Output& output, Index target, std::span<const Index> negatives,
                              Real lr) {
  const std::size_t dim = hidden.size();
  double loss = 0.0;
  auto one = [&](Index row, Real label) {
    auto out = output.row(static_cast<std::size_t>(row)).data();
    Real score = 0;
    for (std::size_t k = 0; k < dim; ++k) score += out[k] * hidden[k];
    loss += label > 0 ? log1p_exp_neg(static_cast<double>(score))
                      : log1p_exp_neg(-static_cast<double>(score));
    const Real g = lr * (label - sigmoid(score));
    for (std::size_t k = 0; k < dim; ++k) hidden_step[k] += g * out[k];
    if constexpr (!std::is_const_v<Output>) {
      for (std::size_t k = 0; k < dim; ++k) out[k] += g * hidden[k];
    }
  };
  one(target, Real(1));
  for (auto n : negatives) one(n, Real(0));
  return loss;
}

// Spreads the hidden step over the rows that were averaged into hidden.
// Each occurrence receives step / rows.size(), which is the exact gradient
// step for the mean.
template <class Real, class Index>
void apply_to_inputs(Matrix<Real>& input, std::span<const Index> rows,
                     std::span<const Real> hidden_step) {
  const Real inv = Real(1) / static_cast<Real>(rows.size());
  const std::size_t dim = hidden_step.size();
  for (auto r : rows) {
    Real* dst = input.row(static_cast<std::size_t>(r)).data();
    for (std::size_t k = 0; k < dim; ++k) dst[k] += hidden_step[k] * inv;
  }
}

// Unigram^0.75 sampling table over vocabulary indices.
class NegativeTable {
 public:
  NegativeTable() = default;
  explicit NegativeTable(std::span<const std::uint64_t> counts) {
    if (counts.empty()) return;
    std::size_t size = counts.size() * 1000;
    if (size > 10'000'000) size = 10'000'000;
    if (size < 10'000) size = 10'000;
    double z = 0.0;
    for (auto c : counts) z += std::pow(static_cast<double>(c), 0.75);
    table_.reserve(size);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      double share = std::pow(static_cast<double>(counts[i]), 0.75) / z;
      auto n = static_cast<std::size_t>(share * static_cast<double>(size));
      if (n == 0) n = 1;
      for (std::size_t k = 0; k < n; ++k) table_.push_back(static_cast<std::int32_t>(i));
    }
  }

  // Draws until the result differs from target. Requires at least two
  // distinct entries (callers skip negatives for a one-word vocabulary).
  std::int32_t sample(Rng& rng, std::int32_t target) const {
    while (true) {
      auto v = table_[rng.below(table_.size())];
      if (v != target) return v;
    }
  }

  bool empty() const { return table_.empty(); }

 private:
  std::vector<std::int32_t> table_;
};

}  // namespace tp::sgd

namespace tp::sgd {

// One CBOW update: the context rows of input are averaged into the hidden
// vector, which predicts target against the negatives. Returns the loss at
// the starting point. hidden and step are scratch buffers of size dim.
template <class Real, class Index>
double cbow_update(Matrix<Real>& input, Matrix<Real>& output, std::span<const Index> context_rows,
                   Index target, std::span<const Index> negatives, Real lr,
                   std::span<Real> hidden, std::span<Real> step) {
  mean_of_rows<Real, Index>(input, context_rows, hidden);
  for (auto& s : step) s = Real(0);
  double loss = negative_sampling_step<Real, Index>(std::span<const Real>(hidden), step, output,
                                                    target, negatives, lr);
  apply_to_inputs<Real, Index>(input, context_rows, step);
  return loss;
}

// One PV-DM update: the hidden vector is the mean of the document vector and
// the context word rows. With const Words/Output matrices only the document
// vector moves (inference).
template <class Real, class Index, class Words, class Output>
double pvdm_update(Words& words, Output& output, std::span<Real> doc_vec,
                   std::span<const Index> context_rows, Index target,
                   std::span<const Index> negatives, Real lr, std::span<Real> hidden,
                   std::span<Real> step) {
  const std::size_t dim = hidden.size();
  for (std::size_t k = 0; k < dim; ++k) hidden[k] = doc_vec[k];
  for (auto r : context_rows) {
    const auto src = words.row(static_cast<std::size_t>(r)).data();
    for (std::size_t k = 0; k < dim; ++k) hidden[k] += src[k];
  }
  const Real inv = Real(1) / static_cast<Real>(context_rows.size() + 1);
  for (auto& h : hidden) h *= inv;
  for (auto& s : step) s = Real(0);
  const double loss = negative_sampling_step<Real, Index>(std::span<const Real>(hidden), step,
                                                          output, target, negatives, lr);
  for (std::size_t k = 0; k < dim; ++k) doc_vec[k] += step[k] * inv;
  if constexpr (!std::is_const_v<Words>) {
    for (auto r : context_rows) {
      auto dst = words.row(static_cast<std::size_t>(r)).data();
      for (std::size_t k = 0; k < dim; ++k) dst[k] += step[k] * inv;
    }
  }
  return loss;
}

}  // namespace tp::sgd
