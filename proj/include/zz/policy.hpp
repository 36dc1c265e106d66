#pragma once

#include <cstddef>
#include <vector>

#include "zz/rng.hpp"

namespace zz {

/// Tabular autoregressive categorical policy: one softmax row of logits per
/// context, where a context is the previous `order` token ids (BOS-padded
/// at the sequence start). Small enough to verify against brute force and
/// finite differences.
class ToyPolicy {
 public:
  ToyPolicy(size_t vocab_size, size_t order);

  size_t vocab_size() const { return vocab_size_; }
  size_t order() const { return order_; }
  size_t bos_id() const { return vocab_size_; }
  size_t n_contexts() const { return n_contexts_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  double& param(size_t context, size_t token);

  /// Log-softmax over the vocab for one context row. Sums to 1 in
  /// probability space within 1e-9.
  std::vector<double> log_row(size_t context) const;
  std::vector<double> prob_row(size_t context) const;

  /// Context id used to predict sequence[pos]; positions before the start
  /// read BOS. Tokens must be < vocab_size (DomainError otherwise).
  size_t context_at(const std::vector<size_t>& sequence, size_t pos) const;

  /// Per-token log-probabilities of response given prompt, full-vocab
  /// softmax at every position.
  std::vector<double> token_log_probs(const std::vector<size_t>& prompt,
                                      const std::vector<size_t>& response) const;

  /// Draw one token from the softmax restricted to `allowed` (renormalized).
  size_t sample_constrained(size_t context, const std::vector<size_t>& allowed, Rng& rng) const;

 private:
  size_t vocab_size_;
  size_t order_;
  size_t n_contexts_;
  std::vector<double> params_;  // n_contexts x vocab, row-major
};

}  // namespace zz
