#include "zz/policy.hpp"

#include <algorithm>
#include <cmath>

#include "zz/errors.hpp"

namespace zz {

ToyPolicy::ToyPolicy(size_t vocab_size, size_t order) : vocab_size_(vocab_size), order_(order) {
  if (vocab_size == 0) throw DomainError("vocab must be non-empty");
  if (order > 3) throw DomainError("context order above 3 is not supported");
  n_contexts_ = 1;
  for (size_t i = 0; i < order; ++i) n_contexts_ *= vocab_size_ + 1;  // +1 for BOS
  params_.assign(n_contexts_ * vocab_size_, 0.0);
}

double& ToyPolicy::param(size_t context, size_t token) {
  return params_[context * vocab_size_ + token];
}

std::vector<double> ToyPolicy::log_row(size_t context) const {
  const double* row = params_.data() + context * vocab_size_;
  double max = row[0];
  for (size_t v = 1; v < vocab_size_; ++v) max = std::max(max, row[v]);
  double sum = 0.0;
  for (size_t v = 0; v < vocab_size_; ++v) sum += std::exp(row[v] - max);
  const double lse = max + std::log(sum);
  std::vector<double> out(vocab_size_);
  for (size_t v = 0; v < vocab_size_; ++v) out[v] = row[v] - lse;
  return out;
}

std::vector<double> ToyPolicy::prob_row(size_t context) const {
  std::vector<double> out = log_row(context);
  for (double& x : out) x = std::exp(x);
  return out;
}

size_t ToyPolicy::context_at(const std::vector<size_t>& sequence, size_t pos) const {
  size_t id = 0;
  size_t base = 1;
  for (size_t back = 1; back <= order_; ++back) {
    size_t token;
    if (pos >= back) {
      token = sequence[pos - back];
      if (token >= vocab_size_) throw DomainError("token id outside vocab");
    } else {
      token = bos_id();
    }
    id += token * base;
    base *= vocab_size_ + 1;
  }
  return id;
}

std::vector<double> ToyPolicy::token_log_probs(const std::vector<size_t>& prompt,
                                               const std::vector<size_t>& response) const {
  std::vector<size_t> sequence = prompt;
  sequence.insert(sequence.end(), response.begin(), response.end());
  std::vector<double> out;
  out.reserve(response.size());
  for (size_t pos = prompt.size(); pos < sequence.size(); ++pos) {
    if (sequence[pos] >= vocab_size_) throw DomainError("token id outside vocab");
    const std::vector<double> row = log_row(context_at(sequence, pos));
    out.push_back(row[sequence[pos]]);
  }
  return out;
}

size_t ToyPolicy::sample_constrained(size_t context, const std::vector<size_t>& allowed,
                                     Rng& rng) const {
  if (allowed.empty()) throw DomainError("no tokens allowed at decision slot");
  const std::vector<double> probs = prob_row(context);
  std::vector<double> weights;
  weights.reserve(allowed.size());
  for (size_t id : allowed) {
    if (id >= vocab_size_) throw DomainError("allowed token outside vocab");
    weights.push_back(probs[id]);
  }
  return allowed[rng.weighted_index(weights)];
}

}  // namespace zz
