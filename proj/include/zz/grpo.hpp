#pragma once

#include <cstdint>
#include <vector>

#include "zz/advantage.hpp"
#include "zz/policy.hpp"
#include "zz/response.hpp"
#include "zz/rewards.hpp"
#include "zz/rng.hpp"

namespace zz {

enum class KlEstimator { K3, Exact };

struct ObjectiveOptions {
  double beta = 0.04;
  KlEstimator kl = KlEstimator::K3;
  bool clip = false;        // ratio clipping is off by default
  double clip_eps = 0.2;
};

/// One sampled response with its per-token advantages attached.
struct ScoredRollout {
  std::vector<size_t> tokens;
  std::vector<double> advantages;  // same length as tokens
};

struct GroupInstance {
  std::vector<size_t> prompt;
  std::vector<ScoredRollout> rollouts;
};

/// Surrogate objective: mean over groups of
///   (1/G) sum_i (1/|o_i|) sum_t [ ratio_{i,t} * A_{i,t} - beta * KL_t ],
/// ratio = exp(log pi - log pi_old), KL against the frozen reference.
/// KL per token: k3 estimator r - log r - 1 with r = ref/pi at the sampled
/// token (non-negative pointwise), or the exact categorical divergence.
double grpo_objective(const ToyPolicy& policy, const ToyPolicy& old_policy,
                      const ToyPolicy& ref_policy, const std::vector<GroupInstance>& groups,
                      const ObjectiveOptions& opt);

/// Analytic gradient of grpo_objective in policy.params(), treating the old
/// and reference policies as constants.
std::vector<double> grpo_gradient(const ToyPolicy& policy, const ToyPolicy& old_policy,
                                  const ToyPolicy& ref_policy,
                                  const std::vector<GroupInstance>& groups,
                                  const ObjectiveOptions& opt);

/// Environment driven by train_loop: sampling, scoring, and the glue mask
/// for credit routing live behind this seam. A task may expose several
/// prompts; each contributes one group per step and the batch averages
/// over them.
class RolloutTask {
 public:
  virtual ~RolloutTask() = default;
  virtual size_t vocab_size() const = 0;
  virtual size_t context_order() const = 0;
  virtual size_t n_prompts() const { return 1; }
  virtual std::vector<size_t> sample_rollout(const ToyPolicy& policy, Rng& rng,
                                             size_t prompt) const = 0;
  virtual std::vector<RewardVector> score(const std::vector<std::vector<size_t>>& group,
                                          size_t prompt) = 0;
  virtual TokenSpanMap glue_mask(const std::vector<size_t>& tokens) const = 0;
};

struct OptimizerConfig {
  double beta = 0.04;
  size_t group_size = 8;
  double learning_rate = 0.05;
  size_t steps = 0;
  uint64_t seed = 0;
  AdvantageMode mode = AdvantageMode::TokenAdv;
  KlEstimator kl = KlEstimator::K3;
  bool clip = false;
  double clip_eps = 0.2;
};

struct TraceRecord {
  size_t step = 0;
  double mean_iou = 0.0;
  double mean_acc = 0.0;
  double mean_zoom = 0.0;
  double mean_format = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRecord> records;  // steps + 1 entries, one per policy state
};

/// Plain gradient ascent: sample a group, score, advantage, one update per
/// batch; the old policy refreshes every step and the reference stays at
/// initialization. The per-step sampler restarts from the same seed, so
/// records depend only on the parameters (learning_rate 0 gives a constant
/// trace) and paired runs share their randomness.
TrainingTrace train_loop(RolloutTask& task, const OptimizerConfig& cfg);

}  // namespace zz
