#include "zz/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "zz/errors.hpp"

namespace zz {
namespace {

/// Per-context rows of the three policies, computed once per distinct
/// context encountered in a batch.
struct ContextCache {
  const ToyPolicy& policy;
  const ToyPolicy& old_policy;
  const ToyPolicy& ref_policy;
  std::unordered_map<size_t, size_t> index;
  std::vector<std::vector<double>> log_pi, log_old, log_ref, pi;

  size_t slot(size_t context) {
    auto found = index.find(context);
    if (found != index.end()) return found->second;
    const size_t s = log_pi.size();
    index.emplace(context, s);
    log_pi.push_back(policy.log_row(context));
    log_old.push_back(old_policy.log_row(context));
    log_ref.push_back(ref_policy.log_row(context));
    pi.push_back(policy.prob_row(context));
    return s;
  }
};

void check_compatible(const ToyPolicy& a, const ToyPolicy& b) {
  if (a.vocab_size() != b.vocab_size() || a.order() != b.order()) {
    throw DomainError("policies must share vocab and context order");
  }
}

/// FNV-1a over the parameter bytes. Folding this into the per-step sampler
/// seed makes sampling a pure function of (seed, parameters): unchanged
/// parameters replay the same batch, any update draws a fresh one.
uint64_t param_hash(const ToyPolicy& policy) {
  uint64_t h = 1469598103934665603ull;
  for (double x : policy.params()) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    for (int shift = 0; shift < 64; shift += 8) {
      h ^= (bits >> shift) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

double exact_kl(const std::vector<double>& log_pi, const std::vector<double>& log_ref,
                const std::vector<double>& pi) {
  double kl = 0.0;
  for (size_t v = 0; v < pi.size(); ++v) kl += pi[v] * (log_pi[v] - log_ref[v]);
  return kl;
}

template <typename TokenFn>
void for_each_token(const std::vector<GroupInstance>& groups, const ToyPolicy& policy,
                    TokenFn&& fn) {
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const GroupInstance& group = groups[gi];
    if (group.rollouts.empty()) throw DomainError("empty rollout group");
    for (const ScoredRollout& rollout : group.rollouts) {
      if (rollout.tokens.size() != rollout.advantages.size()) {
        throw DomainError("advantages must align with tokens");
      }
      if (rollout.tokens.empty()) throw DomainError("empty rollout");
      const double weight = 1.0 / (static_cast<double>(groups.size()) *
                                   static_cast<double>(group.rollouts.size()) *
                                   static_cast<double>(rollout.tokens.size()));
      std::vector<size_t> sequence = group.prompt;
      sequence.insert(sequence.end(), rollout.tokens.begin(), rollout.tokens.end());
      for (size_t t = 0; t < rollout.tokens.size(); ++t) {
        const size_t pos = group.prompt.size() + t;
        const size_t context = policy.context_at(sequence, pos);
        fn(context, rollout.tokens[t], rollout.advantages[t], weight);
      }
    }
  }
}

}  // namespace

double grpo_objective(const ToyPolicy& policy, const ToyPolicy& old_policy,
                      const ToyPolicy& ref_policy, const std::vector<GroupInstance>& groups,
                      const ObjectiveOptions& opt) {
  check_compatible(policy, old_policy);
  check_compatible(policy, ref_policy);
  ContextCache cache{policy, old_policy, ref_policy, {}, {}, {}, {}, {}};
  double objective = 0.0;
  for_each_token(groups, policy,
                 [&](size_t context, size_t token, double advantage, double weight) {
    const size_t s = cache.slot(context);
    const double lp = cache.log_pi[s][token];
    const double ratio = std::exp(lp - cache.log_old[s][token]);
    double gain = ratio * advantage;
    if (opt.clip) {
      const double clipped = std::clamp(ratio, 1.0 - opt.clip_eps, 1.0 + opt.clip_eps);
      gain = std::min(gain, clipped * advantage);
    }
    double kl = 0.0;
    if (opt.beta != 0.0) {
      if (opt.kl == KlEstimator::K3) {
        const double log_r = cache.log_ref[s][token] - lp;
        kl = std::exp(log_r) - log_r - 1.0;
      } else {
        kl = exact_kl(cache.log_pi[s], cache.log_ref[s], cache.pi[s]);
      }
    }
    objective += weight * (gain - opt.beta * kl);
  });
  return objective;
}

std::vector<double> grpo_gradient(const ToyPolicy& policy, const ToyPolicy& old_policy,
                                  const ToyPolicy& ref_policy,
                                  const std::vector<GroupInstance>& groups,
                                  const ObjectiveOptions& opt) {
  check_compatible(policy, old_policy);
  check_compatible(policy, ref_policy);
  const size_t vocab = policy.vocab_size();
  ContextCache cache{policy, old_policy, ref_policy, {}, {}, {}, {}, {}};
  std::vector<double> grad(policy.params().size(), 0.0);
  for_each_token(groups, policy,
                 [&](size_t context, size_t token, double advantage, double weight) {
    const size_t s = cache.slot(context);
    const std::vector<double>& pi = cache.pi[s];
    double* row = grad.data() + context * vocab;
    const double lp = cache.log_pi[s][token];
    const double ratio = std::exp(lp - cache.log_old[s][token]);
    // d(ratio * A)/d theta[c,v] = A * ratio * (delta_{v,token} - pi_v);
    // when the clipped branch of min() is active the term is constant.
    bool ratio_active = true;
    if (opt.clip) {
      const double clipped = std::clamp(ratio, 1.0 - opt.clip_eps, 1.0 + opt.clip_eps);
      ratio_active = ratio * advantage <= clipped * advantage;
    }
    if (ratio_active) {
      const double coef = weight * advantage * ratio;
      row[token] += coef;
      for (size_t v = 0; v < vocab; ++v) row[v] -= coef * pi[v];
    }
    if (opt.beta != 0.0) {
      if (opt.kl == KlEstimator::K3) {
        // d(r - log r - 1)/d log_pi = 1 - r, with r = ref/pi at the token.
        const double r = std::exp(cache.log_ref[s][token] - lp);
        const double factor = opt.beta * weight * (1.0 - r);
        row[token] -= factor;
        for (size_t v = 0; v < vocab; ++v) row[v] += factor * pi[v];
      } else {
        // d KL / d theta[c,v] = pi_v * (log(pi_v/ref_v) - KL).
        const double kl = exact_kl(cache.log_pi[s], cache.log_ref[s], cache.pi[s]);
        for (size_t v = 0; v < vocab; ++v) {
          const double gv = cache.log_pi[s][v] - cache.log_ref[s][v];
          row[v] -= opt.beta * weight * pi[v] * (gv - kl);
        }
      }
    }
  });
  return grad;
}

TrainingTrace train_loop(RolloutTask& task, const OptimizerConfig& cfg) {
  if (cfg.group_size < 2) throw DomainError("group statistics need at least two rollouts");
  ToyPolicy policy(task.vocab_size(), task.context_order());
  const ToyPolicy ref = policy;  // frozen at initialization
  ObjectiveOptions opt;
  opt.beta = cfg.beta;
  opt.kl = cfg.kl;
  opt.clip = cfg.clip;
  opt.clip_eps = cfg.clip_eps;

  TrainingTrace trace;
  trace.records.reserve(cfg.steps + 1);
  for (size_t step = 0; step <= cfg.steps; ++step) {
    // Sampling depends only on (seed, parameters): a zero learning rate
    // replays the same batch forever (constant trace), while any parameter
    // movement draws fresh rollouts.
    Rng rng(split_seed(cfg.seed) ^ param_hash(policy));
    std::vector<GroupInstance> batch;
    batch.reserve(task.n_prompts());
    TraceRecord record;
    record.step = step;
    const double n_scored = static_cast<double>(cfg.group_size * task.n_prompts());
    for (size_t prompt = 0; prompt < task.n_prompts(); ++prompt) {
      std::vector<std::vector<size_t>> tokens;
      tokens.reserve(cfg.group_size);
      for (size_t i = 0; i < cfg.group_size; ++i) {
        tokens.push_back(task.sample_rollout(policy, rng, prompt));
      }
      const std::vector<RewardVector> rewards = task.score(tokens, prompt);

      GroupInstance group;
      group.rollouts.reserve(cfg.group_size);
      if (cfg.mode == AdvantageMode::TokenAdv) {
        const GroupAdvantages ga = normalize_per_reward(rewards);
        for (size_t i = 0; i < cfg.group_size; ++i) {
          group.rollouts.push_back({tokens[i], token_advantages(ga, task.glue_mask(tokens[i]), i)});
        }
      } else {
        const std::vector<double> summed = summed_advantage(rewards);
        for (size_t i = 0; i < cfg.group_size; ++i) {
          group.rollouts.push_back({tokens[i], std::vector<double>(tokens[i].size(), summed[i])});
        }
      }
      batch.push_back(std::move(group));

      for (const RewardVector& rv : rewards) {
        record.mean_iou += rv.iou / n_scored;
        record.mean_acc += rv.acc / n_scored;
        record.mean_zoom += rv.zoom / n_scored;
        record.mean_format += rv.format / n_scored;
      }
    }

    const ToyPolicy old_policy = policy;  // refreshed every step
    const double objective = grpo_objective(policy, old_policy, ref, batch, opt);
    const std::vector<double> grad = grpo_gradient(policy, old_policy, ref, batch, opt);

    record.objective = objective;
    double norm_sq = 0.0;
    for (double x : grad) norm_sq += x * x;
    record.grad_norm = std::sqrt(norm_sq);
    trace.records.push_back(record);

    if (step < cfg.steps) {
      for (size_t p = 0; p < policy.params().size(); ++p) {
        policy.params()[p] += cfg.learning_rate * grad[p];
      }
    }
  }
  return trace;
}

}  // namespace zz
