#pragma once

#include <array>
#include <vector>

#include "zz/response.hpp"
#include "zz/rewards.hpp"

namespace zz {

enum class AdvantageMode { TokenAdv, Summed };

enum class RewardKind : size_t { Format = 0, Acc = 1, IoU = 2, Zoom = 3 };
inline constexpr size_t kNumRewardKinds = 4;

/// Default guard below which a reward kind counts as zero-variance and its
/// advantages collapse to 0 (binary rewards tie often; dividing by a tiny
/// std must not blow up).
inline constexpr double kAdvantageEps = 1e-6;

/// Group-normalized advantages, one sequence per reward kind, each of
/// length G. Normalization uses the population std (divide by G).
struct GroupAdvantages {
  std::array<std::vector<double>, kNumRewardKinds> per_reward;
  AdvantageMode mode = AdvantageMode::TokenAdv;

  const std::vector<double>& of(RewardKind kind) const {
    return per_reward[static_cast<size_t>(kind)];
  }
};

/// (r_i - mean) / population std; all zeros when std < eps. G < 2 is a
/// DomainError (group statistics undefined).
std::vector<double> normalize_group(const std::vector<double>& rewards,
                                    double eps = kAdvantageEps);

/// Per-kind normalization of a group's reward vectors.
GroupAdvantages normalize_per_reward(const std::vector<RewardVector>& rewards,
                                     double eps = kAdvantageEps);

/// Baseline: collapse each vector to its sum, then normalize once. The
/// result is broadcast uniformly over a rollout's tokens.
std::vector<double> summed_advantage(const std::vector<RewardVector>& rewards,
                                     double eps = kAdvantageEps);

/// Route per-kind advantages to one rollout's tokens: grounding (glue)
/// tokens average format/zoom/iou, every other token averages
/// format/zoom/acc. Returns one value per token.
std::vector<double> token_advantages(const GroupAdvantages& ga, const TokenSpanMap& mask,
                                     size_t rollout_index);

}  // namespace zz
