#include "zz/advantage.hpp"

#include <cmath>

#include "zz/errors.hpp"

namespace zz {
namespace {

double reward_component(const RewardVector& rv, RewardKind kind) {
  switch (kind) {
    case RewardKind::Format: return rv.format;
    case RewardKind::Acc: return rv.acc;
    case RewardKind::IoU: return rv.iou;
    case RewardKind::Zoom: return rv.zoom;
  }
  return 0.0;
}

}  // namespace

std::vector<double> normalize_group(const std::vector<double>& rewards, double eps) {
  const size_t g = rewards.size();
  if (g < 2) throw DomainError("group statistics need at least two rollouts");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double std = std::sqrt(var);
  std::vector<double> out(g, 0.0);
  if (std < eps) return out;
  for (size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

GroupAdvantages normalize_per_reward(const std::vector<RewardVector>& rewards, double eps) {
  GroupAdvantages ga;
  ga.mode = AdvantageMode::TokenAdv;
  for (size_t k = 0; k < kNumRewardKinds; ++k) {
    std::vector<double> column;
    column.reserve(rewards.size());
    for (const auto& rv : rewards) column.push_back(reward_component(rv, static_cast<RewardKind>(k)));
    ga.per_reward[k] = normalize_group(column, eps);
  }
  return ga;
}

std::vector<double> summed_advantage(const std::vector<RewardVector>& rewards, double eps) {
  std::vector<double> sums;
  sums.reserve(rewards.size());
  for (const auto& rv : rewards) sums.push_back(rv.format + rv.acc + rv.iou + rv.zoom);
  return normalize_group(sums, eps);
}

std::vector<double> token_advantages(const GroupAdvantages& ga, const TokenSpanMap& mask,
                                     size_t rollout_index) {
  for (const auto& column : ga.per_reward) {
    if (rollout_index >= column.size()) throw DomainError("rollout index out of range");
  }
  if (mask.is_glue.size() != mask.total_len) throw DomainError("token mask length mismatch");
  const double a_format = ga.of(RewardKind::Format)[rollout_index];
  const double a_acc = ga.of(RewardKind::Acc)[rollout_index];
  const double a_iou = ga.of(RewardKind::IoU)[rollout_index];
  const double a_zoom = ga.of(RewardKind::Zoom)[rollout_index];
  const double glue_value = (a_format + a_zoom + a_iou) / 3.0;
  const double other_value = (a_format + a_zoom + a_acc) / 3.0;
  std::vector<double> out(mask.total_len);
  for (size_t t = 0; t < mask.total_len; ++t) out[t] = mask.is_glue[t] ? glue_value : other_value;
  return out;
}

}  // namespace zz
