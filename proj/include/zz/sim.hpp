#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "zz/grpo.hpp"
#include "zz/planner.hpp"
#include "zz/rewards.hpp"
#include "zz/rng.hpp"

namespace zz {

/// One on-screen occurrence: a category ("chart", "badge", ...) carrying a
/// small printed detail that is legible only above a per-frame token
/// resolution.
struct SimEvent {
  TimeInterval span;
  std::string category;
  std::string detail;
};

/// A synthetic grounded-QA item. Exactly one event matches the question;
/// its span is the ground truth and its detail is the correct option. The
/// detail threshold sits strictly above the coarse per-frame resolution
/// and at or below the fine resolution of an exact zoom, so only a zoomed
/// pass can read it.
struct SyntheticEpisode {
  std::string id;
  double duration = 0.0;
  std::vector<SimEvent> events;
  size_t target_index = 0;
  std::string question;
  std::map<char, std::string> options;
  char answer = '\0';
  IntervalSet gt_spans;
  int detail_threshold = 0;  // tokens per frame needed to read the detail
};

SyntheticEpisode generate_episode(uint64_t seed, std::pair<double, double> duration_range,
                                  int n_events, const BudgetConfig& budget = {},
                                  double fine_fps = 1.0);

GroundTruth to_ground_truth(const SyntheticEpisode& episode);

enum class ClientMode { Oracle, Noisy, Adversarial };

struct ScriptedClientConfig {
  ClientMode mode = ClientMode::Oracle;
  uint64_t noise_seed = 0;
};

/// Deterministic stand-in for the answering model. Oracle rule: the answer
/// is correct iff some requested frame time falls inside the target event's
/// span AND tokens_per_frame reaches the episode's detail threshold.
class ScriptedClient : public PolicyClient {
 public:
  explicit ScriptedClient(ScriptedClientConfig cfg = {}) : cfg_(cfg) {}

  void add_episode(const SyntheticEpisode& episode);
  ClientResponse query(const ClientRequest& request) override;

 private:
  ScriptedClientConfig cfg_;
  std::map<std::string, SyntheticEpisode> episodes_;
};

enum class RolloutMode { Oracle, Mixed, Adversarial };

/// Fixture generator. Oracle: G identical perfect responses. Mixed: cycles
/// exact/shifted/superset/empty/disjoint spans with alternating answer
/// correctness. Adversarial: Mixed with one malformed response (picked by
/// seed).
RolloutGroup scripted_rollout_group(const SyntheticEpisode& episode, size_t g, RolloutMode mode,
                                    uint64_t seed);

/// Splits response text into tag tokens and the runs between them; the
/// pieces concatenate back to the input exactly.
std::vector<std::string> sim_tokenize(const std::string& text);

/// The trainable task: episodes share one timeline, and the response
/// template has three decision slots (answer letter, span start, span end
/// on a 16-bin grid); everything else is scaffold. Rewards flow through
/// the real engine against the scripted oracle. Sampling mixes in a small
/// uniform exploration rate so groups never collapse to identical
/// rollouts; draws are a fixed function of (stream, parameters), which
/// keeps paired training runs coupled.
class ToyTask : public RolloutTask {
 public:
  explicit ToyTask(std::vector<SyntheticEpisode> episodes, double fine_fps = 1.0,
                   BudgetConfig budget = {}, double explore_letter = 0.1,
                   double explore_span = 0.03);
  explicit ToyTask(SyntheticEpisode episode, double fine_fps = 1.0, BudgetConfig budget = {},
                   double explore_letter = 0.1, double explore_span = 0.03);

  size_t vocab_size() const override;
  size_t context_order() const override { return 1; }
  size_t n_prompts() const override { return episodes_.size(); }
  std::vector<size_t> sample_rollout(const ToyPolicy& policy, Rng& rng,
                                     size_t prompt) const override;
  std::vector<RewardVector> score(const std::vector<std::vector<size_t>>& group,
                                  size_t prompt) override;
  TokenSpanMap glue_mask(const std::vector<size_t>& tokens) const override;

  std::string render_text(const std::vector<size_t>& tokens) const;
  std::vector<std::string> render_tokens(const std::vector<size_t>& tokens) const;
  const SyntheticEpisode& episode(size_t prompt = 0) const { return episodes_.at(prompt); }

  static constexpr size_t kTimeBins = 64;  // 65 grid edges over [0, duration]

 private:
  std::vector<SyntheticEpisode> episodes_;
  std::vector<GroundTruth> gts_;
  ZoomPlanner planner_;
  ScriptedClient client_;
  double explore_letter_, explore_span_;
  std::vector<std::string> symbol_texts_;     // id -> rendered text
  std::vector<size_t> template_ids_;          // scaffold; decision slots hold 0
  std::vector<size_t> letter_ids_, time_ids_;
};

/// Fixed defaults everyone (CLI, tests) trains against.
SyntheticEpisode default_train_episode();

/// Default training pool: two episodes with identical event timing whose
/// correct letters differ. Grounding is consistent across prompts, so the
/// span slots are learnable; the answer slot is not (the tabular policy
/// cannot condition on the prompt), so answer accuracy keeps fluctuating
/// inside every group for the whole run.
ToyTask default_train_task(double fine_fps = 1.0, BudgetConfig budget = {});

}  // namespace zz
