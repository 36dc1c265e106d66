#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zz/intervals.hpp"
#include "zz/planner.hpp"
#include "zz/response.hpp"

namespace zz {

/// The four per-rollout training signals. format/acc/zoom are 0/1,
/// iou is in [0,1].
struct RewardVector {
  int format = 0;
  int acc = 0;
  double iou = 0.0;
  int zoom = 0;
};

struct GroundTruth {
  std::string id;
  std::string question;
  std::map<char, std::string> options;  // letter -> option text, sorted
  char answer = '\0';
  IntervalSet gt_spans;
  double duration = 0.0;  // seconds
};

std::vector<char> option_letters(const GroundTruth& gt);

struct Rollout {
  std::string raw_text;
  std::vector<std::string> token_texts;  // concatenates exactly to raw_text
};

struct RolloutGroup {
  std::string prompt_id;
  std::vector<Rollout> rollouts;
};

/// Frame selection carried on the wire: which spans to look at, how densely,
/// and at what per-frame token resolution.
struct FrameSpec {
  std::vector<std::pair<double, double>> spans_s;
  double fps = 1.0;
  int tokens_per_frame = 0;
};

struct ClientRequest {
  std::string id;
  std::string question;
  std::map<char, std::string> options;
  std::string video_ref;
  FrameSpec frame_spec;
  std::string template_kind;  // "coarse" | "fine"
};

struct ClientResponse {
  std::string id;
  std::string text;
  std::optional<double> answer_token_logprob;
};

/// Answering backend for the second (zoomed) pass. Implementations must be
/// safe for concurrent query calls. Failures raise ClientError.
class PolicyClient {
 public:
  virtual ~PolicyClient() = default;
  virtual ClientResponse query(const ClientRequest& request) = 0;
};

/// IoU of the predicted glue spans (clamped to the video) against the
/// ground-truth spans. Empty prediction or ground truth scores 0.
double iou_reward(const StructuredResponse& resp, const GroundTruth& gt);

/// 1 iff the chosen option letter matches.
int acc_reward(const StructuredResponse& resp, const GroundTruth& gt);

/// Runs the fine pass over the rollout's own glue spans and scores the
/// returned answer. Empty glue short-circuits to 0 with no client call.
/// Client failures propagate; retry policy is the caller's.
int zoom_reward(const StructuredResponse& resp, const GroundTruth& gt, PolicyClient& client,
                const ZoomPlanner& planner);

/// All four rewards for every rollout in a group, in input order. Scoring
/// is total: parse failures degrade to lenient extraction with format 0.
/// Zoom client errors get one retry, then score 0 for that rollout.
std::vector<RewardVector> score_group(const RolloutGroup& group, const GroundTruth& gt,
                                      PolicyClient& client, const ZoomPlanner& planner);

}  // namespace zz
