#include "zz/rewards.hpp"

#include "zz/errors.hpp"

namespace zz {
namespace {

/// Strict parse first, lenient scan second; always yields answer + spans
/// (possibly empty) so scoring stays total.
struct ExtractedFields {
  std::optional<char> answer;
  IntervalSet spans;
};

ExtractedFields extract_fields(const std::string& text, const std::vector<char>& letters) {
  auto parsed = parse_response(text, letters);
  if (parsed.ok()) {
    return {parsed.value().answer_letter, parsed.value().glue_spans};
  }
  auto lenient = lenient_extract(text, letters);
  return {lenient.answer, lenient.spans};
}

double iou_against_gt(const IntervalSet& spans, const GroundTruth& gt) {
  if (gt.gt_spans.empty()) return 0.0;
  IntervalSet clamped = clamp(spans, 0.0, gt.duration);
  if (clamped.empty()) return 0.0;
  return iou(clamped, gt.gt_spans);
}

int fine_pass_answer_correct(const IntervalSet& spans, const GroundTruth& gt,
                             PolicyClient& client, const ZoomPlanner& planner) {
  ZoomPlan plan = planner.plan_fine(spans);
  ClientRequest request;
  request.id = gt.id;
  request.question = gt.question;
  request.options = gt.options;
  request.video_ref = gt.id;
  for (const auto& iv : spans.intervals()) request.frame_spec.spans_s.emplace_back(iv.start, iv.end);
  request.frame_spec.fps = planner.fine_fps;
  request.frame_spec.tokens_per_frame = plan.tokens_per_frame;
  request.template_kind = "fine";
  ClientResponse reply = client.query(request);

  const std::vector<char> letters = option_letters(gt);
  auto parsed = parse_response(reply.text, letters);
  std::optional<char> answer;
  if (parsed.ok()) {
    answer = parsed.value().answer_letter;
  } else {
    answer = lenient_extract(reply.text, letters).answer;
  }
  return answer && *answer == gt.answer ? 1 : 0;
}

}  // namespace

std::vector<char> option_letters(const GroundTruth& gt) {
  std::vector<char> letters;
  letters.reserve(gt.options.size());
  for (const auto& [letter, _] : gt.options) letters.push_back(letter);
  return letters;
}

double iou_reward(const StructuredResponse& resp, const GroundTruth& gt) {
  return iou_against_gt(resp.glue_spans, gt);
}

int acc_reward(const StructuredResponse& resp, const GroundTruth& gt) {
  return resp.answer_letter == gt.answer ? 1 : 0;
}

int zoom_reward(const StructuredResponse& resp, const GroundTruth& gt, PolicyClient& client,
                const ZoomPlanner& planner) {
  IntervalSet clamped = clamp(resp.glue_spans, 0.0, gt.duration);
  if (clamped.empty() || clamped.measure() <= 0.0) return 0;
  return fine_pass_answer_correct(clamped, gt, client, planner);
}

std::vector<RewardVector> score_group(const RolloutGroup& group, const GroundTruth& gt,
                                      PolicyClient& client, const ZoomPlanner& planner) {
  if (group.rollouts.size() < 2) {
    throw DomainError("group statistics need at least two rollouts");
  }
  const std::vector<char> letters = option_letters(gt);
  std::vector<RewardVector> out;
  out.reserve(group.rollouts.size());
  for (const auto& rollout : group.rollouts) {
    RewardVector rv;
    rv.format = format_reward(rollout.raw_text, letters);
    ExtractedFields fields = extract_fields(rollout.raw_text, letters);
    rv.acc = fields.answer && *fields.answer == gt.answer ? 1 : 0;
    rv.iou = iou_against_gt(fields.spans, gt);
    IntervalSet clamped = clamp(fields.spans, 0.0, gt.duration);
    if (!clamped.empty() && clamped.measure() > 0.0) {
      try {
        rv.zoom = fine_pass_answer_correct(clamped, gt, client, planner);
      } catch (const ClientError&) {
        try {
          rv.zoom = fine_pass_answer_correct(clamped, gt, client, planner);
        } catch (const ClientError&) {
          rv.zoom = 0;
        }
      }
    }
    out.push_back(rv);
  }
  return out;
}

}  // namespace zz
