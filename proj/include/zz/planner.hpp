#pragma once

#include <string>
#include <vector>

#include "zz/intervals.hpp"

namespace zz {

/// Token-budget knobs for frame sampling. Invariant: 0 < min_tokens_per_frame
/// <= max_tokens_per_frame <= token_budget.
struct BudgetConfig {
  int token_budget = 8192;        // L_v
  int min_tokens_per_frame = 16;  // V_min
  int max_tokens_per_frame = 768; // V_max
  double sample_fps = 1.0;        // coarse sampling rate s
};

/// Throws DomainError when the bound ordering above is violated.
void validate_budget(const BudgetConfig& cfg);

enum class PassKind { Coarse, Fine };

struct ZoomPlan {
  PassKind pass = PassKind::Coarse;
  std::vector<double> frame_times;  // seconds, one per frame
  int n_frames = 0;
  int tokens_per_frame = 0;
};

/// First pass: frames uniformly over [0, duration] at the coarse rate,
/// token resolution from the budget split. n_frames is clamped to at
/// least 1 so sub-second videos still get a frame.
ZoomPlan coarse_plan(double duration_s, const BudgetConfig& cfg);

/// Second pass: the full budget re-split over just the given spans, so
/// fewer frames buy more tokens each. Requires positive total measure.
ZoomPlan fine_plan(const IntervalSet& spans, const BudgetConfig& cfg, double fine_fps);

/// Frame count for a span measure at a given rate: max(1, floor(m*fps)).
long long frames_for_measure(double measure_s, double fps);

/// n frame timestamps inside the spans: midpoints of n equal slices of the
/// concatenated span measure, mapped back to real time. Every returned
/// time lies strictly inside some span.
std::vector<double> place_frames(const IntervalSet& spans, long long n);

/// Long-video schedule defaults, from the ablation sweeps.
inline constexpr int kDefaultWindowFrames = 256;
inline constexpr int kDefaultTopK = 4;

/// Contiguous non-overlapping windows covering [0, duration], each
/// window_frames/sample_fps seconds except a shorter tail.
std::vector<TimeInterval> divide_windows(double duration_s, int window_frames,
                                         const BudgetConfig& cfg);

/// One window's answer + grounding from a scheduling sweep.
struct WindowResult {
  TimeInterval window;
  IntervalSet predicted_spans;
  char answer = '\0';
  double confidence = 0.0;  // probability of the predicted answer token
};

/// Union of predicted spans from the k most confident windows; ties go to
/// the earlier window.
IntervalSet aggregate_top_spans(const std::vector<WindowResult>& results, int k);

/// Budget + fine rate bundled for callers that only ever plan fine passes.
struct ZoomPlanner {
  BudgetConfig budget;
  double fine_fps = 1.0;

  ZoomPlan plan_fine(const IntervalSet& spans) const { return fine_plan(spans, budget, fine_fps); }
};

}  // namespace zz
