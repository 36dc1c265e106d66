#include "zz/planner.hpp"

#include <algorithm>
#include <cmath>

#include "zz/errors.hpp"

namespace zz {
namespace {

// floor with a guard against values like 3.9999999999 produced by float noise
long long floor_eps(double x) { return static_cast<long long>(std::floor(x + kTimeEps)); }

}  // namespace

void validate_budget(const BudgetConfig& cfg) {
  if (cfg.min_tokens_per_frame <= 0 || cfg.min_tokens_per_frame > cfg.max_tokens_per_frame ||
      cfg.max_tokens_per_frame > cfg.token_budget) {
    throw DomainError("budget bounds must satisfy 0 < min <= max <= total");
  }
  if (!(cfg.sample_fps > 0.0) || !std::isfinite(cfg.sample_fps)) {
    throw DomainError("sample rate must be positive");
  }
}

long long frames_for_measure(double measure_s, double fps) {
  return std::max<long long>(1, floor_eps(measure_s * fps));
}

std::vector<double> place_frames(const IntervalSet& spans, long long n) {
  if (spans.empty() || n <= 0) return {};
  const double total = spans.measure();
  std::vector<double> times;
  times.reserve(static_cast<size_t>(n));
  const auto& segs = spans.intervals();
  size_t seg = 0;
  double consumed = 0.0;  // measure preceding segs[seg]
  for (long long i = 0; i < n; ++i) {
    const double target = (static_cast<double>(i) + 0.5) * total / static_cast<double>(n);
    while (seg + 1 < segs.size() && consumed + segs[seg].length() < target) {
      consumed += segs[seg].length();
      ++seg;
    }
    times.push_back(segs[seg].start + (target - consumed));
  }
  return times;
}

ZoomPlan coarse_plan(double duration_s, const BudgetConfig& cfg) {
  validate_budget(cfg);
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw DomainError("duration must be positive");
  }
  const long long by_rate = floor_eps(duration_s * cfg.sample_fps);
  const long long by_budget = cfg.token_budget / cfg.min_tokens_per_frame;
  const long long n = std::max<long long>(1, std::min(by_rate, by_budget));
  const long long per_frame =
      std::max<long long>(cfg.min_tokens_per_frame,
                          std::min<long long>(cfg.token_budget / n, cfg.max_tokens_per_frame));
  ZoomPlan plan;
  plan.pass = PassKind::Coarse;
  plan.n_frames = static_cast<int>(n);
  plan.tokens_per_frame = static_cast<int>(per_frame);
  plan.frame_times = place_frames(normalize({{0.0, duration_s}}), n);
  return plan;
}

ZoomPlan fine_plan(const IntervalSet& spans, const BudgetConfig& cfg, double fine_fps) {
  validate_budget(cfg);
  if (!(fine_fps > 0.0) || !std::isfinite(fine_fps)) {
    throw DomainError("fine rate must be positive");
  }
  if (spans.empty() || spans.measure() <= 0.0) {
    throw DomainError("fine pass needs spans with positive measure");
  }
  // Cap at the budget so every frame keeps at least one token.
  const long long n = std::min<long long>(frames_for_measure(spans.measure(), fine_fps),
                                          cfg.token_budget);
  const long long per_frame =
      std::min<long long>(cfg.token_budget / n, cfg.max_tokens_per_frame);
  ZoomPlan plan;
  plan.pass = PassKind::Fine;
  plan.n_frames = static_cast<int>(n);
  plan.tokens_per_frame = static_cast<int>(per_frame);
  plan.frame_times = place_frames(spans, n);
  return plan;
}

std::vector<TimeInterval> divide_windows(double duration_s, int window_frames,
                                         const BudgetConfig& cfg) {
  validate_budget(cfg);
  if (window_frames < 1) throw DomainError("window size must be at least one frame");
  std::vector<TimeInterval> windows;
  if (!(duration_s > 0.0)) return windows;
  const double width = static_cast<double>(window_frames) / cfg.sample_fps;
  for (double start = 0.0; start < duration_s - kTimeEps; start += width) {
    windows.push_back({start, std::min(start + width, duration_s)});
  }
  return windows;
}

IntervalSet aggregate_top_spans(const std::vector<WindowResult>& results, int k) {
  if (results.empty()) throw DomainError("no window results to aggregate");
  if (k < 1) throw DomainError("top-k needs k >= 1");
  std::vector<size_t> order(results.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (results[a].confidence != results[b].confidence) {
      return results[a].confidence > results[b].confidence;
    }
    return results[a].window.start < results[b].window.start;
  });
  IntervalSet merged;
  const size_t take = std::min(order.size(), static_cast<size_t>(k));
  for (size_t i = 0; i < take; ++i) {
    merged = set_union(merged, results[order[i]].predicted_spans);
  }
  return merged;
}

}  // namespace zz
