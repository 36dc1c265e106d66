#include "zz/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "zz/errors.hpp"

namespace zz {

bool operator==(const TimeInterval& a, const TimeInterval& b) {
  return std::abs(a.start - b.start) <= kTimeEps && std::abs(a.end - b.end) <= kTimeEps;
}

bool operator==(const IntervalSet& a, const IntervalSet& b) {
  return a.intervals_ == b.intervals_;
}

double IntervalSet::measure() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

bool IntervalSet::contains(double t) const {
  for (const auto& iv : intervals_) {
    if (iv.contains(t)) return true;
  }
  return false;
}

IntervalSet normalize(const std::vector<std::pair<double, double>>& raw_spans) {
  std::vector<TimeInterval> spans;
  spans.reserve(raw_spans.size());
  for (const auto& [s, e] : raw_spans) {
    if (!std::isfinite(s) || !std::isfinite(e)) {
      throw DomainError("interval endpoint is not finite");
    }
    // Reversed spans are model noise, not errors: swap and keep scoring.
    TimeInterval iv{std::min(s, e), std::max(s, e)};
    if (iv.length() > kTimeEps) spans.push_back(iv);
  }
  std::sort(spans.begin(), spans.end(),
            [](const TimeInterval& a, const TimeInterval& b) { return a.start < b.start; });

  std::vector<TimeInterval> merged;
  for (const auto& iv : spans) {
    if (!merged.empty() && iv.start <= merged.back().end + kTimeEps) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  return IntervalSet(std::move(merged));
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<TimeInterval> out;
  size_t i = 0;
  size_t j = 0;
  const auto& av = a.intervals();
  const auto& bv = b.intervals();
  while (i < av.size() && j < bv.size()) {
    double lo = std::max(av[i].start, bv[j].start);
    double hi = std::min(av[i].end, bv[j].end);
    if (hi - lo > kTimeEps) out.push_back({lo, hi});
    if (av[i].end < bv[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  std::vector<std::pair<double, double>> all;
  all.reserve(a.size() + b.size());
  for (const auto& iv : a.intervals()) all.emplace_back(iv.start, iv.end);
  for (const auto& iv : b.intervals()) all.emplace_back(iv.start, iv.end);
  return normalize(all);
}

IntervalSet clamp(const IntervalSet& a, double lo, double hi) {
  return intersect(a, normalize({{lo, hi}}));
}

double iou(const IntervalSet& pred, const IntervalSet& gt) {
  if (gt.measure() <= kTimeEps) throw DomainError("iou: ground truth has zero measure");
  double inter = intersect(pred, gt).measure();
  double uni = set_union(pred, gt).measure();
  return inter / uni;
}

double iog(const IntervalSet& pred, const IntervalSet& gt) {
  if (gt.measure() <= kTimeEps) throw DomainError("iog: ground truth has zero measure");
  return intersect(pred, gt).measure() / gt.measure();
}

double iop(const IntervalSet& pred, const IntervalSet& gt) {
  if (pred.measure() <= kTimeEps) throw DomainError("iop: prediction has zero measure");
  return intersect(pred, gt).measure() / pred.measure();
}

}  // namespace zz
