#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace zz {

/// Absolute tolerance, in seconds, for interval comparisons. Intervals whose
/// gap or length is below this are treated as touching / empty.
inline constexpr double kTimeEps = 1e-9;

/// One [start, end] span in seconds. Canonical after IntervalSet
/// normalization: start <= end.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(double t) const { return t >= start - kTimeEps && t <= end + kTimeEps; }
};

bool operator==(const TimeInterval& a, const TimeInterval& b);

/// Sorted disjoint union of time intervals. The carrier for predicted and
/// ground-truth segments and for every overlap ratio. Immutable once built;
/// construct through normalize().
class IntervalSet {
 public:
  IntervalSet() = default;

  const std::vector<TimeInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  size_t size() const { return intervals_.size(); }

  /// Sum of member lengths, in seconds.
  double measure() const;

  bool contains(double t) const;

  /// Treats sets as equal when every endpoint matches within kTimeEps.
  friend bool operator==(const IntervalSet& a, const IntervalSet& b);

 private:
  friend IntervalSet normalize(const std::vector<std::pair<double, double>>&);
  friend IntervalSet intersect(const IntervalSet&, const IntervalSet&);

  explicit IntervalSet(std::vector<TimeInterval> sorted_disjoint)
      : intervals_(std::move(sorted_disjoint)) {}

  std::vector<TimeInterval> intervals_;
};

/// Canonicalize raw (start, end) pairs: reversed pairs are swapped, the
/// result is sorted, overlapping or abutting spans are merged, and spans of
/// zero measure are dropped. Throws DomainError on non-finite input.
IntervalSet normalize(const std::vector<std::pair<double, double>>& raw_spans);

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);

/// Restrict a set to [lo, hi].
IntervalSet clamp(const IntervalSet& a, double lo, double hi);

inline double measure(const IntervalSet& a) { return a.measure(); }

/// |pred ∩ gt| / |pred ∪ gt|. Requires gt with positive measure.
double iou(const IntervalSet& pred, const IntervalSet& gt);

/// |pred ∩ gt| / |gt|: coverage of the ground truth. Requires gt with
/// positive measure.
double iog(const IntervalSet& pred, const IntervalSet& gt);

/// |pred ∩ gt| / |pred|: precision of the prediction span. Requires pred
/// with positive measure.
double iop(const IntervalSet& pred, const IntervalSet& gt);

}  // namespace zz
