#pragma once

#include <map>
#include <string>
#include <vector>

#include "zz/intervals.hpp"
#include "zz/rewards.hpp"

namespace zz {

struct PredictionRecord {
  std::string id;
  char answer = '\0';
  IntervalSet spans;
};

/// Aggregate grounding/QA quality over a prediction collection.
/// Conventions for an item with empty predicted spans: IoU and IoG count
/// as 0, the item is skipped by mIoP (its ratio is undefined), and it can
/// never count as grounded.
struct MetricReport {
  double miou = 0.0;
  double miog = 0.0;
  double miop = 0.0;
  std::map<double, double> recall_at;  // threshold -> fraction with IoU > threshold
  double acc = 0.0;
  double acc_gqa = 0.0;     // correct AND IoP >= 0.5
  double rec_at_iou = 0.0;  // recall averaged over thresholds 0.1..0.5
  double acc_at_iou = 0.0;  // correctness AND IoU > threshold, same average
  size_t n = 0;
};

inline const std::vector<double> kDefaultRecallThresholds = {0.3, 0.5};
inline const std::vector<double> kAveragedThresholds = {0.1, 0.2, 0.3, 0.4, 0.5};

/// Scores predictions against ground truths keyed by id. Every ground
/// truth is scored; a missing prediction counts as empty. A prediction
/// whose id has no ground truth, a duplicated prediction id, or an empty
/// ground-truth collection is a DomainError.
MetricReport evaluate(const std::vector<PredictionRecord>& preds,
                      const std::vector<GroundTruth>& gts,
                      const std::vector<double>& recall_thresholds = kDefaultRecallThresholds);

/// Per-item numbers behind the report, for CSV dumps.
struct ItemScore {
  std::string id;
  bool correct = false;
  bool has_pred_spans = false;
  double iou = 0.0;
  double iog = 0.0;
  double iop = 0.0;  // valid only when has_pred_spans
};

std::vector<ItemScore> score_items(const std::vector<PredictionRecord>& preds,
                                   const std::vector<GroundTruth>& gts);

/// Metric names understood by report filters.
const std::vector<std::string>& known_metric_names();

/// Aligned plain-text rendering of a report; `only` restricts the rows
/// (empty = all). Unknown names are a DomainError.
std::string format_report(const MetricReport& report, const std::vector<std::string>& only = {});

}  // namespace zz
