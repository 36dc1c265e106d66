#include "zz/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "zz/errors.hpp"

namespace zz {

std::vector<ItemScore> score_items(const std::vector<PredictionRecord>& preds,
                                   const std::vector<GroundTruth>& gts) {
  std::unordered_map<std::string, const GroundTruth*> by_id;
  for (const auto& gt : gts) {
    if (!by_id.emplace(gt.id, &gt).second) throw DomainError("duplicate ground-truth id " + gt.id);
  }
  std::unordered_map<std::string, const PredictionRecord*> pred_by_id;
  for (const auto& pred : preds) {
    if (by_id.find(pred.id) == by_id.end()) {
      throw DomainError("prediction id has no ground truth: " + pred.id);
    }
    if (!pred_by_id.emplace(pred.id, &pred).second) {
      throw DomainError("duplicate prediction id " + pred.id);
    }
  }
  std::vector<ItemScore> items;
  items.reserve(gts.size());
  for (const auto& gt : gts) {
    ItemScore item;
    item.id = gt.id;
    auto found = pred_by_id.find(gt.id);
    if (found != pred_by_id.end()) {
      const PredictionRecord& pred = *found->second;
      item.correct = pred.answer == gt.answer;
      IntervalSet clamped = clamp(pred.spans, 0.0, gt.duration);
      if (!clamped.empty() && clamped.measure() > 0.0 && !gt.gt_spans.empty()) {
        item.has_pred_spans = true;
        item.iou = iou(clamped, gt.gt_spans);
        item.iog = iog(clamped, gt.gt_spans);
        item.iop = iop(clamped, gt.gt_spans);
      }
    }
    items.push_back(item);
  }
  return items;
}

MetricReport evaluate(const std::vector<PredictionRecord>& preds,
                      const std::vector<GroundTruth>& gts,
                      const std::vector<double>& recall_thresholds) {
  if (gts.empty()) throw DomainError("metric evaluation needs at least one item");
  const std::vector<ItemScore> items = score_items(preds, gts);
  MetricReport report;
  report.n = items.size();
  const double n = static_cast<double>(items.size());

  size_t with_spans = 0;
  for (const auto& item : items) {
    report.miou += item.iou;
    report.miog += item.iog;
    if (item.has_pred_spans) {
      report.miop += item.iop;
      ++with_spans;
    }
    report.acc += item.correct ? 1.0 : 0.0;
    report.acc_gqa += (item.correct && item.has_pred_spans && item.iop >= 0.5) ? 1.0 : 0.0;
  }
  report.miou /= n;
  report.miog /= n;
  report.miop = with_spans > 0 ? report.miop / static_cast<double>(with_spans) : 0.0;
  report.acc /= n;
  report.acc_gqa /= n;

  for (double tau : recall_thresholds) {
    double hits = 0.0;
    for (const auto& item : items) hits += item.iou > tau ? 1.0 : 0.0;
    report.recall_at[tau] = hits / n;
  }
  for (double tau : kAveragedThresholds) {
    double rec = 0.0, acc = 0.0;
    for (const auto& item : items) {
      rec += item.iou > tau ? 1.0 : 0.0;
      acc += (item.correct && item.iou > tau) ? 1.0 : 0.0;
    }
    report.rec_at_iou += rec / n;
    report.acc_at_iou += acc / n;
  }
  report.rec_at_iou /= static_cast<double>(kAveragedThresholds.size());
  report.acc_at_iou /= static_cast<double>(kAveragedThresholds.size());
  return report;
}

const std::vector<std::string>& known_metric_names() {
  static const std::vector<std::string> names = {"miou", "miog",    "miop",       "recall",
                                                 "acc",  "acc_gqa", "rec_at_iou", "acc_at_iou"};
  return names;
}

std::string format_report(const MetricReport& report, const std::vector<std::string>& only) {
  const auto& known = known_metric_names();
  for (const auto& name : only) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw DomainError("unknown metric name: " + name);
    }
  }
  const auto wanted = [&](const std::string& name) {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  };
  std::ostringstream os;
  os << std::setprecision(6);
  const auto row = [&](const std::string& label, double value) {
    os << std::left << std::setw(12) << label << value << "\n";
  };
  row("n", static_cast<double>(report.n));
  if (wanted("miou")) row("mIoU", report.miou);
  if (wanted("miog")) row("mIoG", report.miog);
  if (wanted("miop")) row("mIoP", report.miop);
  if (wanted("recall")) {
    for (const auto& [tau, value] : report.recall_at) {
      std::ostringstream label;
      label << "R@" << tau;
      row(label.str(), value);
    }
  }
  if (wanted("acc")) row("Acc", report.acc);
  if (wanted("acc_gqa")) row("Acc@GQA", report.acc_gqa);
  if (wanted("rec_at_iou")) row("rec.@IoU", report.rec_at_iou);
  if (wanted("acc_at_iou")) row("acc.@IoU", report.acc_at_iou);
  return os.str();
}

}  // namespace zz
