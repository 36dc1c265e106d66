#include "zz/filter.hpp"

#include <algorithm>

#include "zz/errors.hpp"

namespace zz {

double filter_delta(const std::vector<double>& ious) {
  if (ious.empty()) throw DomainError("delta needs at least one IoU");
  double mean = 0.0;
  for (double v : ious) mean += v;
  mean /= static_cast<double>(ious.size());
  return *std::max_element(ious.begin(), ious.end()) - mean;
}

FilterDecision decide(const FilterRecord& record, double delta_threshold) {
  FilterDecision decision;
  decision.id = record.id;
  decision.delta = filter_delta(record.ious);
  decision.all_correct =
      !record.correct.empty() &&
      std::all_of(record.correct.begin(), record.correct.end(), [](bool c) { return c; });
  decision.kept = decision.delta >= delta_threshold && !decision.all_correct;
  return decision;
}

std::vector<FilterDecision> filter_examples(const std::vector<FilterRecord>& records,
                                            double delta_threshold) {
  std::vector<FilterDecision> decisions;
  decisions.reserve(records.size());
  for (const auto& record : records) decisions.push_back(decide(record, delta_threshold));
  return decisions;
}

}  // namespace zz
