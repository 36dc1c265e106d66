#pragma once

#include <string>
#include <vector>

namespace zz {

/// Group rollout statistics for one training example.
struct FilterRecord {
  std::string id;
  std::vector<double> ious;
  std::vector<bool> correct;
};

struct FilterDecision {
  std::string id;
  double delta = 0.0;
  bool all_correct = false;
  bool kept = false;
};

/// max(ious) - mean(ious); the spread a group must show to be worth
/// training on. Empty input is a DomainError.
double filter_delta(const std::vector<double>& ious);

/// kept <=> delta >= threshold AND not every rollout answered correctly.
/// The boundary stays: delta exactly at the threshold is kept.
FilterDecision decide(const FilterRecord& record, double delta_threshold = 0.1);

std::vector<FilterDecision> filter_examples(const std::vector<FilterRecord>& records,
                                            double delta_threshold = 0.1);

}  // namespace zz
