#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "zz/filter.hpp"
#include "zz/grpo.hpp"
#include "zz/metrics.hpp"
#include "zz/planner.hpp"
#include "zz/rewards.hpp"
#include "zz/sim.hpp"

namespace zz {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "zz/1";

/// Parsed JSONL records paired with their 1-based line numbers. A leading
/// header object carrying "schema" is validated and stripped.
std::vector<std::pair<size_t, Json>> read_jsonl(const std::string& path);

/// Header line other artifacts start with: schema version + the fully
/// resolved producing config.
Json schema_header(const Json& config);

/// Writes via a temp file + rename so readers never observe a torn file.
void write_lines_atomic(const std::string& path, const std::vector<std::string>& lines);

// Record parsers. All throw SchemaError carrying the offending line.
GroundTruth parse_ground_truth(size_t line, const Json& j);
RolloutGroup parse_rollout_group(size_t line, const Json& j);
PredictionRecord parse_prediction(size_t line, const Json& j);
FilterRecord parse_filter_record(size_t line, const Json& j);
SyntheticEpisode parse_episode(size_t line, const Json& j);

std::vector<std::pair<double, double>> spans_from_json(size_t line, const Json& j);

// Policy-client wire schema (one JSON document per message).
Json client_request_to_json(const ClientRequest& request);
ClientRequest parse_client_request(size_t line, const Json& j);
Json client_response_to_json(const ClientResponse& response);
ClientResponse parse_client_response(size_t line, const Json& j);

Json spans_to_json(const IntervalSet& spans);
Json episode_to_json(const SyntheticEpisode& episode);
Json ground_truth_to_json(const GroundTruth& gt);
Json decision_to_json(const FilterDecision& decision);
Json filter_record_to_json(const FilterRecord& record);
Json plan_to_json(const ZoomPlan& plan);
Json trace_record_to_json(const TraceRecord& record);
Json report_to_json(const MetricReport& report);

}  // namespace zz
