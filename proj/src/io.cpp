#include "zz/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "zz/errors.hpp"

namespace zz {
namespace {

const Json& require(size_t line, const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(line, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::string require_string(size_t line, const Json& j, const char* key) {
  const Json& v = require(line, j, key);
  if (!v.is_string()) throw SchemaError(line, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

double require_number(size_t line, const Json& j, const char* key) {
  const Json& v = require(line, j, key);
  if (!v.is_number()) throw SchemaError(line, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

char single_letter(size_t line, const std::string& s, const char* key) {
  if (s.size() != 1) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be a single letter");
  }
  return s[0];
}

}  // namespace

std::vector<std::pair<size_t, Json>> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(0, "cannot open " + path);
  std::vector<std::pair<size_t, Json>> records;
  std::string text;
  size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError(line_no, "invalid JSON");
    if (records.empty() && j.is_object() && j.contains("schema")) {
      if (j.at("schema") != kSchemaVersion) {
        throw SchemaError(line_no, "unsupported schema version");
      }
      continue;  // header carries no data
    }
    records.emplace_back(line_no, std::move(j));
  }
  return records;
}

Json schema_header(const Json& config) {
  return Json{{"schema", kSchemaVersion}, {"config", config}};
}

void write_lines_atomic(const std::string& path, const std::vector<std::string>& lines) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DomainError("cannot write " + tmp);
    for (const auto& line : lines) out << line << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DomainError("cannot move output into place at " + path);
  }
}

std::vector<std::pair<double, double>> spans_from_json(size_t line, const Json& j) {
  if (!j.is_array()) throw SchemaError(line, "spans must be an array of [start, end] pairs");
  std::vector<std::pair<double, double>> out;
  for (const Json& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw SchemaError(line, "each span must be a [start, end] number pair");
    }
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

Json client_request_to_json(const ClientRequest& request) {
  Json options = Json::object();
  for (const auto& [letter, text] : request.options) options[std::string(1, letter)] = text;
  Json spans = Json::array();
  for (const auto& [s, e] : request.frame_spec.spans_s) spans.push_back(Json::array({s, e}));
  return Json{{"id", request.id},
              {"question", request.question},
              {"options", std::move(options)},
              {"video_ref", request.video_ref},
              {"frame_spec", Json{{"spans_s", std::move(spans)},
                                  {"fps", request.frame_spec.fps},
                                  {"tokens_per_frame", request.frame_spec.tokens_per_frame}}},
              {"template", request.template_kind}};
}

ClientRequest parse_client_request(size_t line, const Json& j) {
  ClientRequest request;
  request.id = require_string(line, j, "id");
  request.question = require_string(line, j, "question");
  const Json& options = require(line, j, "options");
  if (!options.is_object()) throw SchemaError(line, "options must be an object");
  for (const auto& [key, value] : options.items()) {
    if (key.size() != 1 || !value.is_string()) {
      throw SchemaError(line, "options must map single letters to strings");
    }
    request.options[key[0]] = value.get<std::string>();
  }
  request.video_ref = require_string(line, j, "video_ref");
  const Json& spec = require(line, j, "frame_spec");
  request.frame_spec.spans_s = spans_from_json(line, require(line, spec, "spans_s"));
  request.frame_spec.fps = require_number(line, spec, "fps");
  request.frame_spec.tokens_per_frame = static_cast<int>(require_number(line, spec, "tokens_per_frame"));
  request.template_kind = require_string(line, j, "template");
  if (request.template_kind != "coarse" && request.template_kind != "fine") {
    throw SchemaError(line, "template must be \"coarse\" or \"fine\"");
  }
  return request;
}

Json client_response_to_json(const ClientResponse& response) {
  Json j{{"id", response.id}, {"text", response.text}};
  if (response.answer_token_logprob) j["answer_token_logprob"] = *response.answer_token_logprob;
  return j;
}

ClientResponse parse_client_response(size_t line, const Json& j) {
  ClientResponse response;
  response.id = require_string(line, j, "id");
  response.text = require_string(line, j, "text");
  if (j.contains("answer_token_logprob")) {
    response.answer_token_logprob = require_number(line, j, "answer_token_logprob");
  }
  return response;
}

Json spans_to_json(const IntervalSet& spans) {
  Json out = Json::array();
  for (const auto& iv : spans.intervals()) out.push_back(Json::array({iv.start, iv.end}));
  return out;
}

GroundTruth parse_ground_truth(size_t line, const Json& j) {
  GroundTruth gt;
  gt.id = require_string(line, j, "id");
  gt.duration = require_number(line, j, "duration_s");
  if (!(gt.duration > 0.0)) throw SchemaError(line, "duration_s must be positive");
  gt.question = require_string(line, j, "question");
  const Json& options = require(line, j, "options");
  if (!options.is_object() || options.empty()) {
    throw SchemaError(line, "options must be a non-empty object");
  }
  for (const auto& [key, value] : options.items()) {
    if (key.size() != 1 || !value.is_string()) {
      throw SchemaError(line, "options must map single letters to strings");
    }
    gt.options[key[0]] = value.get<std::string>();
  }
  gt.answer = single_letter(line, require_string(line, j, "answer"), "answer");
  if (gt.options.find(gt.answer) == gt.options.end()) {
    throw SchemaError(line, "answer letter is not among the options");
  }
  try {
    gt.gt_spans = normalize(spans_from_json(line, require(line, j, "gt_spans_s")));
  } catch (const DomainError& e) {
    throw SchemaError(line, e.what());
  }
  return gt;
}

RolloutGroup parse_rollout_group(size_t line, const Json& j) {
  RolloutGroup group;
  group.prompt_id = require_string(line, j, "id");
  const Json& rollouts = require(line, j, "group");
  if (!rollouts.is_array() || rollouts.size() < 2) {
    throw SchemaError(line, "group must be an array of at least two rollouts");
  }
  for (const Json& r : rollouts) {
    Rollout rollout;
    rollout.raw_text = require_string(line, r, "text");
    if (r.contains("tokens")) {
      const Json& tokens = r.at("tokens");
      if (!tokens.is_array()) throw SchemaError(line, "tokens must be an array of strings");
      for (const Json& t : tokens) {
        if (!t.is_string()) throw SchemaError(line, "tokens must be an array of strings");
        rollout.token_texts.push_back(t.get<std::string>());
      }
      size_t total = 0;
      for (const auto& t : rollout.token_texts) total += t.size();
      if (total != rollout.raw_text.size()) {
        throw SchemaError(line, "tokens do not concatenate to text");
      }
    } else {
      rollout.token_texts = sim_tokenize(rollout.raw_text);
    }
    group.rollouts.push_back(std::move(rollout));
  }
  return group;
}

PredictionRecord parse_prediction(size_t line, const Json& j) {
  PredictionRecord pred;
  pred.id = require_string(line, j, "id");
  pred.answer = single_letter(line, require_string(line, j, "answer"), "answer");
  try {
    pred.spans = normalize(spans_from_json(line, require(line, j, "spans_s")));
  } catch (const DomainError& e) {
    throw SchemaError(line, e.what());
  }
  return pred;
}

FilterRecord parse_filter_record(size_t line, const Json& j) {
  FilterRecord record;
  record.id = require_string(line, j, "id");
  const Json& ious = require(line, j, "ious");
  if (!ious.is_array() || ious.empty()) {
    throw SchemaError(line, "ious must be a non-empty array of numbers");
  }
  for (const Json& v : ious) {
    if (!v.is_number()) throw SchemaError(line, "ious must be a non-empty array of numbers");
    record.ious.push_back(v.get<double>());
  }
  const Json& correct = require(line, j, "correct");
  if (!correct.is_array() || correct.size() != record.ious.size()) {
    throw SchemaError(line, "correct must be a boolean array aligned with ious");
  }
  for (const Json& v : correct) {
    if (!v.is_boolean()) throw SchemaError(line, "correct must be a boolean array aligned with ious");
    record.correct.push_back(v.get<bool>());
  }
  return record;
}

SyntheticEpisode parse_episode(size_t line, const Json& j) {
  SyntheticEpisode ep;
  const GroundTruth gt = parse_ground_truth(line, j);
  ep.id = gt.id;
  ep.duration = gt.duration;
  ep.question = gt.question;
  ep.options = gt.options;
  ep.answer = gt.answer;
  ep.gt_spans = gt.gt_spans;
  const Json& events = require(line, j, "events");
  if (!events.is_array() || events.empty()) {
    throw SchemaError(line, "events must be a non-empty array");
  }
  for (const Json& e : events) {
    SimEvent event;
    const Json& span = require(line, e, "span_s");
    auto pairs = spans_from_json(line, Json::array({span}));
    event.span = {pairs[0].first, pairs[0].second};
    event.category = require_string(line, e, "category");
    event.detail = require_string(line, e, "detail");
    ep.events.push_back(std::move(event));
  }
  const double threshold = require_number(line, j, "detail_threshold");
  ep.detail_threshold = static_cast<int>(threshold);
  bool found = false;
  for (size_t i = 0; i < ep.events.size(); ++i) {
    IntervalSet span = normalize({{ep.events[i].span.start, ep.events[i].span.end}});
    if (span == ep.gt_spans) {
      ep.target_index = i;
      found = true;
      break;
    }
  }
  if (!found) throw SchemaError(line, "no event span matches gt_spans_s");
  return ep;
}

Json episode_to_json(const SyntheticEpisode& episode) {
  Json events = Json::array();
  for (const auto& e : episode.events) {
    events.push_back(Json{{"span_s", Json::array({e.span.start, e.span.end})},
                          {"category", e.category},
                          {"detail", e.detail}});
  }
  Json j = ground_truth_to_json(to_ground_truth(episode));
  j["events"] = std::move(events);
  j["detail_threshold"] = episode.detail_threshold;
  return j;
}

Json ground_truth_to_json(const GroundTruth& gt) {
  Json options = Json::object();
  for (const auto& [letter, text] : gt.options) options[std::string(1, letter)] = text;
  return Json{{"id", gt.id},
              {"duration_s", gt.duration},
              {"question", gt.question},
              {"options", std::move(options)},
              {"answer", std::string(1, gt.answer)},
              {"gt_spans_s", spans_to_json(gt.gt_spans)}};
}

Json decision_to_json(const FilterDecision& decision) {
  return Json{{"id", decision.id},
              {"delta", decision.delta},
              {"all_correct", decision.all_correct},
              {"kept", decision.kept}};
}

Json filter_record_to_json(const FilterRecord& record) {
  Json correct = Json::array();
  for (bool c : record.correct) correct.push_back(c);
  return Json{{"id", record.id}, {"ious", record.ious}, {"correct", std::move(correct)}};
}

Json plan_to_json(const ZoomPlan& plan) {
  return Json{{"pass", plan.pass == PassKind::Coarse ? "coarse" : "fine"},
              {"frame_times_s", plan.frame_times},
              {"tokens_per_frame", plan.tokens_per_frame}};
}

Json trace_record_to_json(const TraceRecord& record) {
  return Json{{"step", record.step},
              {"mean_iou", record.mean_iou},
              {"mean_acc", record.mean_acc},
              {"mean_zoom", record.mean_zoom},
              {"mean_format", record.mean_format},
              {"objective", record.objective},
              {"grad_norm", record.grad_norm}};
}

Json report_to_json(const MetricReport& report) {
  Json recall = Json::object();
  for (const auto& [tau, value] : report.recall_at) {
    std::ostringstream key;
    key << tau;
    recall[key.str()] = value;
  }
  return Json{{"n", report.n},
              {"miou", report.miou},
              {"miog", report.miog},
              {"miop", report.miop},
              {"recall_at", std::move(recall)},
              {"acc", report.acc},
              {"acc_gqa", report.acc_gqa},
              {"rec_at_iou", report.rec_at_iou},
              {"acc_at_iou", report.acc_at_iou}};
}

}  // namespace zz
