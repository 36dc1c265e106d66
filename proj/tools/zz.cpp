#include <CLI11.hpp>
#include <iostream>
#include <memory>
#include <sstream>

#include "zz/advantage.hpp"
#include "zz/errors.hpp"
#include "zz/filter.hpp"
#include "zz/grpo.hpp"
#include "zz/http_client.hpp"
#include "zz/io.hpp"
#include "zz/metrics.hpp"
#include "zz/planner.hpp"
#include "zz/rewards.hpp"
#include "zz/sim.hpp"

namespace {

using zz::Json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;    // schema/validation problems
constexpr int kExitRuntime = 3;  // client or internal failures

struct BudgetFlags {
  int budget = 8192;
  int vmin = 16;
  int vmax = 768;
  double fps = 1.0;
  double fine_fps = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--budget", budget, "Total video token budget");
    cmd->add_option("--vmin", vmin, "Minimum tokens per frame");
    cmd->add_option("--vmax", vmax, "Maximum tokens per frame");
    cmd->add_option("--fps", fps, "Coarse sampling rate, frames/s");
    cmd->add_option("--fine-fps", fine_fps, "Fine-pass sampling rate, frames/s");
  }

  zz::BudgetConfig config() const { return {budget, vmin, vmax, fps}; }

  Json to_json() const {
    return Json{{"budget", budget}, {"vmin", vmin}, {"vmax", vmax},
                {"fps", fps},       {"fine_fps", fine_fps}};
  }
};

zz::AdvantageMode parse_mode(const std::string& mode) {
  return mode == "sum" ? zz::AdvantageMode::Summed : zz::AdvantageMode::TokenAdv;
}

/// Tracks whether any zoom query ever succeeded, so a dead endpoint can be
/// distinguished from ordinary zoom misses after scoring finishes.
class CountingClient : public zz::PolicyClient {
 public:
  explicit CountingClient(zz::PolicyClient& inner) : inner_(inner) {}

  zz::ClientResponse query(const zz::ClientRequest& request) override {
    ++attempts_;
    zz::ClientResponse response = inner_.query(request);
    ++successes_;
    return response;
  }

  size_t attempts() const { return attempts_; }
  size_t successes() const { return successes_; }

 private:
  zz::PolicyClient& inner_;
  size_t attempts_ = 0;
  size_t successes_ = 0;
};

struct ScoreArgs {
  std::string rollouts, gt, episodes, out;
  std::string mode = "tokenadv";
  std::string zoom_client = "sim";
  int group_size = 0;
  BudgetFlags budget;
};

int run_score(const ScoreArgs& args) {
  const auto gt_records = zz::read_jsonl(args.gt);
  std::map<std::string, zz::GroundTruth> gts;
  for (const auto& [line, j] : gt_records) {
    zz::GroundTruth gt = zz::parse_ground_truth(line, j);
    if (!gts.emplace(gt.id, gt).second) throw zz::SchemaError(line, "duplicate gt id " + gt.id);
  }

  std::unique_ptr<zz::PolicyClient> client;
  const bool endpoint_client = args.zoom_client != "sim";
  if (!endpoint_client) {
    auto sim = std::make_unique<zz::ScriptedClient>();
    if (!args.episodes.empty()) {
      for (const auto& [line, j] : zz::read_jsonl(args.episodes)) {
        sim->add_episode(zz::parse_episode(line, j));
      }
    }
    client = std::move(sim);
  } else {
    client = std::make_unique<zz::HttpPolicyClient>(args.zoom_client);
  }
  CountingClient counted(*client);
  const zz::ZoomPlanner planner{args.budget.config(), args.budget.fine_fps};

  const auto rollout_records = zz::read_jsonl(args.rollouts);
  if (rollout_records.empty()) throw zz::SchemaError(1, "no rollout records in " + args.rollouts);

  Json config{{"command", "score"},     {"rollouts", args.rollouts},
              {"gt", args.gt},          {"episodes", args.episodes},
              {"mode", args.mode},      {"group_size", args.group_size},
              {"zoom_client", args.zoom_client}};
  config.update(args.budget.to_json());
  std::vector<std::string> lines{zz::schema_header(config).dump()};

  for (const auto& [line, j] : rollout_records) {
    const zz::RolloutGroup group = zz::parse_rollout_group(line, j);
    if (args.group_size > 0 &&
        group.rollouts.size() != static_cast<size_t>(args.group_size)) {
      throw zz::SchemaError(line, "group size does not match --group-size");
    }
    auto found = gts.find(group.prompt_id);
    if (found == gts.end()) {
      throw zz::SchemaError(line, "no ground truth for id " + group.prompt_id);
    }
    const zz::GroundTruth& gt = found->second;
    const std::vector<zz::RewardVector> rewards = zz::score_group(group, gt, counted, planner);

    std::vector<std::vector<double>> advantages(group.rollouts.size());
    if (parse_mode(args.mode) == zz::AdvantageMode::TokenAdv) {
      const zz::GroupAdvantages ga = zz::normalize_per_reward(rewards);
      for (size_t i = 0; i < group.rollouts.size(); ++i) {
        const auto& rollout = group.rollouts[i];
        auto mask = zz::glue_token_mask(rollout.raw_text, rollout.token_texts);
        zz::TokenSpanMap span_map;
        if (mask.ok()) {
          span_map = mask.value();
        } else {
          // No recoverable glue region: route everything as answer tokens.
          span_map.total_len = rollout.token_texts.size();
          span_map.is_glue.assign(span_map.total_len, false);
        }
        advantages[i] = zz::token_advantages(ga, span_map, i);
      }
    } else {
      const std::vector<double> summed = zz::summed_advantage(rewards);
      for (size_t i = 0; i < group.rollouts.size(); ++i) {
        advantages[i].assign(group.rollouts[i].token_texts.size(), summed[i]);
      }
    }

    for (size_t i = 0; i < group.rollouts.size(); ++i) {
      Json record{{"id", group.prompt_id},
                  {"rollout", i},
                  {"rewards", Json{{"format", rewards[i].format},
                                   {"acc", rewards[i].acc},
                                   {"iou", rewards[i].iou},
                                   {"zoom", rewards[i].zoom}}},
                  {"advantages", advantages[i]}};
      lines.push_back(record.dump());
    }
  }
  // Zoom misses are legitimate scores, but an endpoint that never answered
  // a single query is a transport failure, not data.
  if (endpoint_client && counted.attempts() > 0 && counted.successes() == 0) {
    throw zz::ClientError(zz::ClientError::Kind::Timeout,
                          "zoom endpoint " + args.zoom_client + " answered none of " +
                              std::to_string(counted.attempts()) + " queries");
  }
  zz::write_lines_atomic(args.out, lines);
  std::cout << "scored " << rollout_records.size() << " groups -> " << args.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string pred, gt, out, per_item;
  std::vector<std::string> metrics;
};

int run_eval(const EvalArgs& args) {
  std::vector<zz::GroundTruth> gts;
  for (const auto& [line, j] : zz::read_jsonl(args.gt)) {
    gts.push_back(zz::parse_ground_truth(line, j));
  }
  std::vector<zz::PredictionRecord> preds;
  for (const auto& [line, j] : zz::read_jsonl(args.pred)) {
    preds.push_back(zz::parse_prediction(line, j));
  }
  const zz::MetricReport report = zz::evaluate(preds, gts);
  const std::string table = zz::format_report(report, args.metrics);

  Json config{{"command", "eval"}, {"pred", args.pred}, {"gt", args.gt},
              {"metrics", args.metrics}};
  zz::write_lines_atomic(args.out, {zz::schema_header(config).dump(),
                                    zz::report_to_json(report).dump()});
  if (!args.per_item.empty()) {
    std::vector<std::string> csv{"id,correct,has_pred_spans,iou,iog,iop"};
    for (const auto& item : zz::score_items(preds, gts)) {
      std::ostringstream row;
      row << item.id << "," << item.correct << "," << item.has_pred_spans << "," << item.iou
          << "," << item.iog << "," << (item.has_pred_spans ? item.iop : 0.0);
      csv.push_back(row.str());
    }
    zz::write_lines_atomic(args.per_item, csv);
  }
  std::cout << table;
  return kExitOk;
}

struct PlanArgs {
  double duration = 0.0;
  std::string spans;
  int windows = 0;  // 0: no window schedule requested
  int topk = zz::kDefaultTopK;
  BudgetFlags budget;
};

int run_plan(const PlanArgs& args) {
  const zz::BudgetConfig budget = args.budget.config();
  zz::validate_budget(budget);
  Json config{{"command", "plan"}, {"duration", args.duration}, {"windows", args.windows},
              {"top_k", args.topk}};
  config.update(args.budget.to_json());
  std::cout << zz::schema_header(config).dump() << "\n";

  std::cout << zz::plan_to_json(zz::coarse_plan(args.duration, budget)).dump() << "\n";
  if (!args.spans.empty()) {
    Json spans_json = Json::parse(args.spans, nullptr, false);
    if (spans_json.is_discarded()) throw zz::SchemaError(1, "--spans is not valid JSON");
    const zz::IntervalSet spans = zz::normalize(zz::spans_from_json(1, spans_json));
    std::cout << zz::plan_to_json(zz::fine_plan(spans, budget, args.budget.fine_fps)).dump()
              << "\n";
  }
  if (args.windows > 0) {
    Json windows = Json::array();
    for (const auto& w : zz::divide_windows(args.duration, args.windows, budget)) {
      windows.push_back(Json::array({w.start, w.end}));
    }
    std::cout << Json{{"windows_s", windows}, {"top_k", args.topk}}.dump() << "\n";
  }
  return kExitOk;
}

struct FilterArgs {
  std::string in, out;
  double delta = 0.1;
};

int run_filter(const FilterArgs& args) {
  std::vector<zz::FilterRecord> records;
  for (const auto& [line, j] : zz::read_jsonl(args.in)) {
    records.push_back(zz::parse_filter_record(line, j));
  }
  const std::vector<zz::FilterDecision> decisions = zz::filter_examples(records, args.delta);

  Json config{{"command", "filter"}, {"in", args.in}, {"delta", args.delta}};
  const std::string header = zz::schema_header(config).dump();
  std::vector<std::string> kept_lines{header};
  std::vector<std::string> decision_lines{header};
  size_t kept = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    decision_lines.push_back(zz::decision_to_json(decisions[i]).dump());
    if (decisions[i].kept) {
      kept_lines.push_back(zz::filter_record_to_json(records[i]).dump());
      ++kept;
    }
  }
  zz::write_lines_atomic(args.out, kept_lines);
  zz::write_lines_atomic(args.out + ".decisions", decision_lines);
  std::cout << "kept " << kept << " of " << records.size() << " examples -> " << args.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  size_t steps = 1000;
  size_t group_size = 8;
  uint64_t seed = 0;
  std::string mode = "tokenadv";
  double beta = 0.04;
  double lr = 0.05;
  std::string kl = "k3";
  bool clip = false;
  double clip_eps = 0.2;
  std::string out, csv;
  BudgetFlags budget;
};

int run_train(const TrainArgs& args) {
  if (args.group_size < 2) throw zz::DomainError("--group-size must be at least 2");
  zz::OptimizerConfig cfg;
  cfg.beta = args.beta;
  cfg.group_size = args.group_size;
  cfg.learning_rate = args.lr;
  cfg.steps = args.steps;
  cfg.seed = args.seed;
  cfg.mode = parse_mode(args.mode);
  cfg.kl = args.kl == "exact" ? zz::KlEstimator::Exact : zz::KlEstimator::K3;
  cfg.clip = args.clip;
  cfg.clip_eps = args.clip_eps;

  zz::ToyTask task = zz::default_train_task(args.budget.fine_fps, args.budget.config());

  zz::TrainingTrace trace;
  try {
    trace = zz::train_loop(task, cfg);
  } catch (const std::exception& e) {
    throw zz::ClientError(zz::ClientError::Kind::Protocol,
                          std::string("scoring failed during training: ") + e.what());
  }

  Json config{{"command", "train-toy"}, {"steps", args.steps}, {"group_size", args.group_size},
              {"seed", args.seed},      {"mode", args.mode},   {"beta", args.beta},
              {"lr", args.lr},          {"kl", args.kl},       {"clip", args.clip},
              {"clip_eps", args.clip_eps}};
  config.update(args.budget.to_json());
  std::vector<std::string> lines{zz::schema_header(config).dump()};
  for (const auto& record : trace.records) {
    lines.push_back(zz::trace_record_to_json(record).dump());
  }
  zz::write_lines_atomic(args.out, lines);

  const std::string csv_path = args.csv.empty() ? args.out + ".csv" : args.csv;
  std::vector<std::string> csv{"# " + config.dump(),
                               "step,mean_iou,mean_acc,mean_zoom,mean_format,objective,grad_norm"};
  for (const auto& r : trace.records) {
    std::ostringstream row;
    row << r.step << "," << r.mean_iou << "," << r.mean_acc << "," << r.mean_zoom << ","
        << r.mean_format << "," << r.objective << "," << r.grad_norm;
    csv.push_back(row.str());
  }
  zz::write_lines_atomic(csv_path, csv);

  const zz::TraceRecord& last = trace.records.back();
  std::cout << "final step " << last.step << ": mean_iou " << last.mean_iou << ", mean_acc "
            << last.mean_acc << ", mean_zoom " << last.mean_zoom << " -> " << args.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale toolkit for grounded video QA training signals"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; flags override file values")
      ->envname("ZZ_CONFIG");
  // --config lives on the top-level app; let it match even when it appears
  // after the subcommand name.
  app.fallthrough();

  ScoreArgs score;
  CLI::App* score_cmd =
      app.add_subcommand("score", "Score rollout groups and emit per-token advantages");
  score_cmd->configurable();
  score_cmd->add_option("--rollouts", score.rollouts, "Rollout groups, JSONL")->required();
  score_cmd->add_option("--gt", score.gt, "Ground truth, JSONL")->required();
  score_cmd->add_option("--episodes", score.episodes, "Episodes for the sim zoom client, JSONL");
  score_cmd->add_option("--out", score.out, "Output path, JSONL")->required();
  score_cmd->add_option("--mode", score.mode, "Advantage mode")
      ->check(CLI::IsMember({"tokenadv", "sum"}));
  score_cmd->add_option("--group-size", score.group_size, "Expected rollouts per group");
  score_cmd->add_option("--zoom-client", score.zoom_client,
                        "\"sim\" or an http(s) endpoint for the fine pass");
  score.budget.attach(score_cmd);

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  eval_cmd->configurable();
  eval_cmd->add_option("--pred", eval.pred, "Predictions, JSONL")->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground truth, JSONL")->required();
  eval_cmd->add_option("--out", eval.out, "Report output path, JSONL")->required();
  eval_cmd->add_option("--metrics", eval.metrics, "Subset of metrics to print")->delimiter(',');
  eval_cmd->add_option("--per-item", eval.per_item, "Optional per-item CSV path");

  PlanArgs plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Print frame plans for a video");
  plan_cmd->configurable();
  plan_cmd->add_option("--duration", plan.duration, "Video duration in seconds")->required();
  plan_cmd->add_option("--spans", plan.spans, "JSON [[start,end],...] for a fine pass");
  plan_cmd->add_option("--windows", plan.windows, "Partition into windows of this many frames");
  plan_cmd->add_option("--topk", plan.topk, "Spans aggregated from the window sweep");
  plan.budget.attach(plan_cmd);

  FilterArgs filter;
  CLI::App* filter_cmd =
      app.add_subcommand("filter", "Drop examples whose rollouts lack learning signal");
  filter_cmd->configurable();
  filter_cmd->add_option("--in", filter.in, "Rollout statistics, JSONL")->required();
  filter_cmd->add_option("--out", filter.out, "Kept records output path")->required();
  filter_cmd->add_option("--delta", filter.delta, "Minimum max-mean IoU spread to keep");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train-toy", "Train the toy policy on the sim task");
  train_cmd->configurable();
  train_cmd->add_option("--steps", train.steps, "Gradient steps");
  train_cmd->add_option("--group-size", train.group_size, "Rollouts per step");
  train_cmd->add_option("--seed", train.seed, "RNG seed");
  train_cmd->add_option("--mode", train.mode, "Advantage mode")
      ->check(CLI::IsMember({"tokenadv", "sum"}));
  train_cmd->add_option("--beta", train.beta, "KL coefficient");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--kl", train.kl, "KL estimator")->check(CLI::IsMember({"k3", "exact"}));
  train_cmd->add_flag("--clip", train.clip, "Enable ratio clipping");
  train_cmd->add_option("--clip-eps", train.clip_eps, "Clipping width");
  train_cmd->add_option("--out", train.out, "Trace output path, JSONL")->required();
  train_cmd->add_option("--csv", train.csv, "Trace CSV path (default: <out>.csv)");
  train.budget.attach(train_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (score_cmd->parsed()) return run_score(score);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (plan_cmd->parsed()) return run_plan(plan);
    if (filter_cmd->parsed()) return run_filter(filter);
    if (train_cmd->parsed()) return run_train(train);
  } catch (const zz::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const zz::ClientError& e) {
    std::cerr << "client error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const zz::DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
