// Release gate: nine end-to-end checks over the reward, credit-assignment,
// optimization, budgeting, scheduling, and evaluation machinery. Each check
// prints one [PASS]/[FAIL] line; the process exits nonzero if any fail.
//
// Where a check has a hand-worked target, the target was computed away from
// the implementation (closed-form normalization tables, integer budget
// splits, rasterized overlap counts, central finite differences) and is
// frozen here.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "zz/advantage.hpp"
#include "zz/errors.hpp"
#include "zz/filter.hpp"
#include "zz/grpo.hpp"
#include "zz/intervals.hpp"
#include "zz/metrics.hpp"
#include "zz/planner.hpp"
#include "zz/policy.hpp"
#include "zz/response.hpp"
#include "zz/rewards.hpp"
#include "zz/rng.hpp"
#include "zz/sim.hpp"

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }

  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------
// 1. Five-rollout normalization golden table.

Check check_advantage_golden_table() {
  Check c;
  const std::vector<double> r_iou = {0.0, 0.5, 0.4, 0.8, 0.2};
  const std::vector<int> r_acc = {1, 0, 1, 0, 1};
  std::vector<zz::RewardVector> rewards;
  for (size_t i = 0; i < 5; ++i) {
    zz::RewardVector rv;
    rv.format = 0;
    rv.acc = r_acc[i];
    rv.iou = r_iou[i];
    rv.zoom = 0;
    rewards.push_back(rv);
  }

  const zz::GroupAdvantages ga = zz::normalize_per_reward(rewards);
  const std::vector<double> want_iou = {-1.40, 0.44, 0.07, 1.55, -0.66};
  const std::vector<double> want_acc = {0.82, -1.22, 0.82, -1.22, 0.82};
  const std::vector<double>& a_iou = ga.of(zz::RewardKind::IoU);
  const std::vector<double>& a_acc = ga.of(zz::RewardKind::Acc);
  c.expect(a_iou.size() == 5 && a_acc.size() == 5, "advantage columns must have length 5");
  for (size_t i = 0; i < 5 && c.ok; ++i) {
    c.expect(close(a_iou[i], want_iou[i], 0.01),
             "overlap advantage [" + std::to_string(i) + "] = " + fmt(a_iou[i]) + ", want " +
                 fmt(want_iou[i]) + " +/- 0.01");
    c.expect(close(a_acc[i], want_acc[i], 0.01),
             "answer advantage [" + std::to_string(i) + "] = " + fmt(a_acc[i]) + ", want " +
                 fmt(want_acc[i]) + " +/- 0.01");
  }

  const std::vector<double> summed = zz::summed_advantage(rewards);
  const std::vector<double> want_sum = {0.06, -1.54, 1.34, -0.58, 0.70};
  c.expect(summed.size() == 5, "summed advantages must have length 5");
  for (size_t i = 0; i < 5 && c.ok; ++i) {
    c.expect(close(summed[i], want_sum[i], 0.01),
             "summed advantage [" + std::to_string(i) + "] = " + fmt(summed[i]) + ", want " +
                 fmt(want_sum[i]) + " +/- 0.01");
  }
  c.note("per-reward and summed tables within 0.01");
  return c;
}

// ---------------------------------------------------------------------------
// 2. Integer budget splits for the two sampling passes.

Check check_budget_planner() {
  Check c;
  const zz::BudgetConfig cfg{8192, 16, 768, 1.0};

  const zz::ZoomPlan coarse = zz::coarse_plan(1024.0, cfg);
  c.expect(coarse.n_frames == 512, "coarse frames = " + std::to_string(coarse.n_frames) +
                                       ", want 512");
  c.expect(coarse.tokens_per_frame == 16,
           "coarse tokens/frame = " + std::to_string(coarse.tokens_per_frame) + ", want 16");
  c.expect(coarse.frame_times.size() == 512, "coarse plan must carry 512 frame times");

  const zz::ZoomPlan fine = zz::fine_plan(zz::normalize({{10.0, 74.0}}), cfg, 1.0);
  c.expect(fine.n_frames == 64,
           "fine frames = " + std::to_string(fine.n_frames) + ", want 64");
  c.expect(fine.tokens_per_frame == 128,
           "fine tokens/frame = " + std::to_string(fine.tokens_per_frame) + ", want 128");

  // Budget and monotonicity invariants over random durations, measures,
  // rates, and budget shapes.
  const std::vector<zz::BudgetConfig> cfgs = {
      cfg, zz::BudgetConfig{2048, 8, 256, 2.0}, zz::BudgetConfig{512, 16, 64, 1.0}};
  const std::vector<double> fine_rates = {0.5, 1.0, 2.0, 4.0};
  zz::Rng rng(zz::split_seed(20260201));
  for (int trial = 0; trial < 2000 && c.ok; ++trial) {
    const zz::BudgetConfig& b = cfgs[static_cast<size_t>(trial) % cfgs.size()];
    const double duration = rng.uniform(0.2, 3000.0);
    const zz::ZoomPlan cp = zz::coarse_plan(duration, b);
    const long long cl = static_cast<long long>(cp.n_frames) * cp.tokens_per_frame;
    c.expect(cp.n_frames >= 1, "coarse pass must place at least one frame");
    c.expect(cl <= b.token_budget, "coarse load " + std::to_string(cl) + " exceeds budget " +
                                       std::to_string(b.token_budget));

    const double m = rng.uniform(0.05, duration);
    const double a = rng.uniform(0.0, duration - m);
    const double rate = fine_rates[static_cast<size_t>(trial / 3) % fine_rates.size()];
    const zz::ZoomPlan fp = zz::fine_plan(zz::normalize({{a, a + m}}), b, rate);
    const long long fl = static_cast<long long>(fp.n_frames) * fp.tokens_per_frame;
    c.expect(fp.n_frames >= 1, "fine pass must place at least one frame");
    c.expect(fl <= b.token_budget, "fine load " + std::to_string(fl) + " exceeds budget " +
                                       std::to_string(b.token_budget));
    if (fp.n_frames <= cp.n_frames) {
      c.expect(fp.tokens_per_frame >= cp.tokens_per_frame,
               "zooming onto fewer frames must not lower tokens/frame (" +
                   std::to_string(fp.tokens_per_frame) + " < " +
                   std::to_string(cp.tokens_per_frame) + ")");
    }
  }
  c.note("512x16 and 64x128 exact; invariants hold on 2000 random plans");
  return c;
}

// ---------------------------------------------------------------------------
// 3. Interval ratios vs a rasterized brute-force oracle.

Check check_interval_raster_equivalence() {
  Check c;
  const double horizon = 50.0;
  const double tol = 1e-9;  // endpoints lie on the raster grid, so exact
  zz::Rng rng(zz::split_seed(31337));

  auto random_spans = [&rng](int max_spans) {
    std::vector<std::pair<double, double>> raw;
    const int k = static_cast<int>(rng.uniform_int(1, max_spans));
    for (int i = 0; i < k; ++i) {
      const double a = 0.01 * static_cast<double>(rng.uniform_int(0, 4800));
      const double len = 0.01 * static_cast<double>(rng.uniform_int(1, 600));
      raw.emplace_back(a, std::min(a + len, 50.0));
    }
    return raw;
  };

  double worst = 0.0;
  for (int trial = 0; trial < 10000 && c.ok; ++trial) {
    const auto raw_pred = random_spans(4);
    const auto raw_gt = random_spans(4);
    const zz::IntervalSet pred = zz::normalize(raw_pred);
    const zz::IntervalSet gt = zz::normalize(raw_gt);

    std::vector<zz::TimeInterval> op, og;
    for (const auto& [s, e] : raw_pred) op.push_back({s, e});
    for (const auto& [s, e] : raw_gt) og.push_back({s, e});
    const oracle::RasterRatios want = oracle::raster_ratios(op, og, horizon);

    const double got_iou = zz::iou(pred, gt);
    const double got_iog = zz::iog(pred, gt);
    const double got_iop = zz::iop(pred, gt);
    worst = std::max({worst, std::abs(got_iou - want.iou), std::abs(got_iog - want.iog),
                      std::abs(got_iop - want.iop)});
    c.expect(close(got_iou, want.iou, tol), "trial " + std::to_string(trial) + ": iou " +
                                                fmt(got_iou) + " vs raster " + fmt(want.iou));
    c.expect(close(got_iog, want.iog, tol), "trial " + std::to_string(trial) + ": iog " +
                                                fmt(got_iog) + " vs raster " + fmt(want.iog));
    c.expect(close(got_iop, want.iop, tol), "trial " + std::to_string(trial) + ": iop " +
                                                fmt(got_iop) + " vs raster " + fmt(want.iop));
  }
  c.note("10000 pairs, worst |diff| " + fmt(worst));
  return c;
}

// ---------------------------------------------------------------------------
// 4. Analytic policy gradient vs central finite differences.

Check check_gradient_fidelity() {
  Check c;
  const double tol = 1e-5;
  double worst = 0.0;
  size_t checked = 0;

  const std::array<zz::AdvantageMode, 2> modes = {zz::AdvantageMode::TokenAdv,
                                                  zz::AdvantageMode::Summed};
  const std::array<double, 2> betas = {0.0, 0.04};

  for (size_t mi = 0; mi < modes.size(); ++mi) {
    for (size_t bi = 0; bi < betas.size(); ++bi) {
      for (int trial = 0; trial < 112 && c.ok; ++trial) {
        zz::Rng rng(zz::split_seed(0xACCEu + 1000 * (mi * 2 + bi) + static_cast<uint64_t>(trial)));
        const size_t vocab = static_cast<size_t>(rng.uniform_int(3, 5));
        const size_t order = static_cast<size_t>(rng.uniform_int(1, 2));

        zz::ToyPolicy old_policy(vocab, order), ref_policy(vocab, order), policy(vocab, order);
        for (double& p : old_policy.params()) p = rng.uniform(-0.8, 0.8);
        for (double& p : ref_policy.params()) p = rng.uniform(-0.8, 0.8);
        for (size_t i = 0; i < policy.params().size(); ++i) {
          policy.params()[i] = old_policy.params()[i] + rng.uniform(-0.05, 0.05);
        }

        std::vector<zz::GroupInstance> groups;
        for (int gi = 0; gi < 2; ++gi) {
          zz::GroupInstance group;
          const int prompt_len = static_cast<int>(rng.uniform_int(1, 2));
          for (int i = 0; i < prompt_len; ++i) {
            group.prompt.push_back(static_cast<size_t>(
                rng.uniform_int(0, static_cast<int64_t>(vocab) - 1)));
          }
          const size_t g = static_cast<size_t>(rng.uniform_int(2, 4));
          std::vector<std::vector<size_t>> tokens(g);
          std::vector<zz::RewardVector> rewards(g);
          for (size_t i = 0; i < g; ++i) {
            const int len = static_cast<int>(rng.uniform_int(2, 5));
            for (int t = 0; t < len; ++t) {
              tokens[i].push_back(static_cast<size_t>(
                  rng.uniform_int(0, static_cast<int64_t>(vocab) - 1)));
            }
            rewards[i].format = rng.next_double() < 0.5 ? 1 : 0;
            rewards[i].acc = rng.next_double() < 0.5 ? 1 : 0;
            rewards[i].zoom = rng.next_double() < 0.5 ? 1 : 0;
            rewards[i].iou = rng.uniform(0.0, 1.0);
          }
          if (modes[mi] == zz::AdvantageMode::TokenAdv) {
            const zz::GroupAdvantages ga = zz::normalize_per_reward(rewards);
            for (size_t i = 0; i < g; ++i) {
              zz::TokenSpanMap mask;
              mask.total_len = tokens[i].size();
              for (size_t t = 0; t < mask.total_len; ++t) {
                mask.is_glue.push_back(rng.next_double() < 0.4);
              }
              group.rollouts.push_back({tokens[i], zz::token_advantages(ga, mask, i)});
            }
          } else {
            const std::vector<double> summed = zz::summed_advantage(rewards);
            for (size_t i = 0; i < g; ++i) {
              group.rollouts.push_back(
                  {tokens[i], std::vector<double>(tokens[i].size(), summed[i])});
            }
          }
          groups.push_back(std::move(group));
        }

        zz::ObjectiveOptions opt;
        opt.beta = betas[bi];
        opt.kl = (trial % 2 == 0) ? zz::KlEstimator::K3 : zz::KlEstimator::Exact;
        const std::vector<double> analytic =
            zz::grpo_gradient(policy, old_policy, ref_policy, groups, opt);
        const std::vector<double> numeric =
            oracle::fd_gradient(policy, old_policy, ref_policy, groups, opt);
        const double err = oracle::gradient_rel_error(analytic, numeric);
        worst = std::max(worst, err);
        ++checked;
        c.expect(err <= tol, "mode " + std::to_string(mi) + " beta " + fmt(betas[bi]) +
                                 " trial " + std::to_string(trial) + ": relative error " +
                                 fmt(err));
      }
    }
  }
  c.note(std::to_string(checked) + " instances, worst relative error " + fmt(worst));
  return c;
}

// ---------------------------------------------------------------------------
// 5. Zoom reward semantics on seeded synthetic episodes.

int replay_zoom(const zz::IntervalSet& glue, const zz::SyntheticEpisode& ep,
                const zz::ZoomPlanner& planner) {
  const zz::IntervalSet clamped = zz::clamp(glue, 0.0, ep.duration);
  if (clamped.empty() || clamped.measure() <= 0.0) return 0;
  const zz::ZoomPlan plan = planner.plan_fine(clamped);
  const zz::TimeInterval& target = ep.events[ep.target_index].span;
  bool visible = false;
  const long long n = zz::frames_for_measure(clamped.measure(), planner.fine_fps);
  for (double t : zz::place_frames(clamped, n)) {
    if (target.contains(t)) {
      visible = true;
      break;
    }
  }
  return visible && plan.tokens_per_frame >= ep.detail_threshold ? 1 : 0;
}

Check check_zoom_semantics() {
  Check c;
  const zz::BudgetConfig budget{};
  const zz::ZoomPlanner planner{budget, 1.0};

  int made = 0;
  uint64_t seed = 1;
  for (; made < 500 && seed < 5000 && c.ok; ++seed) {
    zz::SyntheticEpisode ep;
    try {
      ep = zz::generate_episode(seed, {100.0, 200.0}, 3, budget, planner.fine_fps);
    } catch (const zz::DomainError&) {
      continue;  // rare packing rejection; try the next seed
    }
    ++made;

    const zz::TimeInterval target = ep.events[ep.target_index].span;
    std::vector<zz::IntervalSet> glue(5);
    glue[0] = ep.gt_spans;
    glue[1] = zz::normalize({{0.0, ep.duration}});
    if (target.end + 3.0 <= ep.duration) {
      glue[2] = zz::normalize({{target.end + 1.0, target.end + 3.0}});
    } else {
      c.expect(target.start >= 3.0, "no room for a disjoint span in episode " + ep.id);
      if (!c.ok) break;
      glue[2] = zz::normalize({{target.start - 3.0, target.start - 1.0}});
    }
    glue[3] = zz::IntervalSet{};
    glue[4] = zz::normalize({{target.start, target.start + target.length() / 2.0}});

    zz::RolloutGroup group;
    group.prompt_id = ep.id;
    for (const zz::IntervalSet& spans : glue) {
      group.rollouts.push_back({zz::render_response("zoom in", ep.answer, spans), {}});
    }

    zz::ScriptedClient client;
    client.add_episode(ep);
    const std::vector<zz::RewardVector> rvs =
        zz::score_group(group, zz::to_ground_truth(ep), client, planner);
    c.expect(rvs.size() == 5, "expected five scored rollouts");
    if (!c.ok) break;

    for (size_t row = 0; row < 5; ++row) {
      const zz::RewardVector& rv = rvs[row];
      const int want_zoom = replay_zoom(glue[row], ep, planner);
      c.expect(rv.format == 1 && rv.acc == 1,
               ep.id + " row " + std::to_string(row) + ": rendered rollouts must parse correct");
      c.expect(rv.zoom == want_zoom,
               ep.id + " row " + std::to_string(row) + ": zoom " + std::to_string(rv.zoom) +
                   ", replay says " + std::to_string(want_zoom));
      const bool all_ones = rv.format == 1 && rv.acc == 1 && rv.iou == 1.0 && rv.zoom == 1;
      c.expect(all_ones == (row == 0),
               ep.id + " row " + std::to_string(row) + ": all-ones reward must hold exactly " +
                   "for the exact-evidence rollout");
      if (!c.ok) break;
    }
    if (!c.ok) break;

    // The exact-evidence rollout zooms successfully; the full-video span
    // covers the event but dilutes resolution below the detail threshold;
    // disjoint and empty evidence always score zoom 0.
    c.expect(rvs[0].zoom == 1, ep.id + ": exact evidence must earn the zoom reward");
    c.expect(rvs[1].zoom == 0, ep.id + ": whole-video evidence must dilute resolution");
    c.expect(rvs[2].zoom == 0, ep.id + ": disjoint evidence must score zoom 0");
    c.expect(rvs[3].zoom == 0, ep.id + ": empty evidence must score zoom 0");
    c.expect(rvs[4].zoom == 1, ep.id + ": a tighter sub-span keeps the detail readable");
    c.expect(rvs[1].iou > 0.0 && rvs[1].iou < 1.0, ep.id + ": whole-video overlap not in (0,1)");
    c.expect(rvs[4].iou > 0.0 && rvs[4].iou < 1.0, ep.id + ": sub-span overlap not in (0,1)");
  }
  c.expect(made == 500, "only generated " + std::to_string(made) + " of 500 episodes");
  c.note("500 episodes x 5 evidence variants, zoom replayed exactly");
  return c;
}

// ---------------------------------------------------------------------------
// 6. Per-token credit routing vs summed baseline across paired seeds.

double window_mean_iou(const std::vector<zz::TraceRecord>& records, size_t from, size_t count) {
  double sum = 0.0;
  for (size_t i = from; i < from + count; ++i) sum += records[i].mean_iou;
  return sum / static_cast<double>(count);
}

Check check_training_trend() {
  Check c;
  const size_t steps = 5000;
  const size_t window = 200;
  int wins = 0;
  double min_improvement = 1e9;

  for (uint64_t seed = 1; seed <= 5 && c.ok; ++seed) {
    double final_by_mode[2] = {0.0, 0.0};
    for (int mode = 0; mode < 2 && c.ok; ++mode) {
      zz::OptimizerConfig cfg;
      cfg.beta = 0.04;
      cfg.group_size = 8;
      cfg.learning_rate = 6.0;
      cfg.steps = steps;
      cfg.seed = seed;
      cfg.mode = mode == 0 ? zz::AdvantageMode::TokenAdv : zz::AdvantageMode::Summed;

      zz::ToyTask task = zz::default_train_task();
      const zz::TrainingTrace trace = zz::train_loop(task, cfg);
      c.expect(trace.records.size() == steps + 1, "trace must hold one record per policy state");
      if (!c.ok) break;

      const double head = window_mean_iou(trace.records, 0, window);
      const double tail = window_mean_iou(trace.records, trace.records.size() - window, window);
      final_by_mode[mode] = tail;
      min_improvement = std::min(min_improvement, tail - head);
      c.expect(tail - head >= 0.1,
               "seed " + std::to_string(seed) + (mode == 0 ? " routed" : " summed") +
                   ": overlap reward improved only " + fmt(tail - head));
    }
    if (final_by_mode[0] >= final_by_mode[1]) ++wins;
  }
  c.expect(wins >= 4, "routed credit won only " + std::to_string(wins) + " of 5 paired seeds");
  c.note("routed credit wins " + std::to_string(wins) + "/5, min improvement " +
         fmt(min_improvement));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Evaluation protocol fixtures and structural bounds.

zz::GroundTruth protocol_gt(const std::string& id, std::vector<std::pair<double, double>> spans,
                            double duration, char answer) {
  zz::GroundTruth gt;
  gt.id = id;
  gt.question = "q";
  gt.options = {{'A', "1"}, {'B', "2"}, {'C', "3"}, {'D', "4"}};
  gt.answer = answer;
  gt.gt_spans = zz::normalize(spans);
  gt.duration = duration;
  return gt;
}

Check check_metric_protocol() {
  Check c;
  const double tol = 1e-12;

  {
    // IoUs 0.6 / 0.2 / 0.35 against a shared (0, 10) target.
    const std::vector<zz::GroundTruth> gts = {protocol_gt("a", {{0, 10}}, 30, 'A'),
                                              protocol_gt("b", {{0, 10}}, 30, 'A'),
                                              protocol_gt("c", {{0, 10}}, 30, 'A')};
    const std::vector<zz::PredictionRecord> preds = {{"a", 'A', zz::normalize({{0, 6}})},
                                                     {"b", 'A', zz::normalize({{0, 2}})},
                                                     {"c", 'A', zz::normalize({{0, 3.5}})}};
    const zz::MetricReport report = zz::evaluate(preds, gts);
    c.expect(close(report.miou, (0.6 + 0.2 + 0.35) / 3.0, tol),
             "mean IoU " + fmt(report.miou) + ", want 0.383333...");
    c.expect(close(report.recall_at.at(0.3), 2.0 / 3.0, tol),
             "recall@0.3 " + fmt(report.recall_at.at(0.3)) + ", want 2/3");
    c.expect(close(report.recall_at.at(0.5), 1.0 / 3.0, tol),
             "recall@0.5 " + fmt(report.recall_at.at(0.5)) + ", want 1/3");
  }
  {
    // correct = [yes, yes, no], IoP = [0.6, 0.4, 0.9] -> acc_gqa 1/3.
    const std::vector<zz::GroundTruth> gts = {protocol_gt("a", {{0, 6}}, 30, 'A'),
                                              protocol_gt("b", {{0, 4}}, 30, 'A'),
                                              protocol_gt("c", {{0, 9}}, 30, 'A')};
    const std::vector<zz::PredictionRecord> preds = {{"a", 'A', zz::normalize({{0, 10}})},
                                                     {"b", 'A', zz::normalize({{0, 10}})},
                                                     {"c", 'B', zz::normalize({{0, 10}})}};
    const zz::MetricReport report = zz::evaluate(preds, gts);
    c.expect(close(report.acc_gqa, 1.0 / 3.0, tol),
             "grounded accuracy " + fmt(report.acc_gqa) + ", want 1/3");
  }
  {
    // IoUs 0.45 and 0.05 -> threshold-averaged recall 0.4.
    const std::vector<zz::GroundTruth> gts = {protocol_gt("a", {{0, 10}}, 30, 'A'),
                                              protocol_gt("b", {{0, 10}}, 30, 'A')};
    const std::vector<zz::PredictionRecord> preds = {{"a", 'A', zz::normalize({{0, 4.5}})},
                                                     {"b", 'A', zz::normalize({{0, 0.5}})}};
    const zz::MetricReport report = zz::evaluate(preds, gts);
    c.expect(close(report.rec_at_iou, 0.4, tol),
             "threshold-averaged recall " + fmt(report.rec_at_iou) + ", want 0.4");
  }
  {
    // One correct item at IoU 0.45 passes four of five thresholds -> 0.8.
    const std::vector<zz::GroundTruth> gts = {protocol_gt("a", {{0, 10}}, 30, 'A')};
    const std::vector<zz::PredictionRecord> preds = {{"a", 'A', zz::normalize({{0, 4.5}})}};
    const zz::MetricReport report = zz::evaluate(preds, gts);
    c.expect(close(report.acc_at_iou, 0.8, tol),
             "threshold-averaged accuracy " + fmt(report.acc_at_iou) + ", want 0.8");
    c.expect(close(report.acc, 1.0, tol), "plain accuracy should be 1");
  }

  // Structural bounds on random collections: recall monotone in the
  // threshold, conjunction metrics never exceed their parts.
  zz::Rng rng(zz::split_seed(777));
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    std::vector<zz::GroundTruth> gts;
    std::vector<zz::PredictionRecord> preds;
    for (int i = 0; i < n; ++i) {
      const std::string id = "i" + std::to_string(i);
      const double s = 0.25 * static_cast<double>(rng.uniform_int(0, 60));
      const double len = 0.25 * static_cast<double>(rng.uniform_int(1, 20));
      gts.push_back(protocol_gt(id, {{s, std::min(s + len, 20.0)}}, 20.0, 'A'));
      if (rng.next_double() < 0.1) continue;  // missing prediction
      std::vector<std::pair<double, double>> spans;
      const int k = static_cast<int>(rng.uniform_int(1, 2));
      for (int j = 0; j < k; ++j) {
        const double ps = 0.25 * static_cast<double>(rng.uniform_int(0, 60));
        const double pl = 0.25 * static_cast<double>(rng.uniform_int(1, 20));
        spans.emplace_back(ps, std::min(ps + pl, 20.0));
      }
      const char letter = static_cast<char>('A' + rng.uniform_int(0, 3));
      preds.push_back({id, letter, zz::normalize(spans)});
    }
    const zz::MetricReport report = zz::evaluate(preds, gts);
    c.expect(report.recall_at.at(0.3) >= report.recall_at.at(0.5) - 1e-15,
             "trial " + std::to_string(trial) + ": recall must not rise with the threshold");
    c.expect(report.acc_at_iou <= report.rec_at_iou + tol,
             "trial " + std::to_string(trial) + ": accuracy@IoU must not exceed recall@IoU");
    c.expect(report.acc_gqa <= report.acc + tol,
             "trial " + std::to_string(trial) + ": grounded accuracy must not exceed accuracy");
    for (double v : {report.miou, report.miog, report.miop, report.acc, report.acc_gqa,
                     report.rec_at_iou, report.acc_at_iou}) {
      c.expect(v >= -tol && v <= 1.0 + tol,
               "trial " + std::to_string(trial) + ": metric out of [0,1]: " + fmt(v));
    }
  }
  c.note("five fixtures exact; bounds hold on 1000 random collections");
  return c;
}

// ---------------------------------------------------------------------------
// 8. Group-spread data filter.

Check check_filter_rule() {
  Check c;
  const double tol = 1e-12;

  const double delta = zz::filter_delta({0.0, 0.5, 0.4, 0.8, 0.2});
  c.expect(close(delta, 0.42, tol), "spread of the worked group = " + fmt(delta) + ", want 0.42");
  c.expect(zz::filter_delta({0.25, 0.25, 0.25}) == 0.0, "constant groups must have zero spread");
  c.expect(close(zz::filter_delta({0.37, 0.37, 0.37}), 0.0, tol),
           "constant groups must have ~zero spread");

  zz::FilterRecord boundary{"b", {0.2, 0.0}, {true, false}};
  c.expect(zz::decide(boundary).kept, "spread exactly at the threshold must be kept");
  zz::FilterRecord below{"c", {0.1998, 0.0}, {true, false}};
  c.expect(!zz::decide(below).kept, "spread 0.0999 must be dropped");

  zz::Rng rng(zz::split_seed(88));
  for (int trial = 0; trial < 300 && c.ok; ++trial) {
    const int g = static_cast<int>(rng.uniform_int(2, 8));
    zz::FilterRecord record;
    record.id = "t" + std::to_string(trial);
    for (int i = 0; i < g; ++i) {
      record.ious.push_back(rng.uniform(0.0, 1.0));
      record.correct.push_back(true);
    }
    const zz::FilterDecision d = zz::decide(record);
    c.expect(d.all_correct, "trial " + std::to_string(trial) + ": all-correct flag missing");
    c.expect(!d.kept, "trial " + std::to_string(trial) +
                          ": an all-correct group must be dropped regardless of spread " +
                          fmt(d.delta));
  }
  c.note("spread exact, boundary kept/dropped, 300 all-correct groups dropped");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Long-video window partition and top-k aggregation.

zz::IntervalSet oracle_top_spans(std::vector<zz::WindowResult> results, int k) {
  std::stable_sort(results.begin(), results.end(),
                   [](const zz::WindowResult& a, const zz::WindowResult& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     return a.window.start < b.window.start;
                   });
  zz::IntervalSet out;
  const size_t take = std::min(static_cast<size_t>(k), results.size());
  for (size_t i = 0; i < take; ++i) out = zz::set_union(out, results[i].predicted_spans);
  return out;
}

Check check_window_schedule() {
  Check c;
  c.expect(zz::kDefaultWindowFrames == 256, "default window must be 256 frames");
  c.expect(zz::kDefaultTopK == 4, "default aggregation must keep the top 4 windows");

  const zz::BudgetConfig cfg{};
  zz::Rng rng(zz::split_seed(2024));
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const double duration = rng.uniform(1.0, 5000.0);
    const std::vector<zz::TimeInterval> windows = zz::divide_windows(duration, 256, cfg);
    c.expect(!windows.empty(), "a positive duration must produce windows");
    if (!c.ok) break;
    c.expect(windows.front().start == 0.0, "first window must start at 0");
    c.expect(windows.back().end == duration, "last window must end at the duration");
    const double width = 256.0 / cfg.sample_fps;
    for (size_t i = 0; i < windows.size(); ++i) {
      const bool tail = i + 1 == windows.size();
      if (!tail) {
        c.expect(windows[i].end - windows[i].start == width,
                 "non-tail window " + std::to_string(i) + " must span exactly " + fmt(width));
        c.expect(windows[i].end == windows[i + 1].start,
                 "windows " + std::to_string(i) + " and " + std::to_string(i + 1) +
                     " must abut exactly");
      } else {
        c.expect(windows[i].end - windows[i].start <= width + 1e-9,
                 "tail window must not exceed the window width");
      }
      if (!c.ok) break;
    }
  }

  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    std::vector<zz::WindowResult> results;
    for (int i = 0; i < n; ++i) {
      zz::WindowResult wr;
      wr.window = {256.0 * i, 256.0 * (i + 1)};
      const double s = 0.25 * static_cast<double>(rng.uniform_int(0, 8000));
      const double len = 0.25 * static_cast<double>(rng.uniform_int(1, 400));
      wr.predicted_spans = zz::normalize({{s, s + len}});
      wr.answer = 'A';
      wr.confidence = 0.25 * static_cast<double>(rng.uniform_int(0, 4));  // coarse: forces ties
      results.push_back(wr);
    }
    const int k = static_cast<int>(rng.uniform_int(1, n));
    c.expect(zz::aggregate_top_spans(results, k) == oracle_top_spans(results, k),
             "trial " + std::to_string(trial) + ": top-" + std::to_string(k) +
                 " union differs from the sort-based oracle");
    c.expect(zz::aggregate_top_spans(results, n + 3) == oracle_top_spans(results, n + 3),
             "trial " + std::to_string(trial) + ": k beyond the window count must take all");
  }

  {
    // Deterministic tie: equal confidence resolves to the earlier window.
    std::vector<zz::WindowResult> tie(2);
    tie[0].window = {256.0, 512.0};
    tie[0].predicted_spans = zz::normalize({{300.0, 310.0}});
    tie[0].confidence = 0.7;
    tie[1].window = {0.0, 256.0};
    tie[1].predicted_spans = zz::normalize({{10.0, 20.0}});
    tie[1].confidence = 0.7;
    c.expect(zz::aggregate_top_spans(tie, 1) == zz::normalize({{10.0, 20.0}}),
             "confidence tie must resolve to the earlier window");
  }
  c.note("1000 partitions, 500 aggregation trials vs sort oracle, ties resolved by start");
  return c;
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* name;
  Check (*run)();
  double limit_s;  // 0 = no explicit limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"advantage-normalization-golden-table", check_advantage_golden_table, 1.0},
      {"budget-split-planner-integers", check_budget_planner, 0.0},
      {"interval-ratios-vs-raster-oracle", check_interval_raster_equivalence, 30.0},
      {"policy-gradient-finite-difference-fidelity", check_gradient_fidelity, 60.0},
      {"zoom-reward-semantics-on-sim-episodes", check_zoom_semantics, 0.0},
      {"token-routed-credit-training-trend", check_training_trend, 600.0},
      {"metric-protocol-fixtures-and-bounds", check_metric_protocol, 0.0},
      {"group-spread-data-filter", check_filter_rule, 0.0},
      {"window-partition-and-topk-aggregation", check_window_schedule, 0.0},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("unhandled exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (result.ok && criterion.limit_s > 0.0 && elapsed >= criterion.limit_s) {
      result.ok = false;
      result.detail = "exceeded the " + fmt(criterion.limit_s) + " s budget";
    }
    std::printf("[%s] %-45s %7.2fs  %s\n", result.ok ? "PASS" : "FAIL", criterion.name, elapsed,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu checks failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu checks passed\n", criteria.size());
  return 0;
}
