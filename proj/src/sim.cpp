#include "zz/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "zz/errors.hpp"

namespace zz {
namespace {

double round_decis(double x) { return std::round(x * 10.0) / 10.0; }

std::string two_digit(int value) { return std::to_string(value); }

std::string format_decis(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", x);
  return buf;
}

const std::vector<std::string>& category_pool() {
  static const std::vector<std::string> pool = {"chart",  "badge", "sign",  "screen",
                                                "poster", "meter", "label", "gauge"};
  return pool;
}

char cyclic_wrong_answer(const std::map<char, std::string>& options, char correct) {
  std::vector<char> letters;
  for (const auto& [letter, _] : options) letters.push_back(letter);
  for (size_t i = 0; i < letters.size(); ++i) {
    if (letters[i] == correct) return letters[(i + 1) % letters.size()];
  }
  return letters.front();
}

}  // namespace

SyntheticEpisode generate_episode(uint64_t seed, std::pair<double, double> duration_range,
                                  int n_events, const BudgetConfig& budget, double fine_fps) {
  if (n_events < 1 || static_cast<size_t>(n_events) > category_pool().size()) {
    throw DomainError("event count out of range");
  }
  if (!(duration_range.first > 0.0) || duration_range.second < duration_range.first) {
    throw DomainError("bad duration range");
  }
  Rng rng(split_seed(seed));
  SyntheticEpisode ep;
  ep.id = "ep-" + std::to_string(seed);
  ep.duration = round_decis(rng.uniform(duration_range.first, duration_range.second));

  // Non-overlapping events with a 1 s margin, placed by rejection.
  const double margin = 1.0;
  std::vector<TimeInterval> placed;
  for (int i = 0; i < n_events; ++i) {
    const double len = std::max(0.1, round_decis(rng.uniform(0.08, 0.2) * ep.duration));
    if (len >= ep.duration) throw DomainError("events cannot fit the duration");
    bool ok = false;
    for (int attempt = 0; attempt < 500 && !ok; ++attempt) {
      const double start = round_decis(rng.uniform(0.0, ep.duration - len));
      const TimeInterval cand{start, start + len};
      ok = true;
      for (const auto& p : placed) {
        const bool before = cand.end + margin <= p.start + kTimeEps;
        const bool after = p.end + margin <= cand.start + kTimeEps;
        if (!before && !after) {
          ok = false;
          break;
        }
      }
      if (ok) placed.push_back(cand);
    }
    if (!ok) throw DomainError("could not pack events without overlap");
  }

  std::vector<std::string> categories = category_pool();
  rng.shuffle(categories);
  std::vector<int> details;
  while (details.size() < static_cast<size_t>(n_events)) {
    const int v = static_cast<int>(rng.uniform_int(int64_t{10}, int64_t{99}));
    if (std::find(details.begin(), details.end(), v) == details.end()) details.push_back(v);
  }
  for (int i = 0; i < n_events; ++i) {
    ep.events.push_back({placed[i], categories[i], two_digit(details[i])});
  }

  ep.target_index = static_cast<size_t>(rng.uniform_int(0, n_events - 1));
  const SimEvent& target = ep.events[ep.target_index];
  ep.question = "What value appears on the " + target.category + "?";
  ep.gt_spans = normalize({{target.span.start, target.span.end}});

  // Four options: the true detail plus distractors.
  std::vector<std::string> option_texts{target.detail};
  for (size_t i = 0; i < ep.events.size() && option_texts.size() < 4; ++i) {
    if (i != ep.target_index) option_texts.push_back(ep.events[i].detail);
  }
  while (option_texts.size() < 4) {
    const std::string v = two_digit(static_cast<int>(rng.uniform_int(10, 99)));
    if (std::find(option_texts.begin(), option_texts.end(), v) == option_texts.end()) {
      option_texts.push_back(v);
    }
  }
  rng.shuffle(option_texts);
  const char letters[4] = {'A', 'B', 'C', 'D'};
  for (size_t i = 0; i < 4; ++i) {
    ep.options[letters[i]] = option_texts[i];
    if (option_texts[i] == target.detail) ep.answer = letters[i];
  }

  // A resolution the coarse pass cannot reach but an exact zoom can.
  const int coarse = coarse_plan(ep.duration, budget).tokens_per_frame;
  const int fine = fine_plan(ep.gt_spans, budget, fine_fps).tokens_per_frame;
  if (coarse + 1 > fine) throw DomainError("budget leaves no coarse/fine resolution gap");
  ep.detail_threshold = static_cast<int>(rng.uniform_int(coarse + 1, fine));
  return ep;
}

GroundTruth to_ground_truth(const SyntheticEpisode& episode) {
  GroundTruth gt;
  gt.id = episode.id;
  gt.question = episode.question;
  gt.options = episode.options;
  gt.answer = episode.answer;
  gt.gt_spans = episode.gt_spans;
  gt.duration = episode.duration;
  return gt;
}

void ScriptedClient::add_episode(const SyntheticEpisode& episode) {
  episodes_[episode.id] = episode;
}

ClientResponse ScriptedClient::query(const ClientRequest& request) {
  auto found = episodes_.find(request.video_ref);
  if (found == episodes_.end()) {
    throw ClientError(ClientError::Kind::Protocol, "unknown video_ref " + request.video_ref);
  }
  const SyntheticEpisode& ep = found->second;
  ClientResponse reply;
  reply.id = request.id;
  if (cfg_.mode == ClientMode::Adversarial) {
    reply.text = "cannot comply";
    return reply;
  }

  const IntervalSet spans = clamp(normalize(request.frame_spec.spans_s), 0.0, ep.duration);
  const TimeInterval& target = ep.events[ep.target_index].span;
  bool visible = false;
  if (!spans.empty() && spans.measure() > 0.0) {
    const long long n = frames_for_measure(spans.measure(), request.frame_spec.fps);
    for (double t : place_frames(spans, n)) {
      if (target.contains(t)) {
        visible = true;
        break;
      }
    }
  }
  const bool detail_ok = request.frame_spec.tokens_per_frame >= ep.detail_threshold;
  bool correct = visible && detail_ok;
  if (cfg_.mode == ClientMode::Noisy) {
    Rng noise(split_seed(cfg_.noise_seed ^ std::hash<std::string>{}(request.id) ^
                         (request.template_kind == "fine" ? 0x9e37u : 0u)));
    if (noise.next_double() < 0.1) correct = !correct;
  }

  IntervalSet respond_spans =
      visible ? intersect(spans, normalize({{target.start, target.end}})) : spans;
  TimeInterval mark{0.0, 0.0};
  if (!respond_spans.empty()) mark = respond_spans.intervals().front();
  std::ostringstream think;
  think << "Looked at frames near <time>(" << mark.start << ", " << mark.end << ")</time>.";
  const char answer = correct ? ep.answer : cyclic_wrong_answer(ep.options, ep.answer);
  reply.text = render_response(think.str(), answer, respond_spans);
  const double confidence = correct ? 0.9 : (visible ? 0.55 : 0.25);
  reply.answer_token_logprob = std::log(confidence);
  return reply;
}

std::vector<std::string> sim_tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '<') {
      const size_t close = text.find('>', pos);
      if (close != std::string::npos) {
        tokens.push_back(text.substr(pos, close - pos + 1));
        pos = close + 1;
        continue;
      }
    }
    size_t next = text.find('<', pos);
    if (next == std::string::npos) next = text.size();
    tokens.push_back(text.substr(pos, next - pos));
    pos = next;
  }
  return tokens;
}

RolloutGroup scripted_rollout_group(const SyntheticEpisode& episode, size_t g, RolloutMode mode,
                                    uint64_t seed) {
  if (g < 2) throw DomainError("group statistics need at least two rollouts");
  const TimeInterval& target = episode.events[episode.target_index].span;
  const double len = target.length();
  const double dur = episode.duration;

  const auto variant_spans = [&](size_t variant) -> IntervalSet {
    switch (variant) {
      case 0:  // exact
        return normalize({{target.start, target.end}});
      case 1: {  // shifted by half the length: IoU 1/3 against the target
        if (target.end + len / 2 <= dur + kTimeEps) {
          return normalize({{target.start + len / 2, target.end + len / 2}});
        }
        return normalize({{target.start - len / 2, target.end - len / 2}});
      }
      case 2:  // superset: pad 20% each side
        return normalize(
            {{std::max(0.0, target.start - 0.2 * len), std::min(dur, target.end + 0.2 * len)}});
      case 3:  // empty
        return {};
      default: {  // disjoint
        if (target.end + 1.0 + len <= dur + kTimeEps) {
          return normalize({{target.end + 1.0, target.end + 1.0 + len}});
        }
        if (target.start - 1.0 - len >= -kTimeEps) {
          return normalize({{target.start - 1.0 - len, target.start - 1.0}});
        }
        return {};
      }
    }
  };

  RolloutGroup group;
  group.prompt_id = episode.id;
  for (size_t i = 0; i < g; ++i) {
    const size_t variant = mode == RolloutMode::Oracle ? 0 : i % 5;
    const bool correct = mode == RolloutMode::Oracle || variant % 2 == 0;
    const char answer =
        correct ? episode.answer : cyclic_wrong_answer(episode.options, episode.answer);
    const IntervalSet spans = variant_spans(variant);
    std::ostringstream think;
    const TimeInterval mark = spans.empty() ? target : spans.intervals().front();
    think << "The " << episode.events[episode.target_index].category
          << " appears around <time>(" << mark.start << ", " << mark.end << ")</time>.";
    std::string text = render_response(think.str(), answer, spans);
    if (mode == RolloutMode::Adversarial && i == seed % g) {
      text = text.substr(0, text.find("</glue>"));  // drop the closing tag
    }
    group.rollouts.push_back({text, sim_tokenize(text)});
  }
  return group;
}

ToyTask::ToyTask(std::vector<SyntheticEpisode> episodes, double fine_fps, BudgetConfig budget,
                 double explore_letter, double explore_span)
    : episodes_(std::move(episodes)),
      explore_letter_(explore_letter),
      explore_span_(explore_span) {
  if (episodes_.empty()) throw DomainError("task needs at least one episode");
  for (double eps : {explore_letter_, explore_span_}) {
    if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("exploration rate must lie in [0, 1)");
  }
  planner_ = {budget, fine_fps};
  for (const SyntheticEpisode& episode : episodes_) {
    if (episode.options.size() != 4) throw DomainError("task expects four options");
    if (episode.duration != episodes_.front().duration) {
      throw DomainError("pooled episodes must share one timeline");
    }
    gts_.push_back(to_ground_truth(episode));
    client_.add_episode(episode);
  }

  symbol_texts_ = {"<think>", "</think>", "<answer>", "</answer>", "<glue>", "</glue>",
                   "scan",    " [(",      ", ",       ")] "};
  for (char letter : {'A', 'B', 'C', 'D'}) {
    letter_ids_.push_back(symbol_texts_.size());
    symbol_texts_.emplace_back(1, letter);
  }
  for (size_t j = 0; j <= kTimeBins; ++j) {
    time_ids_.push_back(symbol_texts_.size());
    symbol_texts_.push_back(
        format_decis(episodes_.front().duration * static_cast<double>(j) / kTimeBins));
  }
  // <think>scan</think><answer>L</answer><glue> [(t1, t2)] </glue>
  template_ids_ = {0, 6, 1, 2, 0, 3, 4, 7, 0, 8, 0, 9, 5};
}

ToyTask::ToyTask(SyntheticEpisode episode, double fine_fps, BudgetConfig budget,
                 double explore_letter, double explore_span)
    : ToyTask(std::vector<SyntheticEpisode>{std::move(episode)}, fine_fps, budget, explore_letter,
              explore_span) {}

size_t ToyTask::vocab_size() const { return symbol_texts_.size(); }

std::vector<size_t> ToyTask::sample_rollout(const ToyPolicy& policy, Rng& rng,
                                            size_t prompt) const {
  if (prompt >= episodes_.size()) throw DomainError("prompt index out of range");
  std::vector<size_t> tokens = template_ids_;
  struct Slot {
    size_t pos;
    const std::vector<size_t>* allowed;
    double eps;
  };
  const Slot slots[] = {{4, &letter_ids_, explore_letter_},
                        {8, &time_ids_, explore_span_},
                        {10, &time_ids_, explore_span_}};
  for (const auto& [pos, allowed, eps] : slots) {
    // Exploration mixture. Both branches consume one draw after the coin,
    // so the stream layout does not depend on the parameters.
    const bool explore = rng.next_double() < eps;
    if (explore) {
      tokens[pos] = (*allowed)[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(allowed->size()) - 1))];
    } else {
      tokens[pos] = policy.sample_constrained(policy.context_at(tokens, pos), *allowed, rng);
    }
  }
  return tokens;
}

std::vector<std::string> ToyTask::render_tokens(const std::vector<size_t>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (size_t id : tokens) {
    if (id >= symbol_texts_.size()) throw DomainError("token id outside vocab");
    out.push_back(symbol_texts_[id]);
  }
  return out;
}

std::string ToyTask::render_text(const std::vector<size_t>& tokens) const {
  std::string text;
  for (const auto& piece : render_tokens(tokens)) text += piece;
  return text;
}

std::vector<RewardVector> ToyTask::score(const std::vector<std::vector<size_t>>& group,
                                         size_t prompt) {
  if (prompt >= episodes_.size()) throw DomainError("prompt index out of range");
  RolloutGroup rollouts;
  rollouts.prompt_id = episodes_[prompt].id;
  for (const auto& tokens : group) {
    rollouts.rollouts.push_back({render_text(tokens), render_tokens(tokens)});
  }
  return score_group(rollouts, gts_[prompt], client_, planner_);
}

TokenSpanMap ToyTask::glue_mask(const std::vector<size_t>& tokens) const {
  auto mask = glue_token_mask(render_text(tokens), render_tokens(tokens));
  if (!mask.ok()) throw DomainError("template rendered an inconsistent token stream");
  return mask.value();
}

SyntheticEpisode default_train_episode() {
  return generate_episode(411, {100.0, 100.0}, 3);
}

ToyTask default_train_task(double fine_fps, BudgetConfig budget) {
  SyntheticEpisode first = default_train_episode();
  // Same timeline and target span, but the options are rotated one letter,
  // so no single answer token is correct for both prompts.
  SyntheticEpisode second = first;
  second.id += "-alt";
  for (const auto& [letter, text] : first.options) {
    const char shifted = static_cast<char>('A' + (letter - 'A' + 1) % 4);
    second.options[shifted] = text;
  }
  second.answer = static_cast<char>('A' + (first.answer - 'A' + 1) % 4);
  return ToyTask({std::move(first), std::move(second)}, fine_fps, budget);
}

}  // namespace zz
