#include "rgr/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <thread>

#include "json.hpp"

namespace rgr {

namespace {

// Stream tags keep the per-purpose substreams of one master seed apart.
enum StreamTag : uint64_t { kRollout = 1, kShuffle = 2, kValidation = 3 };

double scored_reward(const TaskInstance& inst, const Rollout& r,
                     const std::optional<JudgmentVector>& judgments, const TrainerConfig& cfg,
                     const Vocab& vocab) {
  double base;
  if (cfg.reward_mode == RewardMode::Rubric) {
    base = final_reward(inst.rubric, *judgments);
  } else {
    base = static_cast<double>(outcome_reward(inst, r.tokens, vocab));
  }
  bool apply = cfg.lambda > 0.0 &&
               (r.origin == RolloutOrigin::OnPolicy || cfg.refine_length_penalty);
  if (!apply) return base;
  return apply_length_penalty(base, r.length(), cfg.lambda, cfg.l_star,
                              cfg.length_penalty_unclamped);
}

}  // namespace

std::pair<EaDecision, int> exploration_assessment(std::span<const Rollout> judged) {
  if (judged.empty()) throw Error("exploration assessment needs at least one judged rollout");
  int best = 0;
  bool any_perfect = false;
  for (size_t i = 0; i < judged.size(); ++i) {
    if (!judged[i].judgments) throw Error("exploration assessment needs judgments on every rollout");
    if (judged[i].reward > judged[best].reward) best = static_cast<int>(i);
    if (judged[i].judgments->all_satisfied()) any_perfect = true;
  }
  return {any_perfect ? EaDecision::OnPolicySufficient : EaDecision::RefinementNeeded, best};
}

Group build_group(const PolicyParams& params, const TaskInstance& instance,
                  const TrainerConfig& cfg, Judge& judge, const Vocab& vocab, int step,
                  int group_index, GroupBranch branch) {
  const int g = cfg.group_size;
  if (g < 2) throw ConfigError("group_size must be >= 2");
  const bool need_judgments =
      cfg.reward_mode == RewardMode::Rubric || cfg.n_refine > 0 || branch != GroupBranch::Auto;
  PromptContext plain = render_prompt(instance);

  Group group;
  group.question_id = instance.id;

  auto sample_member = [&](int member, const PromptContext& ctx, RolloutOrigin origin) {
    RngStream rng = RngStream::derive(cfg.seed, kRollout, static_cast<uint64_t>(step),
                                      static_cast<uint64_t>(group_index),
                                      static_cast<uint64_t>(member));
    Rollout r = sample_sequence(params, ctx, cfg.max_response_len, cfg.train_temp, rng, vocab);
    r.origin = origin;
    if (need_judgments) {
      try {
        r.judgments = judge_rollout(judge, instance, r.tokens);
      } catch (const JudgeError& e) {
        // Fail closed with context: which question and which criterion.
        throw JudgeError(e.kind, e.criterion_index,
                         "judging failed for " + instance.id + ": " + e.what());
      }
    }
    r.reward = scored_reward(instance, r, r.judgments, cfg, vocab);
    return r;
  };

  for (int i = 0; i < g - 1; ++i) {
    group.rollouts.push_back(sample_member(i, plain, RolloutOrigin::OnPolicy));
  }

  EaDecision decision = EaDecision::OnPolicySufficient;
  int best = 0;
  if (need_judgments) {
    std::tie(decision, best) = exploration_assessment(group.rollouts);
  } else {
    for (size_t i = 1; i < group.rollouts.size(); ++i) {
      if (group.rollouts[i].reward > group.rollouts[static_cast<size_t>(best)].reward)
        best = static_cast<int>(i);
    }
  }
  group.best_index = best;

  bool refine_now;
  switch (branch) {
    case GroupBranch::ForceOnPolicy: refine_now = false; break;
    case GroupBranch::ForceRefine: refine_now = true; break;
    case GroupBranch::Auto:
    default: refine_now = cfg.n_refine > 0 && decision == EaDecision::RefinementNeeded; break;
  }

  if (refine_now) {
    const Rollout& o_best = group.rollouts[static_cast<size_t>(best)];
    std::vector<int> failed = failed_indices(instance.rubric, *o_best.judgments);
    PromptContext refine_ctx = build_refinement_prompt(instance.question, o_best, failed, vocab,
                                                       /*allow_empty=*/branch == GroupBranch::ForceRefine);
    group.rollouts.push_back(sample_member(g - 1, refine_ctx, RolloutOrigin::Refined));
    group.refined_index = g - 1;
    group.ea_decision = EaDecision::RefinementNeeded;
  } else {
    group.rollouts.push_back(sample_member(g - 1, plain, RolloutOrigin::OnPolicy));
    group.ea_decision = EaDecision::OnPolicySufficient;
  }

  group.rewards.reserve(static_cast<size_t>(g));
  for (const Rollout& r : group.rollouts) group.rewards.push_back(r.reward);
  group.advantages = group_advantages(group.rewards, cfg.advantage);
  validate_group(group);
  return group;
}

namespace {

struct QuestionResult {
  Group group;
  ObjectiveResult objective;

  QuestionResult(int f, int v) : objective(f, v) {}
};

QuestionResult process_question(const TrainerState& state, const TaskInstance& inst,
                                const TrainerConfig& cfg, Judge& judge, const Vocab& vocab,
                                int step, int group_index) {
  QuestionResult qr(state.params.feature_slots, state.params.vocab_size);
  qr.group = build_group(state.params, inst, cfg, judge, vocab, step, group_index);
  const PolicyParams* ref = state.ref_params ? &*state.ref_params : nullptr;
  qr.objective = group_objective(qr.group, state.params, cfg.train_temp, cfg.surrogate,
                                 cfg.advantage, vocab, ref);
  return qr;
}

}  // namespace

TrainingMetrics train_step(TrainerState& state, std::span<const TaskInstance> batch,
                           const TrainerConfig& cfg, Judge& judge, const Vocab& vocab) {
  if (batch.empty()) throw TrainerError("train_step needs a non-empty batch");
  const int b = static_cast<int>(batch.size());
  const int step = state.step + 1;

  std::vector<std::unique_ptr<QuestionResult>> results(static_cast<size_t>(b));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(b));

  auto run_question = [&](int q) {
    try {
      results[static_cast<size_t>(q)] = std::make_unique<QuestionResult>(
          process_question(state, batch[static_cast<size_t>(q)], cfg, judge, vocab, step, q));
    } catch (...) {
      errors[static_cast<size_t>(q)] = std::current_exception();
    }
  };

  if (cfg.workers <= 1) {
    for (int q = 0; q < b; ++q) run_question(q);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        int q = next.fetch_add(1);
        if (q >= b) return;
        run_question(q);
      }
    };
    int nthreads = std::min(cfg.workers, b);
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);  // fail closed, lowest question first

  // Deterministic ordered reduction: question order, then sorted slots.
  GradAccum grad(state.params.feature_slots, state.params.vocab_size);
  TrainingMetrics m;
  m.step = step;
  double shaped_sum = 0.0;
  int shaped_groups = 0;
  for (int q = 0; q < b; ++q) {
    const QuestionResult& qr = *results[static_cast<size_t>(q)];
    grad.merge(qr.objective.grad);
    for (double r : qr.group.rewards) m.mean_reward += r;
    double lo = *std::min_element(qr.group.rewards.begin(), qr.group.rewards.end());
    double hi = *std::max_element(qr.group.rewards.begin(), qr.group.rewards.end());
    if (lo == hi) m.zero_adv_frac += 1.0;
    m.entropy += qr.objective.entropy;
    m.mean_on_ratio += qr.objective.mean_ratio;
    if (qr.group.ea_decision == EaDecision::RefinementNeeded) {
      m.offpolicy_ratio += 1.0;
      shaped_sum += qr.objective.mean_shaped_weight;
      ++shaped_groups;
    }
  }
  grad.scale(1.0 / static_cast<double>(b));
  m.mean_reward /= static_cast<double>(b * cfg.group_size);
  m.zero_adv_frac /= static_cast<double>(b);
  m.entropy /= static_cast<double>(b);
  m.mean_on_ratio /= static_cast<double>(b);
  m.offpolicy_ratio /= static_cast<double>(b);
  m.mean_shaped_weight = shaped_groups ? shaped_sum / static_cast<double>(shaped_groups) : 0.0;
  m.grad_norm = grad.l2_norm();

  if (!grad.all_finite() || !std::isfinite(m.grad_norm)) {
    throw TrainerError("non-finite gradient at step " + std::to_string(step) +
                       " (grad_norm=" + std::to_string(m.grad_norm) + ")");
  }

  grad.axpy_into(state.params, cfg.learning_rate);  // the step's single write
  state.step = step;
  return m;
}

double validation_pass1(const PolicyParams& params, std::span<const TaskInstance> val,
                        const TrainerConfig& cfg, const Vocab& vocab) {
  if (val.empty()) throw ConfigError("validation set is empty");
  long correct = 0;
  for (size_t i = 0; i < val.size(); ++i) {
    const TaskInstance& inst = val[i];
    PromptContext prompt = render_prompt(inst);
    std::vector<TokenId> tokens;
    if (cfg.val_temp <= 0.0) {
      tokens = greedy_sequence(params, prompt, cfg.max_response_len, vocab);
    } else {
      RngStream rng = RngStream::derive(cfg.seed, kValidation, i);
      tokens = sample_sequence(params, prompt, cfg.max_response_len, cfg.val_temp, rng, vocab)
                   .tokens;
    }
    correct += outcome_reward(inst, tokens, vocab);
  }
  return static_cast<double>(correct) / static_cast<double>(val.size());
}

std::string metrics_to_json_line(const TrainingMetrics& m) {
  nlohmann::json j;
  j["step"] = m.step;
  j["mean_reward"] = m.mean_reward;
  j["zero_adv_frac"] = m.zero_adv_frac;
  j["entropy"] = m.entropy;
  j["offpolicy_ratio"] = m.offpolicy_ratio;
  j["mean_on_ratio"] = m.mean_on_ratio;
  j["mean_shaped_weight"] = m.mean_shaped_weight;
  j["grad_norm"] = m.grad_norm;
  if (m.val_pass1) j["val_pass1"] = *m.val_pass1;
  return j.dump();
}

namespace {

// Deterministic infinite batch sequence: epoch e uses the Fisher-Yates
// permutation seeded by (master, kShuffle, e); batches read it sequentially
// and roll into the next epoch's permutation. Stateless in the step index, so
// resumed runs see identical batches.
std::vector<const TaskInstance*> batch_for_step(std::span<const TaskInstance> train,
                                                const TrainerConfig& cfg, int step) {
  const long n = static_cast<long>(train.size());
  std::vector<const TaskInstance*> batch;
  long pos = static_cast<long>(step - 1) * cfg.batch_size;
  long epoch = pos / n;
  long offset = pos % n;
  std::vector<int> perm;
  auto load_epoch = [&](long e) {
    perm.resize(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = static_cast<int>(i);
    RngStream rng = RngStream::derive(cfg.seed, kShuffle, static_cast<uint64_t>(e));
    rng.shuffle(perm);
  };
  load_epoch(epoch);
  for (int i = 0; i < cfg.batch_size; ++i) {
    if (offset == n) {
      ++epoch;
      offset = 0;
      load_epoch(epoch);
    }
    batch.push_back(&train[static_cast<size_t>(perm[static_cast<size_t>(offset)])]);
    ++offset;
  }
  return batch;
}

std::string checkpoint_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step-%05d.ckpt", step);
  return buf;
}

}  // namespace

RunResult run_training(const TrainerConfig& cfg, std::span<const TaskInstance> train,
                       std::span<const TaskInstance> val, Judge& judge, const Vocab& vocab,
                       const RunSinks& sinks) {
  if (train.empty()) throw ConfigError("training set is empty");
  if (cfg.n_refine < 0 || cfg.n_refine > 1) throw ConfigError("n_refine must be 0 or 1");
  if (cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");

  TrainerState state;
  state.master_seed = cfg.seed;
  state.params = make_params(cfg.feature_slots, cfg.context_order, vocab.size());
  if (cfg.surrogate.kl_beta > 0.0) {
    state.ref_params = make_params(cfg.feature_slots, cfg.context_order, vocab.size());
  }

  std::optional<std::ofstream> metrics_out;
  RunResult result{.log = {}, .final_params = PolicyParams{}};

  int start_step = 0;
  if (sinks.out_dir) {
    std::filesystem::create_directories(*sinks.out_dir);
    if (sinks.resume) {
      int latest = -1;
      for (const auto& entry : std::filesystem::directory_iterator(*sinks.out_dir)) {
        const std::string name = entry.path().filename().string();
        int s;
        if (std::sscanf(name.c_str(), "step-%d.ckpt", &s) == 1) latest = std::max(latest, s);
      }
      if (latest >= 0) {
        Checkpoint ck = load_checkpoint(*sinks.out_dir / checkpoint_name(latest));
        if (ck.params.feature_slots != cfg.feature_slots ||
            ck.params.context_order != cfg.context_order) {
          throw ConfigError("checkpoint dimensions do not match the config");
        }
        state.params = std::move(ck.params);
        start_step = latest;
      }
    }
    metrics_out.emplace(*sinks.out_dir / "metrics.ldjson",
                        start_step > 0 ? std::ios::app : std::ios::trunc);
  }
  state.step = start_step;

  auto emit = [&](const TrainingMetrics& m) {
    result.log.push_back(m);
    if (metrics_out) *metrics_out << metrics_to_json_line(m) << '\n' << std::flush;
    if (sinks.on_step) sinks.on_step(m);
  };
  auto checkpoint = [&](int step) {
    if (sinks.out_dir && sinks.save_checkpoints) {
      save_checkpoint(*sinks.out_dir / checkpoint_name(step), state.params, vocab);
    }
  };

  if (start_step == 0) {
    TrainingMetrics m0;
    m0.step = 0;
    if (!val.empty()) m0.val_pass1 = validation_pass1(state.params, val, cfg, vocab);
    emit(m0);
    checkpoint(0);
  }

  for (int step = start_step + 1; step <= cfg.steps; ++step) {
    auto batch_ptrs = batch_for_step(train, cfg, step);
    std::vector<TaskInstance> batch;
    batch.reserve(batch_ptrs.size());
    for (const TaskInstance* p : batch_ptrs) batch.push_back(*p);
    TrainingMetrics m = train_step(state, batch, cfg, judge, vocab);
    bool eval_now = (step % cfg.eval_every == 0) || step == cfg.steps;
    if (eval_now && !val.empty()) {
      m.val_pass1 = validation_pass1(state.params, val, cfg, vocab);
    }
    emit(m);
    if (eval_now) checkpoint(step);
  }

  result.final_params = std::move(state.params);
  return result;
}

}  // namespace rgr
