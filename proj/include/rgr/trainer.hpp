#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgr/grpo.hpp"
#include "rgr/judging.hpp"
#include "rgr/policy.hpp"
#include "rgr/tasks.hpp"

namespace rgr {

enum class RewardMode { Rubric, Outcome };

struct TrainerConfig {
  int steps = 400;
  int batch_size = 8;       // questions per step (desk scale)
  int group_size = 8;       // G rollouts per question
  int n_refine = 1;         // 0 disables the refinement branch entirely
  double learning_rate = 0.05;
  RewardMode reward_mode = RewardMode::Rubric;

  // Length penalty r <- r - lambda * max(0, L - l_star).
  double lambda = 0.002;
  int l_star = 24;
  bool length_penalty_unclamped = false;
  bool refine_length_penalty = true;  // penalty applies uniformly to refined rollouts

  AdvantageConfig advantage;
  SurrogateConfig surrogate;

  uint64_t seed = 1;
  int eval_every = 40;
  double train_temp = 1.0;
  double val_temp = 0.0;  // 0 = greedy decoding
  int max_response_len = 64;
  int feature_slots = 1 << 18;
  int context_order = 10;
  int workers = 1;
};

struct TrainingMetrics {
  int step = 0;
  double mean_reward = 0.0;
  double zero_adv_frac = 0.0;   // groups whose rewards were all equal
  double entropy = 0.0;         // mean sampling-context entropy
  double offpolicy_ratio = 0.0; // fraction of questions that took the refinement branch
  double mean_on_ratio = 0.0;
  double mean_shaped_weight = 0.0;
  double grad_norm = 0.0;
  std::optional<double> val_pass1;
};

std::string metrics_to_json_line(const TrainingMetrics& m);

/// Live policy plus the frozen initial policy for the optional KL term. The
/// old-policy snapshot is implicit: params are never written between the
/// step-start sampling and the single step-end update, and every ratio uses
/// the log-probs stored at sampling time.
struct TrainerState {
  PolicyParams params;
  std::optional<PolicyParams> ref_params;  // materialized only when kl_beta > 0
  int step = 0;
  uint64_t master_seed = 0;
};

/// Step 1 gate. best_index is the argmax reward (ties -> lowest index);
/// refinement is needed exactly when no judged rollout satisfies every
/// criterion. All rollouts must carry judgments.
std::pair<EaDecision, int> exploration_assessment(std::span<const Rollout> judged);

/// How the last group member is chosen. Auto follows n_refine plus the
/// exploration-assessment gate; the forced modes exist for the variance probe,
/// which compares the gated estimator against always-on/always-off baselines.
/// ForceRefine refines even when nothing failed (empty criterion-token list).
enum class GroupBranch { Auto, ForceOnPolicy, ForceRefine };

/// Samples, judges and scores the G rollouts for one question: G-1 on-policy
/// members, then either a final on-policy member (gate satisfied or
/// n_refine = 0) or a refined member sampled under the refinement context.
/// Advantages are pooled over all G members.
Group build_group(const PolicyParams& params, const TaskInstance& instance,
                  const TrainerConfig& cfg, Judge& judge, const Vocab& vocab, int step,
                  int group_index, GroupBranch branch = GroupBranch::Auto);

TrainingMetrics train_step(TrainerState& state, std::span<const TaskInstance> batch,
                           const TrainerConfig& cfg, Judge& judge, const Vocab& vocab);

double validation_pass1(const PolicyParams& params, std::span<const TaskInstance> val,
                        const TrainerConfig& cfg, const Vocab& vocab);

struct RunResult {
  std::vector<TrainingMetrics> log;
  PolicyParams final_params;
};

struct RunSinks {
  std::optional<std::filesystem::path> out_dir;  // metrics.ldjson + checkpoints
  bool resume = false;
  bool save_checkpoints = true;  // metrics-only runs skip the (large) dumps
  std::function<void(const TrainingMetrics&)> on_step;  // optional progress hook
};

/// Full training schedule: shuffled batches, periodic greedy validation and
/// checkpointing, line-delimited metrics log. Resumes from the latest
/// checkpoint in out_dir when asked; stream derivation is stateless in the
/// step index, so a resumed run reproduces an uninterrupted one bit-for-bit.
RunResult run_training(const TrainerConfig& cfg, std::span<const TaskInstance> train,
                       std::span<const TaskInstance> val, Judge& judge, const Vocab& vocab,
                       const RunSinks& sinks = {});

}  // namespace rgr
