#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgr/policy.hpp"
#include "rgr/rollout.hpp"

namespace rgr {

struct AdvantageConfig {
  bool use_std_normalization = false;  // Eq-literal scaling, off by default
  bool use_token_mean = false;         // 1/|o_i| term, off by default
  double std_epsilon = 1e-8;
};

struct SurrogateConfig {
  std::optional<double> clip_epsilon;  // none = no clipping
  double kl_beta = 0.0;
  double shaping_gamma = 0.1;          // in (0, 1)
  double entropy_coef = 0.01;
  bool entropy_on_refined = false;     // include refined-member contexts in the bonus
};

enum class EaDecision { OnPolicySufficient, RefinementNeeded };

/// The G rollouts for one question, with pooled advantages. Exactly one member
/// has origin Refined iff ea_decision is RefinementNeeded; best_index is the
/// argmax reward among the initially judged on-policy members.
struct Group {
  std::string question_id;
  std::vector<Rollout> rollouts;
  std::vector<double> rewards;
  std::vector<double> advantages;
  int best_index = -1;
  EaDecision ea_decision = EaDecision::OnPolicySufficient;
  std::optional<int> refined_index;

  int size() const { return static_cast<int>(rollouts.size()); }
};

/// Throws on structural violations (size >= 2, refined-member accounting).
void validate_group(const Group& group);

/// Mean-centered rewards; optionally divided by the population standard
/// deviation. Degenerate groups (std below epsilon) get all-zero advantages.
std::vector<double> group_advantages(std::span<const double> rewards,
                                     const AdvantageConfig& cfg);

/// exp(new_logp - old_logp), exponent clamped to +-30 with a counted warning.
double importance_ratio(double new_logp, double old_logp);

/// min(max(ratio, 1-eps), 1+eps); identity when eps is absent.
double clip_ratio(double ratio, std::optional<double> eps);

/// f(p) = p / (p + gamma): the bounded weight replacing the importance ratio
/// on refined tokens. Strictly increasing, range [0, 1).
double shape_ratio(double p, double gamma);

/// Multiplier against grad log pi for a shaped token: f'(p) * p
/// = gamma * p / (p + gamma)^2. Peaks at p = gamma and never exceeds 1/4.
double shaped_gradient_coefficient(double p, double gamma);

struct ObjectiveResult {
  double objective = 0.0;   // scalar the gradient differentiates
  GradAccum grad;
  double mean_ratio = 0.0;         // mean importance ratio over on-policy tokens
  double mean_shaped_weight = 0.0; // mean f(p) over refined tokens (0 if none)
  double entropy = 0.0;            // mean sampling-context entropy
  double kl = 0.0;                 // mean context KL vs ref (0 when beta = 0)

  ObjectiveResult(int feature_slots, int vocab_size) : grad(feature_slots, vocab_size) {}
};

/// Surrogate over an all-on-policy group:
///   (1/G) sum_i w_i sum_t CLIP-or-plain(ratio_t) * A_i
///   + entropy_coef * H  -  beta * KL,
/// with w_i = 1/|o_i| under use_token_mean. Ratios use the stored sampling
/// log-probs; at params = old params they are exactly 1 and the gradient
/// reduces to group-relative REINFORCE.
ObjectiveResult on_policy_gradient(const Group& group, const PolicyParams& params, double tau,
                                   const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                   const Vocab& vocab,
                                   const PolicyParams* ref_params = nullptr);

/// Mixed surrogate: on-policy members contribute ratio terms as above; the one
/// refined member contributes sum_t f(p_t) * A_G, where p_t is the CURRENT
/// policy's probability of its tokens under the PLAIN question context (the
/// refined trajectory is scored as though the policy had produced it
/// unprompted, which is what the update teaches it to do).
ObjectiveResult mix_policy_gradient(const Group& group, const PolicyParams& params, double tau,
                                    const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                    const Vocab& vocab,
                                    const PolicyParams* ref_params = nullptr);

/// Dispatches to mix_policy_gradient when the group holds a refined member,
/// otherwise on_policy_gradient.
ObjectiveResult group_objective(const Group& group, const PolicyParams& params, double tau,
                                const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                const Vocab& vocab, const PolicyParams* ref_params = nullptr);

struct KlResult {
  double kl = 0.0;  // mean exact categorical KL over the contexts
  GradAccum grad;   // gradient of beta * KL (empty when beta = 0)

  KlResult(int feature_slots, int vocab_size) : grad(feature_slots, vocab_size) {}
};

/// Exact per-context categorical KL(pi_theta || pi_ref), averaged over the
/// sampling contexts of the given rollouts.
KlResult kl_penalty_gradient(const PolicyParams& params, const PolicyParams& ref_params,
                             std::span<const Rollout> rollouts, double beta, double tau,
                             const Vocab& vocab);

/// Process-wide warning counters (ratio clamps etc.), resettable in tests.
struct RuntimeWarnings {
  std::atomic<long> ratio_clamps{0};
  void reset() { ratio_clamps = 0; }
};
RuntimeWarnings& runtime_warnings();

}  // namespace rgr
