#include "rgr/grpo.hpp"

#include <cmath>

namespace rgr {

RuntimeWarnings& runtime_warnings() {
  static RuntimeWarnings w;
  return w;
}

void validate_group(const Group& group) {
  if (group.size() < 2) throw Error("group needs at least 2 rollouts");
  if (group.rewards.size() != group.rollouts.size() ||
      group.advantages.size() != group.rollouts.size()) {
    throw Error("group rewards/advantages not aligned with rollouts");
  }
  int refined = 0;
  for (const Rollout& r : group.rollouts)
    if (r.origin == RolloutOrigin::Refined) ++refined;
  bool needs = group.ea_decision == EaDecision::RefinementNeeded;
  if (refined != (needs ? 1 : 0)) {
    throw Error("refined-member count does not match the exploration-assessment decision");
  }
  if (group.refined_index.has_value() != needs) {
    throw Error("refined_index must be set exactly when refinement was needed");
  }
  if (needs &&
      group.rollouts[static_cast<size_t>(*group.refined_index)].origin != RolloutOrigin::Refined) {
    throw Error("refined_index does not point at the refined rollout");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards,
                                     const AdvantageConfig& cfg) {
  if (rewards.size() < 2) throw Error("advantage computation needs at least 2 rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  std::vector<double> adv(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) adv[i] = rewards[i] - mean;
  if (cfg.use_std_normalization) {
    double var = 0.0;
    for (double a : adv) var += a * a;
    double std = std::sqrt(var / n);  // population std: normalization within a fixed group
    if (std > cfg.std_epsilon) {
      for (double& a : adv) a /= std;
    } else {
      for (double& a : adv) a = 0.0;
    }
  }
  return adv;
}

double importance_ratio(double new_logp, double old_logp) {
  if (!std::isfinite(new_logp) || !std::isfinite(old_logp)) {
    throw Error("importance ratio needs finite log-probabilities");
  }
  double d = new_logp - old_logp;
  if (d > 30.0 || d < -30.0) {
    runtime_warnings().ratio_clamps.fetch_add(1, std::memory_order_relaxed);
    d = d > 30.0 ? 30.0 : -30.0;
  }
  return std::exp(d);
}

double clip_ratio(double ratio, std::optional<double> eps) {
  if (!eps) return ratio;
  if (*eps <= 0.0) throw Error("clip epsilon must be positive");
  return std::min(std::max(ratio, 1.0 - *eps), 1.0 + *eps);
}

double shape_ratio(double p, double gamma) {
  if (p < 0.0 || p > 1.0) throw Error("shape_ratio expects a probability");
  if (gamma <= 0.0 || gamma >= 1.0) throw Error("shaping gamma must be in (0, 1)");
  return p / (p + gamma);
}

double shaped_gradient_coefficient(double p, double gamma) {
  if (p < 0.0 || p > 1.0) throw Error("shaped coefficient expects a probability");
  if (gamma <= 0.0 || gamma >= 1.0) throw Error("shaping gamma must be in (0, 1)");
  double q = p + gamma;
  return gamma * p / (q * q);
}

namespace {

struct TokenStats {
  double ratio_sum = 0.0;
  long ratio_count = 0;
  double shaped_sum = 0.0;
  long shaped_count = 0;
};

// Adds one on-policy member's surrogate terms: objective contribution and the
// per-token gradient coefficients against grad log pi.
double on_policy_member_terms(const PolicyParams& params, const Rollout& r, double advantage,
                              double weight, double tau, const SurrogateConfig& scfg,
                              GradAccum& grad, TokenStats& stats) {
  std::vector<double> new_logp = sequence_logprob(params, r.prompt, r.tokens, tau);
  std::vector<double> coef(r.tokens.size(), 0.0);
  double obj = 0.0;
  for (size_t t = 0; t < r.tokens.size(); ++t) {
    double ratio = importance_ratio(new_logp[t], r.old_logp[t]);
    stats.ratio_sum += ratio;
    stats.ratio_count += 1;
    double plain = ratio * advantage;
    if (scfg.clip_epsilon) {
      double clipped = clip_ratio(ratio, scfg.clip_epsilon) * advantage;
      if (plain <= clipped) {
        obj += weight * plain;
        coef[t] = weight * advantage * ratio;
      } else {
        obj += weight * clipped;
        bool interior = ratio >= 1.0 - *scfg.clip_epsilon && ratio <= 1.0 + *scfg.clip_epsilon;
        coef[t] = interior ? weight * advantage * ratio : 0.0;
      }
    } else {
      obj += weight * plain;
      coef[t] = weight * advantage * ratio;
    }
  }
  logprob_gradient(params, r.prompt, r.tokens, tau, coef, grad);
  return obj;
}

void append_windows(const PolicyParams& params, const Rollout& r, const PromptContext& ctx,
                    const Vocab& vocab, std::vector<std::vector<TokenId>>& windows) {
  auto w = sampling_windows(params, ctx.tokens, r.tokens, vocab.begin);
  windows.insert(windows.end(), w.begin(), w.end());
}

void add_entropy_and_kl(const Group& group, const PolicyParams& params, double tau,
                        const SurrogateConfig& scfg, const Vocab& vocab,
                        const PolicyParams* ref_params, const PromptContext* plain_for_refined,
                        ObjectiveResult& out) {
  std::vector<std::vector<TokenId>> windows;
  for (const Rollout& r : group.rollouts) {
    if (r.origin == RolloutOrigin::OnPolicy) {
      append_windows(params, r, r.prompt, vocab, windows);
    } else if (scfg.entropy_on_refined && plain_for_refined) {
      // Refined members enter under the plain context, matching how the
      // objective scores them.
      append_windows(params, r, *plain_for_refined, vocab, windows);
    }
  }
  if (scfg.entropy_coef != 0.0 && !windows.empty()) {
    out.entropy = mean_entropy(params, windows, tau, &out.grad, scfg.entropy_coef);
    out.objective += scfg.entropy_coef * out.entropy;
  } else if (!windows.empty()) {
    out.entropy = mean_entropy(params, windows, tau);
  }
  if (scfg.kl_beta > 0.0) {
    if (!ref_params) throw Error("kl_beta > 0 requires reference params");
    KlResult kl = kl_penalty_gradient(params, *ref_params, group.rollouts, scfg.kl_beta, tau, vocab);
    out.kl = kl.kl;
    out.objective -= scfg.kl_beta * kl.kl;
    kl.grad.scale(-1.0);
    out.grad.merge(kl.grad);
  }
}

}  // namespace

ObjectiveResult on_policy_gradient(const Group& group, const PolicyParams& params, double tau,
                                   const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                   const Vocab& vocab, const PolicyParams* ref_params) {
  validate_group(group);
  for (const Rollout& r : group.rollouts) {
    if (r.origin != RolloutOrigin::OnPolicy) {
      throw Error("on_policy_gradient expects an all-on-policy group");
    }
  }
  ObjectiveResult out(params.feature_slots, params.vocab_size);
  TokenStats stats;
  const double inv_g = 1.0 / static_cast<double>(group.size());
  double surrogate = 0.0;
  for (int i = 0; i < group.size(); ++i) {
    const Rollout& r = group.rollouts[static_cast<size_t>(i)];
    if (r.tokens.empty()) continue;
    double w = inv_g * (acfg.use_token_mean ? 1.0 / static_cast<double>(r.tokens.size()) : 1.0);
    surrogate += on_policy_member_terms(params, r, group.advantages[static_cast<size_t>(i)], w,
                                        tau, scfg, out.grad, stats);
  }
  out.objective = surrogate;
  out.mean_ratio = stats.ratio_count ? stats.ratio_sum / static_cast<double>(stats.ratio_count) : 0.0;
  add_entropy_and_kl(group, params, tau, scfg, vocab, ref_params, nullptr, out);
  return out;
}

ObjectiveResult mix_policy_gradient(const Group& group, const PolicyParams& params, double tau,
                                    const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                    const Vocab& vocab, const PolicyParams* ref_params) {
  validate_group(group);
  if (group.ea_decision != EaDecision::RefinementNeeded || !group.refined_index) {
    throw Error("mix_policy_gradient expects a group with exactly one refined member");
  }
  const int refined = *group.refined_index;

  // The plain context the refined member is scored under comes from the
  // on-policy members, which all share the question's rendered prompt.
  const PromptContext* plain = nullptr;
  for (const Rollout& r : group.rollouts) {
    if (r.origin == RolloutOrigin::OnPolicy) {
      if (r.prompt.origin != PromptContext::Origin::Plain) {
        throw Error("on-policy members must carry the plain question context");
      }
      plain = &r.prompt;
      break;
    }
  }
  if (!plain) throw Error("mix group has no on-policy member");

  ObjectiveResult out(params.feature_slots, params.vocab_size);
  TokenStats stats;
  const double inv_g = 1.0 / static_cast<double>(group.size());
  double surrogate = 0.0;
  for (int i = 0; i < group.size(); ++i) {
    const Rollout& r = group.rollouts[static_cast<size_t>(i)];
    if (r.tokens.empty()) continue;
    double w = inv_g * (acfg.use_token_mean ? 1.0 / static_cast<double>(r.tokens.size()) : 1.0);
    double adv = group.advantages[static_cast<size_t>(i)];
    if (i != refined) {
      surrogate += on_policy_member_terms(params, r, adv, w, tau, scfg, out.grad, stats);
      continue;
    }
    std::vector<double> logp = sequence_logprob(params, *plain, r.tokens, tau);
    std::vector<double> coef(r.tokens.size(), 0.0);
    for (size_t t = 0; t < r.tokens.size(); ++t) {
      double p = std::exp(logp[t]);
      double f = shape_ratio(p, scfg.shaping_gamma);
      stats.shaped_sum += f;
      stats.shaped_count += 1;
      surrogate += w * f * adv;
      coef[t] = w * adv * shaped_gradient_coefficient(p, scfg.shaping_gamma);
    }
    logprob_gradient(params, *plain, r.tokens, tau, coef, out.grad);
  }
  out.objective = surrogate;
  out.mean_ratio = stats.ratio_count ? stats.ratio_sum / static_cast<double>(stats.ratio_count) : 0.0;
  out.mean_shaped_weight =
      stats.shaped_count ? stats.shaped_sum / static_cast<double>(stats.shaped_count) : 0.0;
  add_entropy_and_kl(group, params, tau, scfg, vocab, ref_params, plain, out);
  return out;
}

ObjectiveResult group_objective(const Group& group, const PolicyParams& params, double tau,
                                const SurrogateConfig& scfg, const AdvantageConfig& acfg,
                                const Vocab& vocab, const PolicyParams* ref_params) {
  if (group.ea_decision == EaDecision::RefinementNeeded) {
    return mix_policy_gradient(group, params, tau, scfg, acfg, vocab, ref_params);
  }
  return on_policy_gradient(group, params, tau, scfg, acfg, vocab, ref_params);
}

KlResult kl_penalty_gradient(const PolicyParams& params, const PolicyParams& ref_params,
                             std::span<const Rollout> rollouts, double beta, double tau,
                             const Vocab& vocab) {
  if (beta < 0.0) throw Error("beta must be nonnegative");
  KlResult out(params.feature_slots, params.vocab_size);
  if (rollouts.empty()) return out;

  std::vector<std::vector<TokenId>> windows;
  for (const Rollout& r : rollouts) {
    auto w = sampling_windows(params, r.prompt.tokens, r.tokens, vocab.begin);
    windows.insert(windows.end(), w.begin(), w.end());
  }
  if (windows.empty()) return out;
  const int V = params.vocab_size;
  const double n = static_cast<double>(windows.size());
  std::vector<double> g(static_cast<size_t>(V));
  for (const auto& w : windows) {
    std::vector<int> slots = context_slots(params, w, vocab.begin);
    std::vector<double> p = token_distribution(params, slots, tau);
    std::vector<double> q = token_distribution(ref_params, slots, tau);
    double kl = 0.0;
    for (int v = 0; v < V; ++v) {
      double pv = p[static_cast<size_t>(v)];
      if (pv > 0.0) kl += pv * (std::log(pv) - std::log(q[static_cast<size_t>(v)]));
    }
    out.kl += kl / n;
    if (beta > 0.0) {
      // dKL/dz_v = p_v * ((log p_v - log q_v) - KL) / tau
      for (int v = 0; v < V; ++v) {
        double pv = p[static_cast<size_t>(v)];
        g[static_cast<size_t>(v)] =
            pv > 0.0 ? pv * ((std::log(pv) - std::log(q[static_cast<size_t>(v)])) - kl) / tau : 0.0;
      }
      for (int s : slots) out.grad.add_row(s, beta / n, g);
    }
  }
  return out;
}

}  // namespace rgr
