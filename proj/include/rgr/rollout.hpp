#pragma once

#include <optional>
#include <vector>

#include "rgr/rubric.hpp"
#include "rgr/vocab.hpp"

namespace rgr {

/// Conditioning sequence a rollout was sampled under. Plain contexts hold the
/// rendered question; Refine contexts append the refinement marker, one
/// criterion-index token per failed criterion (rubric order), and the body of
/// the response being refined.
struct PromptContext {
  enum class Origin { Plain, Refine };
  std::vector<TokenId> tokens;
  Origin origin = Origin::Plain;
};

enum class RolloutOrigin { OnPolicy, Refined };

/// One sampled response plus everything the update needs later: the per-token
/// log-probabilities recorded at sampling time (ratios always use these stored
/// values, never a re-score), the judgments, and the final reward.
struct Rollout {
  PromptContext prompt;
  std::vector<TokenId> tokens;
  std::vector<double> old_logp;  // aligned with tokens, every entry <= 0
  RolloutOrigin origin = RolloutOrigin::OnPolicy;
  bool truncated = false;  // hit max length without emitting the end marker
  double reward = 0.0;
  std::optional<JudgmentVector> judgments;

  int length() const { return static_cast<int>(tokens.size()); }

  /// Response tokens without a trailing end marker; what refinement prompts
  /// embed.
  std::vector<TokenId> body(const Vocab& vocab) const {
    std::vector<TokenId> b = tokens;
    if (!b.empty() && b.back() == vocab.end) b.pop_back();
    return b;
  }
};

}  // namespace rgr
