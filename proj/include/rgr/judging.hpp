#pragma once

#include <span>
#include <string>

#include "rgr/rubric.hpp"
#include "rgr/tasks.hpp"
#include "rgr/vocab.hpp"

namespace rgr {

/// Per-criterion verdict provider. Implementations throw JudgeError on
/// unrecoverable failures; the training step fails closed rather than
/// substituting zeros, since silent zeros bias rewards.
class Judge {
 public:
  virtual ~Judge() = default;

  /// 0/1 verdict for rubric criterion `criterion_index` of `instance`.
  virtual int judge_criterion(const TaskInstance& instance, std::span<const TokenId> response,
                              int criterion_index) = 0;

  virtual std::string name() const = 0;

  /// Upper bound on concurrent per-criterion calls judge_rollout may issue.
  virtual int max_parallelism() const { return 1; }
};

/// One bit per criterion, each from exactly one per-criterion call. Criteria
/// are judged independently; there is no multi-criterion batching.
JudgmentVector judge_rollout(Judge& judge, const TaskInstance& instance,
                             std::span<const TokenId> response);

/// Rule judge scoring the machine-checkable payloads generated with each task:
///  - FinalAnswerEquals: the answer slot (token after the last answer marker)
///    equals the expected value; shares the extraction rule with
///    outcome_reward, so an outcome-correct response always has this bit set.
///  - IntermediateAppearsBeforeAnswer: the value token appears before the last
///    answer marker. Responses without a marker earn no intermediate credit:
///    shown work only counts on an actual answer attempt.
class DeterministicJudge : public Judge {
 public:
  explicit DeterministicJudge(const Vocab& vocab) : vocab_(vocab) {}

  int judge_criterion(const TaskInstance& instance, std::span<const TokenId> response,
                      int criterion_index) override;
  std::string name() const override { return "deterministic"; }

 private:
  const Vocab& vocab_;
};

/// 1 iff the extracted final answer equals the ground truth; unparseable
/// responses score 0.
int outcome_reward(const TaskInstance& instance, std::span<const TokenId> response,
                   const Vocab& vocab);

}  // namespace rgr
