#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgr/errors.hpp"

namespace rgr {

enum class CriterionKind { Factual, Process };

inline constexpr const char* kFactualPrefix = "Factual Criteria:";
inline constexpr const char* kProcessPrefix = "Process Criteria:";

/// One weighted binary check. The serialized description always starts with
/// the exact prefix matching `kind`.
struct Criterion {
  CriterionKind kind;
  std::string description;
  int weight = 1;  // integer, 1..5
};

struct Rubric {
  std::string question_id;
  std::vector<Criterion> criteria;
  // Set by the parser for hand-written rubrics with fewer than 3 items;
  // generated rubrics always carry 3..10.
  bool below_generated_minimum = false;

  int size() const { return static_cast<int>(criteria.size()); }
};

/// Binary verdicts aligned index-for-index with Rubric::criteria.
struct JudgmentVector {
  std::vector<uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  bool all_satisfied() const {
    for (uint8_t b : bits)
      if (!b) return false;
    return !bits.empty();
  }
};

struct RewardBreakdown {
  double aggregate = 0.0;          // weighted score, in [0, 1]
  bool factual_all_pass = false;   // whether the full-credit branch applied
  double pre_penalty_reward = 0.0; // reward before the length penalty
  int length_tokens = 0;
  double penalty = 0.0;            // >= 0
  double final = 0.0;              // pre_penalty_reward - penalty
};

/// Throws Error on structural violations (weight range, prefix/kind mismatch,
/// empty description, nonpositive weight sum).
void validate_rubric(const Rubric& rubric);

/// Parses the interchange form: a JSON array of objects with exactly the keys
/// `description` and `weight`. Kind is inferred from the description prefix.
Rubric parse_rubric(const std::string& json_text);

/// Canonical serialization: compact JSON, order and descriptions preserved
/// byte-for-byte. parse_rubric(serialize_rubric(r)) reproduces r.
std::string serialize_rubric(const Rubric& rubric);

/// Weighted fraction of satisfied criteria: sum(w_k * s_k) / sum(w_k).
double aggregate_score(const Rubric& rubric, const JudgmentVector& judgments);

/// Full credit when every Factual criterion passes, regardless of Process
/// bits; otherwise the aggregate score. Rubrics with no Factual criteria fall
/// back to the aggregate (a constant 1 would carry no signal).
double final_reward(const Rubric& rubric, const JudgmentVector& judgments);

/// reward - lambda * max(0, length - target). The clamp keeps short responses
/// from being paid for brevity; `unclamped` restores the literal linear form.
double apply_length_penalty(double reward, int length_tokens, double lambda, int target_tokens,
                            bool unclamped = false);

/// Criteria with s_k = 0, original order preserved.
std::vector<Criterion> failed_criteria(const Rubric& rubric, const JudgmentVector& judgments);

/// Indices of criteria with s_k = 0, ascending.
std::vector<int> failed_indices(const Rubric& rubric, const JudgmentVector& judgments);

RewardBreakdown reward_breakdown(const Rubric& rubric, const JudgmentVector& judgments,
                                 int length_tokens, double lambda, int target_tokens,
                                 bool unclamped = false);

}  // namespace rgr
