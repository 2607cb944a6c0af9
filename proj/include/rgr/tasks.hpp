#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgr/rng.hpp"
#include "rgr/rollout.hpp"
#include "rgr/rubric.hpp"
#include "rgr/vocab.hpp"

namespace rgr {

/// Machine-checkable side data attached to each generated criterion so the
/// deterministic judge can score it without a model.
struct CriterionPayload {
  enum class Check {
    FinalAnswerEquals,              // answer slot == value
    IntermediateAppearsBeforeAnswer // value token occurs before the answer marker
  };
  Check check = Check::FinalAnswerEquals;
  int value = 0;     // in the task's value ring
  int position = -1; // 1-based step index for intermediates, -1 otherwise
};

/// One verifiable arithmetic-chain question: evaluate
///   a_1 op_1 a_2 op_2 ... op_{d-1} a_d   (mod M)
/// left to right. The reference solution emits each running value
/// r_1 = a_1, r_i = r_{i-1} op a_i, separated by ";", then "#ANS <final> #END".
///
/// The generated rubric carries one Process criterion per running value, a
/// Factual sub-answer criterion for the trailing intermediates of chains with
/// d >= 3 (capped so |C| <= 10), and one Factual final-answer criterion, so
/// full credit requires the derivation, not just a lucky final token.
struct TaskInstance {
  std::string id;
  int difficulty = 0;  // chain length d
  int modulus = 0;
  std::vector<TokenId> question;            // operands/operators + "="
  int ground_truth = 0;                     // final value
  std::vector<int> intermediates;           // r_1 .. r_{d-1}
  std::vector<TokenId> reference_solution;
  Rubric rubric;
  std::vector<CriterionPayload> payloads;   // aligned with rubric.criteria
};

/// Rubric shaping knobs. Defaults match the shipped task sets; alternates are
/// exposed for reward-design studies via gen-tasks flags.
struct RubricOptions {
  /// Which intermediates also get a Factual sub-answer criterion (d >= 3
  /// only; the count is capped so |C| <= 10).
  enum class SubAnswers { None, LastOnly, Trailing };
  SubAnswers sub_answers = SubAnswers::Trailing;
  int sub_weight = 4;       // 1..5
  int process_weight_cap = 3;  // process weights ramp 1..cap with position
};

/// Deterministic given the stream. Requires 2 <= d <= 10 (so criterion-index
/// tokens and the 10-item rubric cap always suffice) and prime M <= 23.
TaskInstance generate_instance(RngStream& stream, int difficulty, int modulus,
                               const Vocab& vocab, const RubricOptions& rubric_opts = {});

/// Plain conditioning context: the question tokens verbatim.
PromptContext render_prompt(const TaskInstance& instance);

/// Operand/operator list recovered from a rendered question.
struct ParsedQuestion {
  std::vector<int> operands;
  std::vector<char> ops;  // '+', '-', '*'
};
ParsedQuestion parse_question(std::span<const TokenId> question, const Vocab& vocab);

/// Value token immediately after the LAST answer marker, or nullopt. The last
/// marker wins so self-corrected responses score on their final attempt.
std::optional<int> extract_final_answer(std::span<const TokenId> response, const Vocab& vocab);

// ---- task set files: line-delimited JSON, one instance per line ----

void save_task_set(const std::filesystem::path& path, std::span<const TaskInstance> instances,
                   const Vocab& vocab);
std::vector<TaskInstance> load_task_set(const std::filesystem::path& path, const Vocab& vocab);

/// Reads the modulus off the file and builds the matching vocab; all
/// instances must share one modulus.
std::pair<Vocab, std::vector<TaskInstance>> load_task_set_with_vocab(
    const std::filesystem::path& path);

std::string task_to_json_line(const TaskInstance& instance, const Vocab& vocab);
TaskInstance task_from_json_line(const std::string& line, const Vocab& vocab);

}  // namespace rgr
