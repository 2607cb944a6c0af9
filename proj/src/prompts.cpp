#include "rgr/prompts.hpp"

namespace rgr {

const char* const kRubricJudgeSystemPrompt =
    "You are an expert evaluator. Given a user prompt, a generated response, and a single "
    "quality criterion, please judge whether the response satisfies the criterion (1) or does "
    "not satisfy the criterion (0).\n"
    "Do not consider any other quality aspects outside the provided criterion. Your evaluation "
    "must be strictly limited to whether the response meets the specified criterion.\n"
    "Start your response with a valid JSON object that starts with \"```json\" and ends with "
    "\"```\". The JSON object should contain a single key \"rating\" and the value should be "
    "either 1 (criterion satisfied) or 0 (criterion not satisfied).\n"
    "\n"
    "Example response:\n"
    "```json\n"
    "{\n"
    "  \"rating\": 1\n"
    "}```\n";

const char* const kRubricJudgeUserTemplate =
    "Given the following prompt, response, and evaluation criterion, please judge whether the "
    "response satisfies the specified criterion (1) or does not satisfy it (0). Ignore all "
    "other factors outside the criterion.\n"
    "\n"
    "<prompt>\n"
    "{prompt}\n"
    "</prompt>\n"
    "\n"
    "<response>\n"
    "{response}\n"
    "</response>\n"
    "\n"
    "<criterion>\n"
    "{single_rubric_criterion}\n"
    "</criterion>\n"
    "\n"
    "Your JSON Evaluation:";

const char* const kLikertJudgeSystemPrompt =
    "You are an expert evaluator. Given a user prompt, a reference response, and a generated "
    "response, please rate the overall quality of the generated response on a scale of 1 to 10 "
    "based on how well it compares to the reference response.\n"
    "Consider factors such as accuracy, completeness, coherence, and helpfulness when comparing "
    "to the reference. The reference response represents a high-quality answer that you should "
    "use as a benchmark.\n"
    "Start your response with a valid JSON object that starts with \"```json\" and ends with "
    "\"```\". The JSON object should contain a single key \"rating\" and the value should be an "
    "integer between 1 and 10.\n"
    "\n"
    "Example response:\n"
    "```json\n"
    "{\n"
    "  \"rating\": 7\n"
    "}```\n";

const char* const kLikertJudgeUserTemplate =
    "Given the following prompt, reference response, and generated response, please rate the "
    "overall quality of the generated response on a scale of 1 to 10 based on how well it "
    "compares to the reference.\n"
    "\n"
    "<prompt>\n"
    "{prompt}\n"
    "</prompt>\n"
    "\n"
    "<reference_response>\n"
    "{reference}\n"
    "</reference_response>\n"
    "\n"
    "<generated_response>\n"
    "{response}\n"
    "</generated_response>\n"
    "\n"
    "Your JSON Evaluation:";

const char* const kRefinementSystemPrompt = "You are a helpful assistant.";

const char* const kRefinementUserTemplate =
    "Given the following inputs:\n"
    "\n"
    "Question:\n"
    "{base_text}\n"
    "Previous Response:\n"
    "{selected_response}\n"
    "Rubrics:\n"
    "{rubrics}\n"
    "Instruction:\n"
    "\n"
    "Refine the Previous response so it fully satisfies all items in Rubrics.\n"
    "Provide clear, concise, step-by-step reasoning that leads to the correct result.\n"
    "Put your final answer within \\boxed{}.\n"
    "\n"
    "Refined Response:";

const char* const kRubricGeneratorSystemPrompt =
    "You are an expert rubric writer for a wide range of academic disciplines (e.g., Physics, "
    "Chemistry, Mathematics). Your job is to generate a self-contained set of evaluation "
    "criteria (\"rubrics\") for judging how good a response is to a given question in one of "
    "these disciplines. Rubrics may cover aspects such as factual correctness, "
    "reasoning/process, completeness, and computational accuracy. Each rubric item must be "
    "fully self-contained so that a non-expert reader can easily and unambiguously decide "
    "whether the criterion is satisfied.\n"
    "\n"
    "Inputs:\n"
    "- question: The full question text.\n"
    "- reference_answer: The ideal (model) answer, including any key facts, explanations and "
    "reasoning steps.\n"
    "- groundtruth: The correct final fact(s) or result(s) for the question.\n"
    "\n"
    "High-level Rules:\n"
    "- Total items: Generate between 3 and 10 rubric items, choosing the number appropriate to "
    "the complexity of the question and prioritizing the most important evaluation aspects for "
    "the discipline and task.\n"
    "- Categories: Use exactly two category types and these exact prefix strings at the start "
    "of every description:\n"
    "  - Factual Criteria: for verifiable final facts or answers.\n"
    "  - Process Criteria: for key intermediate steps, calculations, theorems, or reasoning "
    "required to derive the final answer.\n"
    "- When to generate each category:\n"
    "  - Factual Criteria: Generate only when the question has one or more determinable, "
    "verifiable final facts or answers. If the question has multiple independent final facts "
    "or parts, generate a separate Factual Criterion for each. The response is factually "
    "correct only if all Factual Criteria are satisfied.\n"
    "  - Process Criteria: Generate for the necessary intermediate results, explicit "
    "sub-answers, key equations, definitions, or theorems that must be invoked. Each Process "
    "Criterion must be concrete and testable (e.g., \"States that the derivative of sin(x) is "
    "cos(x)\" or \"Shows substitution u = x^2 in the integral\"). Avoid vague wording such as "
    "\"uses proper reasoning.\"\n"
    "\n"
    "Item Format Rules:\n"
    "- Each rubric item must be an object with exactly two keys: description, weight.\n"
    "- description: One sentence beginning with the category prefix, followed by a clear, "
    "testable statement.\n"
    "- weight: Integer from 1 to 5 (5 = most important).\n"
    "- Description examples:\n"
    "  - Factual Criteria: States the correct final value of the integral as pi/2.\n"
    "  - Factual Criteria: Identifies mitochondria as the site of ATP production in eukaryotic "
    "cells.\n"
    "  - Process Criteria: Shows the substitution u = x^2 and adjusts the limits accordingly "
    "before integrating.\n"
    "  - Process Criteria: Applies Newton's second law F = ma to set up the differential "
    "equation for motion.\n"
    "\n"
    "Additional Requirements:\n"
    "- All rubric items must be easy to evaluate as satisfied or not satisfied.\n"
    "- Avoid vague criteria like \"demonstrates understanding\" or \"explains clearly.\"\n"
    "- Output only the JSON array of rubric objects, each with keys description and weight.\n"
    "- The description must begin with one of the two exact prefixes above.\n"
    "- Each rubric item must evaluate a distinct, non-overlapping aspect of the answer. No "
    "duplication across items.";

const char* const kRubricGeneratorUserPrompt =
    "Now, given the question, reference answer, and groundtruth, generate the rubric as "
    "described.\n"
    "The reference answer is an ideal response but may not be fully correct or exhaustive; use "
    "it only as a guide.";

std::string substitute_placeholder(std::string text, const std::string& name,
                                   const std::string& value) {
  const std::string needle = "{" + name + "}";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

std::string build_rubric_judge_user_prompt(const std::string& prompt, const std::string& response,
                                           const std::string& criterion) {
  std::string s = kRubricJudgeUserTemplate;
  s = substitute_placeholder(std::move(s), "prompt", prompt);
  s = substitute_placeholder(std::move(s), "response", response);
  s = substitute_placeholder(std::move(s), "single_rubric_criterion", criterion);
  return s;
}

std::string build_likert_judge_user_prompt(const std::string& prompt, const std::string& reference,
                                           const std::string& response) {
  std::string s = kLikertJudgeUserTemplate;
  s = substitute_placeholder(std::move(s), "prompt", prompt);
  s = substitute_placeholder(std::move(s), "reference", reference);
  s = substitute_placeholder(std::move(s), "response", response);
  return s;
}

std::string build_refinement_user_prompt(const std::string& question,
                                         const std::string& previous_response,
                                         const std::string& rubrics) {
  std::string s = kRefinementUserTemplate;
  s = substitute_placeholder(std::move(s), "base_text", question);
  s = substitute_placeholder(std::move(s), "selected_response", previous_response);
  s = substitute_placeholder(std::move(s), "rubrics", rubrics);
  return s;
}

}  // namespace rgr
