#pragma once

#include <string>

namespace rgr {

// Wire-format prompt templates for the judge service and the text-level
// refinement/generation protocols. These strings are interchange formats:
// golden-transcript tests pin them byte-for-byte, so any edit is a protocol
// change.

extern const char* const kRubricJudgeSystemPrompt;
extern const char* const kRubricJudgeUserTemplate;   // {prompt} {response} {single_rubric_criterion}
extern const char* const kLikertJudgeSystemPrompt;
extern const char* const kLikertJudgeUserTemplate;   // {prompt} {reference} {response}
extern const char* const kRefinementSystemPrompt;
extern const char* const kRefinementUserTemplate;    // {base_text} {selected_response} {rubrics}
extern const char* const kRubricGeneratorSystemPrompt;
extern const char* const kRubricGeneratorUserPrompt;

/// Replaces each literal `{name}` placeholder with its value. Only the given
/// placeholder is touched; all other braces in the template are preserved.
std::string substitute_placeholder(std::string text, const std::string& name,
                                   const std::string& value);

std::string build_rubric_judge_user_prompt(const std::string& prompt, const std::string& response,
                                           const std::string& criterion);
std::string build_likert_judge_user_prompt(const std::string& prompt, const std::string& reference,
                                           const std::string& response);
std::string build_refinement_user_prompt(const std::string& question,
                                         const std::string& previous_response,
                                         const std::string& rubrics);

}  // namespace rgr
