#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace stepweave::prompts {

/// Scoring template: `{prefix} </think> The final answer is {answer}.`
inline constexpr std::string_view kPerplexityTemplate = "{prefix} </think> The final answer is {answer}.";

/// Suffix appended to a reasoning prefix when the prover is asked to commit to
/// an answer for binary judgment.
inline constexpr std::string_view kBinaryJudgmentSuffix =
    " Time is up. Given the time I've spent and the approaches I've tried, I should stop thinking "
    "and formulate a final answer based on what I already have.</think> The final answer is:";

/// Instruction for merging complete teacher trajectories. Placeholders:
/// `{Question}` and `{Reasoning Steps}`.
std::string_view integration_template();

/// LLM-as-judge prompt for open-ended answers. Placeholders: `{Question}`,
/// `{Reference Answer}`, `{Model Answer}`.
std::string_view judge_template();

/// Replaces every `{name}` occurrence; unknown placeholders are left alone.
std::string fill(std::string_view tmpl, std::string_view name, std::string_view value);

/// Shared opening of every completion prompt: system prompt, then the user
/// question, then a newline before the reasoning region.
std::string problem_preamble(std::string_view system_prompt, std::string_view question);

std::string render_integration_prompt(std::string_view question, std::span<const std::string> trajectories);

std::string render_judge_prompt(std::string_view question, std::string_view reference,
                                std::string_view predicted);

/// Correction message used when a chat response could not be parsed.
inline constexpr std::string_view kJsonReask =
    "Your previous reply could not be parsed. Return only the JSON object in the requested format.";

}  // namespace stepweave::prompts
