#include "stepweave/prompts.hpp"

#include <initializer_list>
#include <utility>

namespace stepweave::prompts {

namespace {

constexpr std::string_view kIntegration = R"PROMPT(You are tasked with analyzing multiple reasoning solutions and integrating them into a single, structured JSON output.

1. Integrate All Reasoning
- The reasoning steps are provided inside XML tags such as:
<reasoning_step_1> ... </reasoning_step_1>
<reasoning_step_2> ... </reasoning_step_2>
- Merge the content inside all these XML tags into one unified reasoning flow.
- Combine them carefully while maintaining logical flow and context.

2. Assign IDs
- Each sub-thinking process should have its own unique ID.
- Use a hierarchy such as:
"integrated_step1", "integrated_step2" for overall stages of integrated reasoning.
"answer_part" for the final answer section and use \boxed{} format for the final answer.

3. Categorize Reasoning Patterns
Categorize the reasoning according to its type to ensure effective integration:
- Progressive Reasoning: Logical, forward-moving step-by-step problem solving.
  Indicators: “Let's solve”, “First”, “Next”, “Then”, “Therefore”, “We need to”, “Given that”.
- Verification: Returning to check previous steps for accuracy.
  Indicators: “Wait”, “Let me check”, “Let me verify”, “Double-check”, “Going back to”.
- Multi-method Validation: Using different methods or perspectives to confirm a conclusion.
  Indicators: “Alternatively”, “Another way”, “Let's try a different approach”, “Using another method”.
- Error Correction Pattern: Identifying and fixing mistakes in reasoning.
  Indicators: “This is wrong”, “The mistake was”, “This can't be right”, “The error is”, “This contradicts”.

4. Return Your Integration in JSON Format
Provide your integrated reasoning in the following JSON structure:

{
    "integrated_step1": {"content": "### Step 1. <integrated reasoning text>", "category": "<reasoning pattern>"},
    "integrated_step2": {"content": "### Step 2. <integrated reasoning text>", "category": "<reasoning pattern>"},
    ...
    "integrated_stepN": {"content": "### Step N. <integrated reasoning text>", "category": "<reasoning pattern>"},
    "answer_part": ["<final answer in boxed format>"]
}

Question: {Question}

Reasoning Steps: {Reasoning Steps}
)PROMPT";

constexpr std::string_view kJudge = R"PROMPT(Your task is to evaluate the correctness of the predicted answer based on the true answer.

Instructions:

1. Read the QUERY and then compare the ANSWER and the Predicted ANSWER.

2. Check if the Predicted Answer includes the core content of the True Answer (True/False in text).

3. If the Predicted Answer is correct, return "True". If it is incorrect, return "False".

QUERY:
{Question}

TRUE ANSWER:
{Reference Answer}

Predicted ANSWER:
{Model Answer}

Output Format:
{"correctness": "True or False"}

Output (Only JSON):
)PROMPT";

// Single pass over the template so substituted values are never rescanned.
std::string fill_all(std::string_view tmpl,
                     std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool replaced = false;
        if (tmpl[i] == '{') {
            for (const auto& [name, value] : values) {
                if (tmpl.substr(i + 1, name.size()) == name && i + 1 + name.size() < tmpl.size() &&
                    tmpl[i + 1 + name.size()] == '}') {
                    out += value;
                    i += name.size() + 2;
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += tmpl[i++];
    }
    return out;
}

}  // namespace

std::string_view integration_template() { return kIntegration; }

std::string_view judge_template() { return kJudge; }

std::string fill(std::string_view tmpl, std::string_view name, std::string_view value) {
    return fill_all(tmpl, {{name, value}});
}

std::string problem_preamble(std::string_view system_prompt, std::string_view question) {
    std::string out;
    out.reserve(system_prompt.size() + question.size() + 1);
    out += system_prompt;
    out += question;
    out += '\n';
    return out;
}

std::string render_integration_prompt(std::string_view question, std::span<const std::string> trajectories) {
    std::string wrapped;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const std::string tag = "reasoning_step_" + std::to_string(k + 1);
        if (k > 0) wrapped += '\n';
        wrapped += "<" + tag + ">\n";
        wrapped += trajectories[k];
        wrapped += "\n</" + tag + ">";
    }
    return fill_all(kIntegration, {{"Question", question}, {"Reasoning Steps", wrapped}});
}

std::string render_judge_prompt(std::string_view question, std::string_view reference,
                                std::string_view predicted) {
    return fill_all(kJudge,
                    {{"Question", question}, {"Reference Answer", reference}, {"Model Answer", predicted}});
}

}  // namespace stepweave::prompts
