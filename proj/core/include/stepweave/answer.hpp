#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stepweave/endpoint.hpp"
#include "stepweave/ledger.hpp"
#include "stepweave/trajectory.hpp"

namespace stepweave {

enum class Verdict { correct, incorrect, unjudged };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

/// Content of the last `\boxed{...}` with balanced braces, if any.
std::optional<std::string> extract_boxed(std::string_view text);

/// The boxed answer when present, otherwise the text after the last
/// "final answer is" (case-insensitive). None when neither is found.
std::optional<std::string> extract_final_answer(std::string_view text);

/// Trim, collapse whitespace, drop `$`, strip a trailing period, case-fold.
std::string normalize_answer(std::string_view text);

/// Closed-ended matcher: the extracted answer (or the whole text when nothing
/// can be extracted) equals the gold answer after normalization.
bool answers_match(std::string_view answer_text, std::string_view gold);

class JudgeParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `{"correctness": "True" | "False"}`, tolerating code fences and
/// surrounding prose. Throws JudgeParseError.
bool parse_judge_reply(std::string_view reply);

/// LLM-as-judge for open-ended answers over the chat protocol.
class AnswerJudge {
public:
    AnswerJudge(EndpointSpec spec, std::shared_ptr<Transport> transport, int max_attempts = 3);

    /// Unjudged when every attempt fails to parse or the endpoint fails.
    Verdict judge(const Problem& problem, std::string_view answer_text, CostLedger& ledger);

private:
    Endpoint endpoint_;
    int max_attempts_;
};

/// Closed-ended problems use the string matcher; open-ended ones go to the
/// judge, or stay unjudged when none is configured.
Verdict grade_answer(const Problem& problem, std::string_view answer_text, AnswerJudge* judge, CostLedger& ledger);

}  // namespace stepweave
