#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stepweave/endpoint.hpp"
#include "stepweave/ledger.hpp"
#include "stepweave/segment.hpp"
#include "stepweave/trajectory.hpp"

namespace stepweave {

enum class FinishReason { stop_sequence, length, end_of_text };

std::string_view to_string(FinishReason reason);

struct GenerationResult {
    std::string text;
    FinishReason finish = FinishReason::end_of_text;
    std::string matched_stop;  // set when finish == stop_sequence
    std::int64_t completion_tokens = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t latency_ms = 0;
};

struct StepCaps {
    std::int64_t per_step_tokens = 2048;
    std::int64_t remaining_think_tokens = 16384;
};

struct ProposedStep {
    ReasoningStep step;
    GenerationResult generation;
    std::string next_pending_header;  // prefix layout: the matched term opens the next step
};

struct Budgets {
    std::int64_t think_tokens = 16384;
    std::int64_t answer_tokens = 4096;
};

/// Prompt for continuing `prefix` at step `step_number`: preamble, rendered
/// reasoning so far, then the forced step opening.
std::string step_prompt(const EndpointSpec& teacher, const Problem& problem, const Trajectory& prefix,
                        int step_number);

/// Asks one teacher for the next reasoning step. Throws EndpointError once
/// retries are exhausted; callers drop the candidate.
ProposedStep propose_step(Endpoint& teacher, const Problem& problem, const Trajectory& prefix, int step_number,
                          const StepCaps& caps, const SegmentScheme& scheme, CostLedger& ledger,
                          std::optional<std::uint64_t> seed = std::nullopt);

/// Lets one teacher finish `prefix` in a single request (stop at `</think>`,
/// at most `think_budget` tokens). The result is always finalized: when the
/// budget runs out first the sentinel is appended.
Trajectory continue_to_end(Endpoint& teacher, const Problem& problem, const Trajectory& prefix,
                           std::int64_t think_budget, const SegmentScheme& scheme, CostLedger& ledger,
                           std::optional<std::uint64_t> seed = std::nullopt, GenerationResult* generation = nullptr);

struct AnswerResult {
    std::string text;
    GenerationResult generation;
};

/// Final answer conditioned on the closed reasoning region. Throws
/// TrajectoryError when `finalized` is not finalized.
AnswerResult generate_answer(Endpoint& teacher, const Problem& problem, const Trajectory& finalized,
                             std::int64_t answer_tokens, CostLedger& ledger,
                             std::optional<std::uint64_t> seed = std::nullopt);

struct FullGeneration {
    Trajectory trajectory;  // finalized, final_answer set
    GenerationResult think;
    AnswerResult answer;
};

/// Complete trajectory plus answer from one teacher.
FullGeneration generate_full(Endpoint& teacher, const Problem& problem, const Budgets& budgets,
                             const SegmentScheme& scheme, CostLedger& ledger,
                             std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace stepweave
