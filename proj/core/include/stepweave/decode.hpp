#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/endpoint.hpp"
#include "stepweave/ledger.hpp"
#include "stepweave/prover.hpp"
#include "stepweave/segment.hpp"
#include "stepweave/trajectory.hpp"

namespace stepweave {

/// Teachers in config order; the position is the teacher ordinal used in
/// tie-keys.
using TeacherPool = std::vector<std::shared_ptr<Endpoint>>;

struct DecodeConfig {
    int beam_size = 4;
    std::int64_t think_budget_tokens = 16384;
    std::int64_t answer_budget_tokens = 4096;
    std::int64_t per_step_cap = 2048;
    int max_steps = 128;
    bool dedup_candidates = false;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct CandidateRecord {
    int parent = 0;  // beam slot of the parent hypothesis
    int teacher_ordinal = 0;
    std::string teacher_id;
    std::optional<double> score;
    bool carried = false;    // finalized or frozen hypothesis from the previous beam
    bool collapsed = false;  // identical to a better-ranked candidate
    bool finalized = false;
    bool forced = false;     // closed by the think budget
    std::string finish;
    std::int64_t token_count = 0;
    std::int64_t think_tokens = 0;
    std::string body;
    int beam_rank = -1;  // position in the new beam; -1 when cut
};

struct FailureRecord {
    int parent = 0;
    int teacher_ordinal = 0;
    std::string stage;  // "generation" or "scoring"
    std::string error;
};

struct StepTrace {
    int step = 0;
    std::vector<CandidateRecord> pool;
    std::vector<FailureRecord> failures;
    std::vector<int> frozen;  // beam slots whose every candidate failed
};

struct DecodeTrace {
    std::vector<StepTrace> steps;
    bool hit_max_steps = false;
    std::string answer_teacher;
    std::vector<std::string> answer_fallbacks;  // teachers that failed answer generation

    nlohmann::json to_json() const;
};

struct StepOutcome {
    BeamState beam;
    StepTrace trace;
};

class BeamFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One round of candidate proposal, scoring and top-B selection. Throws
/// BeamFailed when no active hypothesis produced a usable candidate.
StepOutcome decode_step(const Problem& problem, const BeamState& beam, const TeacherPool& teachers, Prover& prover,
                        const DecodeConfig& config, const SegmentScheme& scheme, CostLedger& ledger);

struct DecodeResult {
    bool ok = false;
    std::string error;
    Trajectory trajectory;  // best finalized hypothesis, final answer set when ok
    std::vector<Trajectory> final_beam;
    DecodeTrace trace;
};

/// Full beam decode plus final-answer generation. Never throws for endpoint
/// or beam failures; they are reported through `ok` and `error`.
DecodeResult decode(const Problem& problem, const TeacherPool& teachers, Prover& prover, const DecodeConfig& config,
                    const SegmentScheme& scheme, CostLedger& ledger);

/// The hypotheses decode starts from: `beam_size` empty trajectories.
BeamState initial_beam(const Problem& problem, const DecodeConfig& config, const SegmentScheme& scheme);

/// Generates the final answer with `preferred` first, then the remaining
/// teachers by ordinal. Returns the teacher that succeeded and records the
/// ones that failed in `fallbacks`. Throws EndpointError when all fail.
std::pair<Trajectory, std::string> answer_with_fallback(const Problem& problem, const Trajectory& finalized,
                                                        const TeacherPool& teachers, const std::string& preferred,
                                                        std::int64_t answer_tokens, std::uint64_t seed,
                                                        CostLedger& ledger, std::vector<std::string>& fallbacks);

enum class Strategy { cord, greedy, curation, integration, mcts };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view text);

struct CallCounts {
    std::int64_t generation_calls = 0;
    std::int64_t scoring_calls = 0;

    bool operator==(const CallCounts&) const = default;
};

/// Closed forms without early finalization, failures or cache hits:
/// cord T*K*B, greedy T*K, curation K*B (B = rollouts per teacher).
CallCounts expected_call_counts(int steps, int teachers, int beam, Strategy strategy);

}  // namespace stepweave
