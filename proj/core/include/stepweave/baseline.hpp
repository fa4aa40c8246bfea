#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/decode.hpp"
#include "stepweave/teacher.hpp"

namespace stepweave {

// ---------------------------------------------------------------------------
// Curation: complete trajectories from every teacher, scored as a whole.

struct CurationConfig {
    int rollouts_per_teacher = 4;
    Budgets budgets;
    std::uint64_t seed = 0;
};

struct CurationCandidate {
    int teacher_ordinal = 0;
    int rollout = 0;
    std::string teacher_id;
    std::optional<Trajectory> trajectory;  // absent when generation failed
    std::optional<double> score;           // absent when scoring failed
    std::string error;
};

struct CurationResult {
    bool ok = false;
    std::string error;
    Trajectory trajectory;
    std::vector<CurationCandidate> candidates;  // ordered by (teacher ordinal, rollout)
    int selected = -1;                          // index into candidates

    nlohmann::json trace_json() const;
};

/// Selection follows the prover criterion: score argmax for step-level
/// criteria, otherwise the trajectory-level selector over the successful
/// candidates. Every successful candidate is scored either way.
CurationResult run_curation(const Problem& problem, const TeacherPool& teachers, Prover& prover,
                            const CurationConfig& config, const SegmentScheme& scheme, CostLedger& ledger);

// ---------------------------------------------------------------------------
// Integration: one complete trajectory per teacher merged by a chat model.

struct IntegrationConfig {
    Budgets budgets;
    int max_attempts = 2;  // total integrator requests before giving up
    std::int64_t max_tokens = 16384;
    std::uint64_t seed = 0;
};

class IntegrationParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParsedIntegration {
    std::vector<std::string> steps;  // integrated_step contents in numeric order
    std::vector<std::string> answer_part;
};

/// Parses the integrator's JSON reply (code fences tolerated). Throws
/// IntegrationParseError for malformed JSON, no integrated steps, or a
/// missing `answer_part`.
ParsedIntegration parse_integration_reply(std::string_view reply);

/// Builds the merged trajectory attributed to the teacher id "integrator".
/// Each content string becomes one step: a leading step marker is the
/// header, the rest the body, so header + body reproduces the content.
Trajectory integrated_trajectory(const Problem& problem, const ParsedIntegration& parsed);

inline constexpr std::string_view kIntegratorTeacherId = "integrator";

struct IntegrationResult {
    bool ok = false;
    std::string error;
    Trajectory trajectory;
    std::vector<std::string> replies;  // raw integrator replies, one per attempt
    std::optional<std::string> extracted_answer;
    std::vector<std::string> teacher_errors;

    nlohmann::json trace_json() const;
};

IntegrationResult run_integration(const Problem& problem, const TeacherPool& teachers, Endpoint& integrator,
                                  Prover& prover, const IntegrationConfig& config, const SegmentScheme& scheme,
                                  CostLedger& ledger);

// ---------------------------------------------------------------------------
// MCTS over teacher choices with UCB1 selection and perplexity rewards.

enum class RolloutPolicy { greedy_single_teacher, round_robin };

std::string_view to_string(RolloutPolicy policy);
RolloutPolicy rollout_policy_from_string(std::string_view text);

struct MctsConfig {
    double exploration_c = std::sqrt(2.0);
    int n_trajectories = 4;
    RolloutPolicy rollout_policy = RolloutPolicy::greedy_single_teacher;
    std::uint64_t seed = 0;
    int max_simulations = 64;

    void validate() const;
};

struct MctsNode {
    Trajectory prefix;
    MctsNode* parent = nullptr;
    int teacher_ordinal = -1;  // edge from the parent; -1 at the root
    std::vector<std::unique_ptr<MctsNode>> children;
    std::vector<int> untried;  // teacher ordinals not yet expanded, ascending
    int visits = 0;
    double reward_sum = 0.0;
    bool dead = false;  // no further expansion possible and no live children

    double mean_reward() const { return visits > 0 ? reward_sum / visits : 0.0; }
    bool terminal() const { return prefix.finalized; }
};

/// UCB1 = mean + c * sqrt(ln n_parent / n_child); +inf for unvisited children.
double ucb1(double mean_reward, int parent_visits, int child_visits, double c);

struct SelectionRecord {
    int depth = 0;
    std::vector<double> ucb;  // per child, in child order
    int chosen = -1;          // child index
};

struct SimulationRecord {
    int index = 0;
    std::vector<int> path;  // teacher ordinals from the root to the expanded node
    std::vector<SelectionRecord> selections;
    std::optional<int> expanded_teacher;
    std::optional<double> reward;
    bool distinct = false;
    std::string error;
};

struct MctsResult {
    bool ok = false;
    std::string error;
    Trajectory trajectory;              // best rollout, final answer set
    std::vector<Trajectory> rollouts;   // distinct rollouts in emission order
    std::vector<SimulationRecord> simulations;
    std::unique_ptr<MctsNode> root;
    std::int64_t expansion_calls = 0;
    std::int64_t rollout_calls = 0;
    std::string answer_teacher;
    std::vector<std::string> answer_fallbacks;

    nlohmann::json trace_json() const;
};

MctsResult run_mcts(const Problem& problem, const TeacherPool& teachers, Prover& prover, const MctsConfig& config,
                    const Budgets& budgets, const DecodeConfig& decode, const SegmentScheme& scheme,
                    CostLedger& ledger);

}  // namespace stepweave
