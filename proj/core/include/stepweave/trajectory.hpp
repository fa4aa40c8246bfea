#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stepweave {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";

enum class AnswerMode { closed_ended, open_ended };

/// One training instance: the question and its reference answer.
struct Problem {
    std::string id;
    std::string question;
    std::string gold_answer;
    AnswerMode answer_mode = AnswerMode::closed_ended;

    bool operator==(const Problem&) const = default;
};

/// How step boundaries are drawn. Determines the stop sequences handed to
/// teachers, the text that joins steps when rendering, and how rendered text
/// is split back into steps.
enum class SegmentKind { prompt_guided, line_break, prefix };

enum class StepFinish { boundary, think_end, token_cap };

struct ReasoningStep {
    int index = 1;             // 1-based position in the trajectory
    std::string header;        // injected marker, e.g. "### Step 3."
    std::string body;          // bytes exactly as the endpoint returned them
    std::string teacher_id;
    std::int64_t token_count = 0;
    StepFinish finish = StepFinish::boundary;

    bool operator==(const ReasoningStep&) const = default;
};

struct Trajectory {
    std::string problem_id;
    SegmentKind layout = SegmentKind::prompt_guided;
    std::vector<ReasoningStep> steps;
    bool finalized = false;
    std::optional<double> score;
    std::optional<std::string> final_answer;
    std::optional<std::string> last_teacher_id;
    // Boundary text that opens the next step. Only the prefix layout uses it:
    // the matched prefix term ("Wait") becomes the next step's header.
    std::string pending_header;

    std::int64_t think_tokens() const;

    bool operator==(const Trajectory&) const = default;
};

class TrajectoryError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class AppendToFinalized : public TrajectoryError {
public:
    AppendToFinalized() : TrajectoryError("cannot append a step to a finalized trajectory") {}
};

class IndexMismatch : public TrajectoryError {
public:
    IndexMismatch(int expected, int got);
};

/// Canonical serialization of the reasoning region: `<think>` followed by
/// every step (joined per the trajectory layout), then `</think>` when
/// `include_sentinel` is set and the trajectory is finalized.
std::string render_think(const Trajectory& trajectory, bool include_sentinel);

/// The ⊕ operation. Returns a new trajectory; the input is untouched.
Trajectory append_step(const Trajectory& trajectory, ReasoningStep step,
                       std::string next_pending_header = {});

/// Closes the reasoning region without adding a step (budget exhaustion).
Trajectory force_finalize(const Trajectory& trajectory);

Trajectory with_score(const Trajectory& trajectory, double score);
Trajectory with_final_answer(const Trajectory& trajectory, std::string answer);

/// Deterministic tie-break key: lower compares first.
struct TieKey {
    int parent_beam_index = 0;
    int teacher_ordinal = 0;

    auto operator<=>(const TieKey&) const = default;
};

struct Candidate {
    TieKey key;
    std::string teacher_id;
    ReasoningStep step;
    Trajectory extended;
    double score = 0.0;
};

/// Ranking used everywhere a beam is cut: score descending, tie-key ascending.
/// An absent score ranks below every present one.
bool ranks_before(std::optional<double> score_a, const TieKey& key_a,
                  std::optional<double> score_b, const TieKey& key_b);

struct BeamState {
    int step_index = 0;
    std::vector<Trajectory> hypotheses;
};

std::string_view to_string(StepFinish finish);
StepFinish step_finish_from_string(std::string_view text);
std::string_view to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(std::string_view text);
std::string_view to_string(AnswerMode mode);
AnswerMode answer_mode_from_string(std::string_view text);

}  // namespace stepweave
