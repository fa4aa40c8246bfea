#include "stepweave/trajectory.hpp"

#include <limits>

#include "stepweave/segment.hpp"

namespace stepweave {

IndexMismatch::IndexMismatch(int expected, int got)
    : TrajectoryError("step index " + std::to_string(got) + " does not follow trajectory (expected " +
                      std::to_string(expected) + ")") {}

std::int64_t Trajectory::think_tokens() const {
    std::int64_t total = 0;
    for (const auto& step : steps) total += step.token_count;
    return total;
}

std::string render_think(const Trajectory& trajectory, bool include_sentinel) {
    std::string out(kThinkOpen);
    for (const auto& step : trajectory.steps) {
        out += step_join(trajectory.layout, step.index);
        out += step.header;
        out += step.body;
    }
    if (include_sentinel && trajectory.finalized) out += kThinkClose;
    return out;
}

Trajectory append_step(const Trajectory& trajectory, ReasoningStep step,
                       std::string next_pending_header) {
    if (trajectory.finalized) throw AppendToFinalized();
    const int expected = static_cast<int>(trajectory.steps.size()) + 1;
    if (step.index != expected) throw IndexMismatch(expected, step.index);

    Trajectory out = trajectory;
    out.finalized = step.finish == StepFinish::think_end;
    out.last_teacher_id = step.teacher_id;
    out.score.reset();
    out.pending_header = out.finalized ? std::string{} : std::move(next_pending_header);
    out.steps.push_back(std::move(step));
    return out;
}

Trajectory force_finalize(const Trajectory& trajectory) {
    Trajectory out = trajectory;
    out.finalized = true;
    out.pending_header.clear();
    return out;
}

Trajectory with_score(const Trajectory& trajectory, double score) {
    Trajectory out = trajectory;
    out.score = score;
    return out;
}

Trajectory with_final_answer(const Trajectory& trajectory, std::string answer) {
    if (!trajectory.finalized) throw TrajectoryError("final answer requires a finalized trajectory");
    Trajectory out = trajectory;
    out.final_answer = std::move(answer);
    return out;
}

bool ranks_before(std::optional<double> score_a, const TieKey& key_a,
                  std::optional<double> score_b, const TieKey& key_b) {
    const double a = score_a.value_or(-std::numeric_limits<double>::infinity());
    const double b = score_b.value_or(-std::numeric_limits<double>::infinity());
    if (a != b) return a > b;
    return key_a < key_b;
}

std::string_view to_string(StepFinish finish) {
    switch (finish) {
        case StepFinish::boundary: return "boundary";
        case StepFinish::think_end: return "think_end";
        case StepFinish::token_cap: return "token_cap";
    }
    return "boundary";
}

StepFinish step_finish_from_string(std::string_view text) {
    if (text == "boundary") return StepFinish::boundary;
    if (text == "think_end") return StepFinish::think_end;
    if (text == "token_cap") return StepFinish::token_cap;
    throw std::invalid_argument("unknown step finish: " + std::string(text));
}

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::prompt_guided: return "prompt_guided";
        case SegmentKind::line_break: return "line_break";
        case SegmentKind::prefix: return "prefix";
    }
    return "prompt_guided";
}

SegmentKind segment_kind_from_string(std::string_view text) {
    if (text == "prompt_guided") return SegmentKind::prompt_guided;
    if (text == "line_break") return SegmentKind::line_break;
    if (text == "prefix") return SegmentKind::prefix;
    throw std::invalid_argument("unknown segmentation scheme: " + std::string(text));
}

std::string_view to_string(AnswerMode mode) {
    return mode == AnswerMode::open_ended ? "open_ended" : "closed_ended";
}

AnswerMode answer_mode_from_string(std::string_view text) {
    if (text == "closed_ended") return AnswerMode::closed_ended;
    if (text == "open_ended") return AnswerMode::open_ended;
    throw std::invalid_argument("unknown answer mode: " + std::string(text));
}

}  // namespace stepweave
