#include <gtest/gtest.h>

#include "stepweave/trajectory.hpp"

namespace stepweave {
namespace {

ReasoningStep make_step(int index, std::string header, std::string body, StepFinish finish = StepFinish::boundary,
                        std::int64_t tokens = 3) {
    ReasoningStep s;
    s.index = index;
    s.header = std::move(header);
    s.body = std::move(body);
    s.teacher_id = "A";
    s.token_count = tokens;
    s.finish = finish;
    return s;
}

TEST(Trajectory, RenderPromptGuidedJoinsEveryStepWithNewline) {
    Trajectory t;
    t = append_step(t, make_step(1, "### Step 1.", " Add."));
    t = append_step(t, make_step(2, "### Step 2.", " Done.", StepFinish::think_end));
    EXPECT_EQ(render_think(t, true), "<think>\n### Step 1. Add.\n### Step 2. Done.</think>");
    EXPECT_EQ(render_think(t, false), "<think>\n### Step 1. Add.\n### Step 2. Done.");
}

TEST(Trajectory, RenderLineBreakKeepsBodiesVerbatim) {
    Trajectory t;
    t.layout = SegmentKind::line_break;
    t = append_step(t, make_step(1, "", "First.\n\n"));
    t = append_step(t, make_step(2, "", "Second.", StepFinish::think_end));
    EXPECT_EQ(render_think(t, true), "<think>\nFirst.\n\nSecond.</think>");
}

TEST(Trajectory, EmptyTrajectoryRendersOpenSentinelOnly) {
    EXPECT_EQ(render_think(Trajectory{}, true), "<think>");
}

TEST(Trajectory, AppendIsPureAndTracksState) {
    Trajectory empty;
    const auto one = append_step(empty, make_step(1, "### Step 1.", " a", StepFinish::boundary, 5));
    EXPECT_TRUE(empty.steps.empty());
    EXPECT_EQ(one.steps.size(), 1u);
    EXPECT_FALSE(one.finalized);
    EXPECT_EQ(one.last_teacher_id, "A");
    EXPECT_EQ(one.think_tokens(), 5);
    const auto two = append_step(one, make_step(2, "### Step 2.", " b", StepFinish::think_end, 7));
    EXPECT_TRUE(two.finalized);
    EXPECT_EQ(two.think_tokens(), 12);
}

TEST(Trajectory, AppendClearsScore) {
    auto t = with_score(append_step(Trajectory{}, make_step(1, "### Step 1.", " a")), 0.4);
    ASSERT_TRUE(t.score);
    EXPECT_FALSE(append_step(t, make_step(2, "### Step 2.", " b")).score);
}

TEST(Trajectory, AppendToFinalizedThrows) {
    auto t = append_step(Trajectory{}, make_step(1, "### Step 1.", " a", StepFinish::think_end));
    EXPECT_THROW(append_step(t, make_step(2, "### Step 2.", " b")), AppendToFinalized);
}

TEST(Trajectory, IndexMustFollow) {
    EXPECT_THROW(append_step(Trajectory{}, make_step(2, "### Step 2.", " b")), IndexMismatch);
}

TEST(Trajectory, ForceFinalizeClosesWithoutAddingSteps) {
    auto t = append_step(Trajectory{}, make_step(1, "### Step 1.", " a", StepFinish::token_cap));
    const auto closed = force_finalize(t);
    EXPECT_TRUE(closed.finalized);
    EXPECT_EQ(closed.steps.size(), 1u);
    EXPECT_TRUE(render_think(closed, true).ends_with("</think>"));
}

TEST(Trajectory, FinalAnswerNeedsFinalized) {
    EXPECT_THROW(with_final_answer(Trajectory{}, "5"), TrajectoryError);
    const auto t = with_final_answer(force_finalize(Trajectory{}), "5");
    EXPECT_EQ(t.final_answer, "5");
}

TEST(Trajectory, RankingIsScoreThenTieKey) {
    EXPECT_TRUE(ranks_before(0.6, {1, 2}, 0.4, {0, 0}));
    EXPECT_TRUE(ranks_before(0.5, {0, 1}, 0.5, {0, 2}));
    EXPECT_TRUE(ranks_before(0.5, {0, 2}, 0.5, {1, 0}));
    EXPECT_FALSE(ranks_before(0.5, {1, 0}, 0.5, {0, 2}));
    EXPECT_TRUE(ranks_before(0.0, {3, 3}, std::nullopt, {0, 0}));
}

TEST(Trajectory, EnumStringsRoundTrip) {
    for (auto f : {StepFinish::boundary, StepFinish::think_end, StepFinish::token_cap}) {
        EXPECT_EQ(step_finish_from_string(to_string(f)), f);
    }
    for (auto k : {SegmentKind::prompt_guided, SegmentKind::line_break, SegmentKind::prefix}) {
        EXPECT_EQ(segment_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(step_finish_from_string("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace stepweave
