#include <gtest/gtest.h>

#include <atomic>

#include "scenarios.hpp"
#include "stepweave/teacher.hpp"

namespace stepweave {
namespace {

using namespace testing;

Trajectory empty_for(const Problem& p) {
    Trajectory t;
    t.problem_id = p.id;
    return t;
}

TEST(ProposeStep, BoundaryStep) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    const auto r = propose_step(*h.teachers[0], h.problem(), empty_for(h.problem()), 1, {}, {}, ledger);
    EXPECT_EQ(r.step.header, "### Step 1.");
    EXPECT_EQ(r.step.body, " Start from two.");
    EXPECT_EQ(r.step.finish, StepFinish::boundary);
    EXPECT_EQ(r.step.teacher_id, "A");
    EXPECT_EQ(r.step.token_count, 4);
    EXPECT_EQ(ledger.phase(Phase::step_generation).calls, 1);
}

TEST(ProposeStep, ThinkEndStep) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    const auto first = propose_step(*h.teachers[0], h.problem(), empty_for(h.problem()), 1, {}, {}, ledger);
    const auto prefix = append_step(empty_for(h.problem()), first.step);
    const auto second = propose_step(*h.teachers[1], h.problem(), prefix, 2, {}, {}, ledger);
    EXPECT_EQ(second.step.body, " Count up three times.");
    EXPECT_EQ(second.step.finish, StepFinish::think_end);
    EXPECT_TRUE(append_step(prefix, second.step).finalized);
}

TEST(ProposeStep, TokenCapWithPerStepEight) {
    auto h = make_harness(endless_scenario());
    CostLedger ledger;
    StepCaps caps;
    caps.per_step_tokens = 8;
    const auto r = propose_step(*h.teachers[0], h.problem(), empty_for(h.problem()), 1, caps, {}, ledger);
    EXPECT_EQ(r.step.finish, StepFinish::token_cap);
    EXPECT_EQ(r.step.token_count, 8);
    EXPECT_EQ(r.step.body, " and we keep going and we keep going");
}

TEST(ProposeStep, RemainingBudgetBindsBeforePerStepCap) {
    auto h = make_harness(endless_scenario());
    CostLedger ledger;
    StepCaps caps;
    caps.per_step_tokens = 8;
    caps.remaining_think_tokens = 3;
    const auto r = propose_step(*h.teachers[0], h.problem(), empty_for(h.problem()), 1, caps, {}, ledger);
    EXPECT_EQ(r.step.token_count, 3);
}

TEST(ProposeStep, RejectsFinalizedPrefix) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    EXPECT_THROW(propose_step(*h.teachers[0], h.problem(), force_finalize(empty_for(h.problem())), 1, {}, {}, ledger),
                 AppendToFinalized);
}

TEST(ContinueToEnd, SplitsContinuationIntoSteps) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    const auto t = continue_to_end(*h.teachers[1], h.problem(), empty_for(h.problem()), 1000, {}, ledger);
    ASSERT_EQ(t.steps.size(), 2u);
    EXPECT_EQ(t.steps[0].body, " Start from three.");
    EXPECT_EQ(t.steps[1].body, " Two more makes five.");
    EXPECT_TRUE(t.finalized);
    EXPECT_EQ(render_think(t, true), "<think>\n### Step 1. Start from three.\n### Step 2. Two more makes five.</think>");
    EXPECT_EQ(ledger.phase(Phase::step_generation).calls, 1);
}

TEST(ContinueToEnd, BudgetClosesTheRegion) {
    auto h = make_harness(endless_scenario());
    CostLedger ledger;
    const auto t = continue_to_end(*h.teachers[0], h.problem(), empty_for(h.problem()), 64, {}, ledger);
    EXPECT_TRUE(t.finalized);
    EXPECT_EQ(t.think_tokens(), 64);
    EXPECT_EQ(t.steps.back().finish, StepFinish::token_cap);
}

TEST(GenerateFull, ProducesTrajectoryAndAnswer) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    const auto full = generate_full(*h.teachers[0], h.problem(), {}, {}, ledger);
    EXPECT_TRUE(full.trajectory.finalized);
    EXPECT_EQ(full.trajectory.final_answer, "The final answer is \\boxed{5}.");
    EXPECT_EQ(ledger.phase(Phase::step_generation).calls, 1);
    EXPECT_EQ(ledger.phase(Phase::answer_generation).calls, 1);
}

TEST(GenerateAnswer, RequiresFinalized) {
    auto h = make_harness(mcts_scenario());
    CostLedger ledger;
    EXPECT_THROW(generate_answer(*h.teachers[0], h.problem(), empty_for(h.problem()), 10, ledger), TrajectoryError);
}

TEST(Endpoint, RetriesTransientFailuresAndCountsAttempts) {
    std::atomic<int> seen{0};
    auto model = std::make_shared<const MockModel>(mcts_scenario());
    auto transport = std::make_shared<MockTransport>(
        model, [&](const EndpointSpec&, const CompletionRequest&) -> std::optional<int> {
            return seen++ == 0 ? std::optional<int>(503) : std::nullopt;
        });
    auto spec = mock_endpoint("A", "model-A");
    spec.retry.attempts = 2;
    Endpoint endpoint(spec, transport);
    CostLedger ledger;
    Problem problem{"mcts", "What is two plus three?", "5"};
    const auto r = propose_step(endpoint, problem, empty_for(problem), 1, {}, {}, ledger);
    EXPECT_EQ(r.step.body, " Start from two.");
    const auto counters = ledger.phase(Phase::step_generation);
    EXPECT_EQ(counters.calls, 2);
    EXPECT_EQ(counters.retries, 1);
}

TEST(Endpoint, GivesUpAfterRetries) {
    auto model = std::make_shared<const MockModel>(mcts_scenario());
    auto transport = std::make_shared<MockTransport>(
        model, [](const EndpointSpec&, const CompletionRequest&) -> std::optional<int> { return 500; });
    auto spec = mock_endpoint("A", "model-A");
    spec.retry.attempts = 2;
    Endpoint endpoint(spec, transport);
    CostLedger ledger;
    Problem problem{"mcts", "What is two plus three?", "5"};
    EXPECT_THROW(propose_step(endpoint, problem, empty_for(problem), 1, {}, {}, ledger), EndpointError);
    const auto counters = ledger.phase(Phase::step_generation);
    EXPECT_EQ(counters.calls, 3);
    EXPECT_EQ(counters.failures, 1);
}

TEST(Endpoint, DoesNotRetryClientErrors) {
    auto model = std::make_shared<const MockModel>(mcts_scenario());
    auto transport = std::make_shared<MockTransport>(model);
    auto spec = mock_endpoint("A", "model-A");
    spec.retry.attempts = 3;
    Endpoint endpoint(spec, transport);
    CostLedger ledger;
    Problem problem{"unknown", "Not in the script?", "5"};
    EXPECT_THROW(propose_step(endpoint, problem, empty_for(problem), 1, {}, {}, ledger), EndpointError);
    EXPECT_EQ(ledger.phase(Phase::step_generation).calls, 1);
}

}  // namespace
}  // namespace stepweave
