#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "scenarios.hpp"
#include "stepweave/baseline.hpp"

namespace stepweave {
namespace {

using namespace testing;

MockScenario one_step_scenario(const std::vector<double>& scores) {
    MockScenario s;
    MockProblem p;
    p.id = "flat";
    p.question = "What is nine minus four?";
    p.answer = "5";
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto id = teacher_name(static_cast<int>(k));
        s.teachers.push_back({id, "model-" + id, std::nullopt, 0.5});
        MockNode n;
        n.text = " Teacher " + id + " subtracts" + std::string(k + 1, '!');
        n.finish = StepFinish::think_end;
        n.score = scores[k];
        p.root.children[id].push_back(n);
    }
    s.problems.push_back(p);
    s.validate();
    return s;
}

TEST(Curation, PicksFirstHighestScore) {
    auto h = make_harness(one_step_scenario({0.2, 0.9, 0.9}));
    CurationConfig c;
    c.rollouts_per_teacher = 1;
    CostLedger ledger;
    const auto r = run_curation(h.problem(), h.teachers, *h.prover, c, {}, ledger);
    ASSERT_TRUE(r.ok) << r.error;
    ASSERT_EQ(r.candidates.size(), 3u);
    EXPECT_EQ(r.selected, 1);
    EXPECT_EQ(r.trajectory.steps[0].teacher_id, "B");
    EXPECT_NEAR(*r.trajectory.score, 0.9, 1e-9);
    EXPECT_TRUE(r.trajectory.final_answer);
}

TEST(Curation, CallCountsFollowClosedForm) {
    auto h = make_harness(one_step_scenario({0.2, 0.5, 0.9}));
    CurationConfig c;
    c.rollouts_per_teacher = 2;
    CostLedger ledger;
    const auto r = run_curation(h.problem(), h.teachers, *h.prover, c, {}, ledger);
    ASSERT_TRUE(r.ok);
    const auto want = expected_call_counts(1, 3, 2, Strategy::curation);
    EXPECT_EQ(ledger.phase(Phase::step_generation).calls, want.generation_calls);
    const auto scoring = ledger.phase(Phase::meta_prover_evaluation);
    EXPECT_EQ(scoring.calls + scoring.cache_hits, want.scoring_calls);
}

TEST(Curation, MaxLengthCriterionSelectsLongest) {
    auto s = one_step_scenario({0.9, 0.1});
    s.problems[0].root.children["B"][0].text = " A much longer explanation that keeps going for a while.";
    auto h = make_harness(s, Criterion::max_length);
    CurationConfig c;
    c.rollouts_per_teacher = 1;
    CostLedger ledger;
    const auto r = run_curation(h.problem(), h.teachers, *h.prover, c, {}, ledger);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.selected, 1);
}

TEST(Curation, FailedTeacherIsSkipped) {
    auto h = make_harness(one_step_scenario({0.2, 0.9}), Criterion::predictive_perplexity,
                          [](const EndpointSpec& spec, const CompletionRequest&) -> std::optional<int> {
                              return spec.id == "B" ? std::optional<int>(500) : std::nullopt;
                          });
    CurationConfig c;
    c.rollouts_per_teacher = 1;
    CostLedger ledger;
    const auto r = run_curation(h.problem(), h.teachers, *h.prover, c, {}, ledger);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.selected, 0);
    EXPECT_FALSE(r.candidates[1].trajectory);
    EXPECT_FALSE(r.candidates[1].error.empty());
}

TEST(IntegrationParse, OrdersStepsNumerically) {
    const auto p = parse_integration_reply(
        "Here you go:\n```json\n{\"integrated_step10\": \"### Step 3. c\", \"integrated_step2\": {\"content\": "
        "\"### Step 2. b\"}, \"integrated_step1\": \"### Step 1. a\", \"answer_part\": \"\\\\boxed{1}\"}\n```");
    EXPECT_EQ(p.steps, (std::vector<std::string>{"### Step 1. a", "### Step 2. b", "### Step 3. c"}));
    EXPECT_EQ(p.answer_part, (std::vector<std::string>{"\\boxed{1}"}));
}

TEST(IntegrationParse, RejectsMalformedReplies) {
    EXPECT_THROW(parse_integration_reply("no json here"), IntegrationParseError);
    EXPECT_THROW(parse_integration_reply("{\"integrated_step1\": \"x\""), IntegrationParseError);
    EXPECT_THROW(parse_integration_reply("{\"answer_part\": \"x\"}"), IntegrationParseError);
    EXPECT_THROW(parse_integration_reply("{\"integrated_step1\": \"x\"}"), IntegrationParseError);
    EXPECT_THROW(parse_integration_reply("{\"integrated_step1\": 3, \"answer_part\": \"x\"}"), IntegrationParseError);
    EXPECT_THROW(parse_integration_reply("{\"integrated_step1\": \"x\", \"answer_part\": []}"),
                 IntegrationParseError);
}

TEST(IntegrationParse, StepsKeepTheirContent) {
    ParsedIntegration parsed;
    parsed.steps = {"### Step 1. First.", "no marker here"};
    parsed.answer_part = {"The final answer is \\boxed{2}."};
    const auto t = integrated_trajectory(Problem{"x", "q", "2"}, parsed);
    ASSERT_EQ(t.steps.size(), 2u);
    EXPECT_EQ(t.steps[0].header + t.steps[0].body, "### Step 1. First.");
    EXPECT_EQ(t.steps[1].header + t.steps[1].body, "no marker here");
    EXPECT_EQ(t.steps[0].teacher_id, kIntegratorTeacherId);
    EXPECT_TRUE(t.finalized);
}

TEST(Ucb1, Formula) {
    EXPECT_EQ(ucb1(0.5, 10, 0, 1.0), std::numeric_limits<double>::infinity());
    EXPECT_NEAR(ucb1(0.5, 10, 2, std::sqrt(2.0)), 0.5 + std::sqrt(2.0) * std::sqrt(std::log(10.0) / 2), 1e-12);
    EXPECT_EQ(ucb1(0.3, 4, 3, 0.0), 0.3);
}

TEST(Mcts, FindsBestRolloutAndStopsAtDistinctCount) {
    auto h = make_harness(mcts_scenario());
    MctsConfig m;
    m.n_trajectories = 4;
    CostLedger ledger;
    const auto r = run_mcts(h.problem(), h.teachers, *h.prover, m, {}, {}, {}, ledger);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.rollouts.size(), 4u);
    EXPECT_EQ(teacher_path(h.scenario(), r.trajectory), (std::vector<int>{1, 1}));
    EXPECT_NEAR(*r.trajectory.score, 0.8, 1e-9);
    EXPECT_TRUE(r.trajectory.final_answer);
    int visits = 0;
    for (const auto& child : r.root->children) visits += child->visits;
    EXPECT_EQ(visits, r.root->visits);
}

TEST(Mcts, SimulationCapBoundsWork) {
    auto h = make_harness(mcts_scenario());
    MctsConfig m;
    m.n_trajectories = 5;
    m.max_simulations = 6;
    CostLedger ledger;
    const auto r = run_mcts(h.problem(), h.teachers, *h.prover, m, {}, {}, {}, ledger);
    EXPECT_EQ(r.simulations.size(), 6u);
    EXPECT_LT(r.rollouts.size(), 5u);
    EXPECT_TRUE(r.ok);
    m.max_simulations = 4;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(MctsConfig, Validation) {
    MctsConfig m;
    EXPECT_NO_THROW(m.validate());
    m.n_trajectories = 0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_EQ(rollout_policy_from_string(to_string(RolloutPolicy::round_robin)), RolloutPolicy::round_robin);
}

}  // namespace
}  // namespace stepweave
