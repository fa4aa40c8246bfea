#include <gtest/gtest.h>

#include "scenarios.hpp"
#include "stepweave/answer.hpp"

namespace stepweave {
namespace {

TEST(ExtractBoxed, LastBalancedGroup) {
    EXPECT_EQ(extract_boxed("\\boxed{1} then \\boxed{\\frac{1}{2}}"), "\\frac{1}{2}");
    EXPECT_EQ(extract_boxed("\\boxed{7} and \\boxed{unclosed"), "7");
    EXPECT_FALSE(extract_boxed("no box"));
}

TEST(ExtractFinalAnswer, FallsBackToPhrase) {
    EXPECT_EQ(extract_final_answer("The final answer is \\boxed{25}."), "25");
    EXPECT_EQ(extract_final_answer("So the Final Answer is: 7"), " 7");
    EXPECT_FALSE(extract_final_answer("I do not know"));
}

TEST(NormalizeAnswer, Rules) {
    EXPECT_EQ(normalize_answer("  $42$. "), "42");
    EXPECT_EQ(normalize_answer("Twelve   Apples"), "twelve apples");
    EXPECT_EQ(normalize_answer("x\ty\n"), "x y");
}

TEST(AnswersMatch, ExactAfterNormalization) {
    EXPECT_TRUE(answers_match("The final answer is \\boxed{25}.", "25"));
    EXPECT_TRUE(answers_match("The final answer is 7", "7"));
    EXPECT_FALSE(answers_match("The final answer is 7", "25"));
    EXPECT_FALSE(answers_match("\\boxed{125}", "25"));
    EXPECT_FALSE(answers_match("", "25"));
}

TEST(ParseJudgeReply, ToleratesFencesAndProse) {
    EXPECT_TRUE(parse_judge_reply("{\"correctness\": \"True\"}"));
    EXPECT_FALSE(parse_judge_reply("Verdict:\n```json\n{\"correctness\": \"False\"}\n```"));
    EXPECT_TRUE(parse_judge_reply("{\"correctness\": true}"));
    EXPECT_THROW(parse_judge_reply("correct"), JudgeParseError);
    EXPECT_THROW(parse_judge_reply("{\"correctness\": \"maybe\"}"), JudgeParseError);
    EXPECT_THROW(parse_judge_reply("{\"verdict\": \"True\"}"), JudgeParseError);
}

TEST(Verdict, StringsRoundTrip) {
    for (auto v : {Verdict::correct, Verdict::incorrect, Verdict::unjudged}) {
        EXPECT_EQ(verdict_from_string(to_string(v)), v);
    }
}

MockScenario judged_scenario(std::optional<std::string> reply) {
    auto s = testing::mcts_scenario();
    s.problems[0].judge_reply = std::move(reply);
    return s;
}

TEST(AnswerJudge, UsesChatVerdict) {
    auto h = testing::make_harness(judged_scenario(std::nullopt));
    AnswerJudge judge(testing::mock_endpoint("judge", "mock-judge"), h.transport);
    Problem open = h.problem();
    open.answer_mode = AnswerMode::open_ended;
    CostLedger ledger;
    EXPECT_EQ(judge.judge(open, "It is 5.", ledger), Verdict::correct);
    EXPECT_EQ(judge.judge(open, "It is 6.", ledger), Verdict::incorrect);
    EXPECT_EQ(ledger.phase(Phase::meta_prover_evaluation).calls, 2);
}

TEST(AnswerJudge, UnparseableRepliesLeaveUnjudged) {
    auto h = testing::make_harness(judged_scenario("I think so."));
    AnswerJudge judge(testing::mock_endpoint("judge", "mock-judge"), h.transport, 3);
    CostLedger ledger;
    EXPECT_EQ(judge.judge(h.problem(), "5", ledger), Verdict::unjudged);
    EXPECT_EQ(ledger.phase(Phase::meta_prover_evaluation).calls, 3);
}

TEST(GradeAnswer, ClosedEndedUsesMatcher) {
    CostLedger ledger;
    const Problem closed{"p", "q", "5"};
    EXPECT_EQ(grade_answer(closed, "\\boxed{5}", nullptr, ledger), Verdict::correct);
    EXPECT_EQ(grade_answer(closed, "\\boxed{4}", nullptr, ledger), Verdict::incorrect);
    Problem open = closed;
    open.answer_mode = AnswerMode::open_ended;
    EXPECT_EQ(grade_answer(open, "\\boxed{5}", nullptr, ledger), Verdict::unjudged);
}

}  // namespace
}  // namespace stepweave
