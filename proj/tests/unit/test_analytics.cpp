#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stepweave/analytics.hpp"
#include "stepweave/prover.hpp"

namespace stepweave {
namespace {

DatasetEntry entry(Verdict v, std::optional<double> score, std::vector<std::string> teachers = {}) {
    DatasetEntry e;
    e.verdict = v;
    e.selected_score = score;
    int i = 1;
    for (auto& t : teachers) e.steps.push_back({i++, std::move(t), 1, StepFinish::boundary});
    return e;
}

TEST(Metrics, AccuracyOverJudgedEntries) {
    const auto m = compute_metrics({entry(Verdict::correct, 0.5), entry(Verdict::incorrect, 0.3),
                                    entry(Verdict::unjudged, std::nullopt), entry(Verdict::correct, 0.7)},
                                   2);
    EXPECT_EQ(m.entries, 4u);
    EXPECT_EQ(m.judged, 3u);
    EXPECT_EQ(m.unjudged, 1u);
    EXPECT_EQ(m.correct, 2u);
    EXPECT_NEAR(*m.answer_accuracy, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(*m.answer_accuracy_inclusive, 2.0 / 5.0, 1e-12);
    EXPECT_EQ(m.scored, 3u);
    EXPECT_NEAR(*m.mean_predictive_perplexity, 0.5, 1e-12);
}

TEST(Metrics, NothingJudgedLeavesAccuracyEmpty) {
    const auto m = compute_metrics({entry(Verdict::unjudged, std::nullopt)});
    EXPECT_FALSE(m.answer_accuracy);
    EXPECT_FALSE(m.mean_predictive_perplexity);
    EXPECT_TRUE(m.to_json()["answer_accuracy"].is_null());
    EXPECT_THROW(compute_metrics({}), EmptyInput);
}

TEST(HitRate, BinOfRelativePosition) {
    EXPECT_EQ(hit_rate_bin(1, 1), 5);
    EXPECT_EQ(hit_rate_bin(1, 10), 0);
    EXPECT_EQ(hit_rate_bin(10, 10), 9);
    EXPECT_EQ(hit_rate_bin(1, 2), 2);
    EXPECT_EQ(hit_rate_bin(2, 2), 7);
    EXPECT_THROW(hit_rate_bin(0, 3), std::out_of_range);
    EXPECT_THROW(hit_rate_bin(4, 3), std::out_of_range);
}

TEST(HitRate, MatchesReferenceCounting) {
    std::mt19937_64 rng(11);
    std::vector<std::vector<std::string>> sequences;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> seq;
        const int n = std::uniform_int_distribution<int>(1, 23)(rng);
        for (int j = 0; j < n; ++j) seq.push_back(std::string(1, static_cast<char>('A' + rng() % 3)));
        sequences.push_back(seq);
    }
    const auto report = compute_hit_rates(sequences);
    const auto want = testing::reference_hit_rates(sequences);
    for (int b = 0; b < kHitRateBins; ++b) {
        const auto& got = report.bins[static_cast<std::size_t>(b)].fractions;
        ASSERT_EQ(got.size(), want[static_cast<std::size_t>(b)].size()) << "bin " << b;
        for (const auto& [teacher, fraction] : want[static_cast<std::size_t>(b)]) {
            EXPECT_NEAR(got.at(teacher), fraction, 1e-12) << "bin " << b << " teacher " << teacher;
        }
    }
}

TEST(HitRate, FromEntries) {
    const auto report = compute_hit_rates(std::vector<DatasetEntry>{entry(Verdict::correct, 0.5, {"A", "B"})});
    EXPECT_EQ(report.total_steps, 2);
    EXPECT_EQ(report.bins[2].counts.at("A"), 1);
    EXPECT_EQ(report.bins[7].counts.at("B"), 1);
    EXPECT_EQ(report.bins[0].lower, 0.0);
    EXPECT_EQ(report.bins[9].upper, 100.0);
}

}  // namespace
}  // namespace stepweave
