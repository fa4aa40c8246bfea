#include <gtest/gtest.h>

#include <algorithm>

#include "stepweave/config.hpp"

namespace stepweave {
namespace {

using nlohmann::json;

json minimal() {
    return json::parse(R"({
        "strategy": "cord",
        "corpus": "corpus.jsonl",
        "output_dir": "out",
        "teachers": [
            {"id": "A", "base_url": "http://localhost:1", "model": "a"},
            {"id": "B", "base_url": "http://localhost:1", "model": "b"}
        ],
        "prover": {"endpoint": {"id": "prover", "base_url": "http://localhost:1", "model": "p"}},
        "decode": {"beam_size": 3}
    })");
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

TEST(Config, ParsesMinimalDocument) {
    const auto c = parse_run_config(minimal(), "/work");
    EXPECT_EQ(c.strategy, Strategy::cord);
    EXPECT_EQ(c.corpus_path, std::filesystem::path("/work/corpus.jsonl"));
    EXPECT_EQ(c.output_dir, std::filesystem::path("/work/out"));
    ASSERT_EQ(c.teachers.size(), 2u);
    EXPECT_EQ(c.teachers[1].model, "b");
    EXPECT_EQ(c.decode.beam_size, 3);
    EXPECT_EQ(c.prover.criterion, Criterion::predictive_perplexity);
    EXPECT_TRUE(validate_run_config(c).empty());
}

TEST(Config, TrajectoryCountsDefaultToBeamSize) {
    auto c = parse_run_config(minimal());
    EXPECT_EQ(c.rollouts_per_teacher, 3);
    EXPECT_EQ(c.mcts.n_trajectories, 3);
    auto j = minimal();
    j["curation"] = {{"rollouts_per_teacher", 5}};
    EXPECT_EQ(parse_run_config(j).rollouts_per_teacher, 5);
}

TEST(Config, AbsolutePathsAreKept) {
    auto j = minimal();
    j["corpus"] = "/data/c.jsonl";
    EXPECT_EQ(parse_run_config(j, "/work").corpus_path, std::filesystem::path("/data/c.jsonl"));
}

TEST(Config, SeedPropagates) {
    auto j = minimal();
    j["seed"] = 17;
    const auto c = parse_run_config(j);
    EXPECT_EQ(c.decode.seed, 17u);
    EXPECT_EQ(c.prover.seed, 17u);
    EXPECT_EQ(c.mcts.seed, 17u);
}

TEST(Config, UnknownKeysAreRejected) {
    auto j = minimal();
    j["beam"] = 4;
    j["decode"]["width"] = 2;
    try {
        parse_run_config(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e.problems(), "beam"));
    }
    auto nested = minimal();
    nested["decode"]["width"] = 2;
    EXPECT_THROW(parse_run_config(nested), ConfigError);
}

TEST(Config, WrongTypesAreReported) {
    auto j = minimal();
    j["decode"]["beam_size"] = "wide";
    EXPECT_THROW(parse_run_config(j), ConfigError);
    auto s = minimal();
    s["strategy"] = "beam";
    EXPECT_THROW(parse_run_config(s), ConfigError);
}

TEST(Config, ValidationCollectsEveryProblem) {
    auto j = minimal();
    j["teachers"][1]["id"] = "A";
    j["decode"]["beam_size"] = 0;
    j["prover"]["criterion"] = "max_length";
    j["parallel_problems"] = 0;
    const auto problems = validate_run_config(parse_run_config(j));
    EXPECT_TRUE(mentions(problems, "duplicate id"));
    EXPECT_TRUE(mentions(problems, "beam_size"));
    EXPECT_TRUE(mentions(problems, "cannot drive strategy cord"));
    EXPECT_TRUE(mentions(problems, "parallel_problems"));
}

TEST(Config, IntegrationNeedsIntegrator) {
    auto j = minimal();
    j["strategy"] = "integration";
    EXPECT_TRUE(mentions(validate_run_config(parse_run_config(j)), "integration.integrator"));
}

TEST(Config, PrefixSchemeNeedsTerms) {
    auto j = minimal();
    j["segmentation"] = {{"scheme", "prefix"}, {"prefix_terms", json::array()}};
    EXPECT_TRUE(mentions(validate_run_config(parse_run_config(j)), "prefix_terms"));
}

TEST(Config, EndpointJsonRoundTrip) {
    EndpointSpec s;
    s.id = "A";
    s.base_url = "http://x";
    s.model = "m";
    s.temperature = 0.7;
    s.api_key_env = "KEY";
    s.retry.attempts = 4;
    const auto again = endpoint_spec_from_json(to_json(s));
    EXPECT_EQ(to_json(again), to_json(s));
}

TEST(Corpus, ParsesLinesAndNormalizesNewlines) {
    const auto problems = parse_corpus(
        "{\"id\": \"p1\", \"question\": \"a\\r\\nb\", \"answer\": \"3\"}\n\n"
        "{\"id\": 7, \"question\": \"q\", \"answer\": \"x\", \"answer_mode\": \"open_ended\"}\n");
    ASSERT_EQ(problems.size(), 2u);
    EXPECT_EQ(problems[0].question, "a\nb");
    EXPECT_EQ(problems[1].id, "7");
    EXPECT_EQ(problems[1].answer_mode, AnswerMode::open_ended);
}

TEST(Corpus, RejectsBadLines) {
    EXPECT_THROW(parse_corpus("not json\n"), CorpusError);
    EXPECT_THROW(parse_corpus("{\"id\": \"p\", \"question\": \"q\"}\n"), CorpusError);
    EXPECT_THROW(parse_corpus("{\"id\": \"p\", \"question\": \"q\", \"answer\": \"\"}\n"), CorpusError);
    EXPECT_THROW(parse_corpus("{\"id\": \"p\", \"question\": \"q\", \"answer\": \"1\"}\n"
                              "{\"id\": \"p\", \"question\": \"q\", \"answer\": \"1\"}\n"),
                 CorpusError);
    EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), CorpusError);
}

}  // namespace
}  // namespace stepweave
