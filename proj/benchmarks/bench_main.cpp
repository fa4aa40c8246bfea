#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "stepweave/decode.hpp"
#include "stepweave/mock.hpp"
#include "stepweave/segment.hpp"

namespace {

using namespace stepweave;

std::string reasoning_text(int steps) {
    std::string text;
    for (int i = 1; i <= steps; ++i) {
        text += "### Step " + std::to_string(i) + ". Consider the next quantity and wait, recheck it.\n\n";
        text += "The partial result follows from the previous line.\n";
    }
    return text;
}

void BM_SegmentPromptGuided(benchmark::State& state) {
    const auto text = reasoning_text(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(segment(text, SegmentScheme::prompt_guided()));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_SegmentPromptGuided)->Arg(16)->Arg(256);

void BM_SegmentPrefix(benchmark::State& state) {
    const auto text = reasoning_text(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(segment(text, SegmentScheme::prefix()));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_SegmentPrefix)->Arg(16)->Arg(256);

void BM_PerplexityScore(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-4.0, 0.0);
    std::vector<double> lps(static_cast<std::size_t>(state.range(0)));
    for (auto& v : lps) v = dist(rng);
    for (auto _ : state) benchmark::DoNotOptimize(perplexity_score(lps));
}
BENCHMARK(BM_PerplexityScore)->Arg(4)->Arg(1024);

void BM_MockTokenize(benchmark::State& state) {
    const auto text = reasoning_text(64);
    for (auto _ : state) benchmark::DoNotOptimize(mock_tokenize(text));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_MockTokenize);

MockScenario fan_out(int teachers) {
    MockScenario s;
    MockProblem p;
    p.id = "bench";
    p.question = "What is six times seven?";
    p.answer = "42";
    for (int k = 0; k < teachers; ++k) {
        const std::string id(1, static_cast<char>('A' + k));
        s.teachers.push_back({id, "model-" + id, std::nullopt, 0.5});
        MockNode n;
        n.text = " Teacher " + id + " multiplies six by seven.";
        n.score = 0.1 + 0.1 * k;
        p.root.children[id].push_back(n);
    }
    s.problems.push_back(p);
    return s;
}

void BM_DecodeStepInProcess(benchmark::State& state) {
    const int teachers = static_cast<int>(state.range(0));
    const int beam = static_cast<int>(state.range(1));
    auto model = std::make_shared<const MockModel>(fan_out(teachers));
    auto transport = std::make_shared<MockTransport>(model);
    TeacherPool pool;
    for (const auto& t : model->scenario().teachers) {
        EndpointSpec spec;
        spec.id = t.id;
        spec.base_url = "mock://local";
        spec.model = t.model;
        spec.retry.attempts = 0;
        pool.push_back(std::make_shared<Endpoint>(spec, transport));
    }
    ProverSpec prover_spec;
    prover_spec.endpoint.id = "prover";
    prover_spec.endpoint.base_url = "mock://local";
    prover_spec.endpoint.model = model->scenario().prover_model;
    const Problem problem{"bench", "What is six times seven?", "42"};
    DecodeConfig config;
    config.beam_size = beam;
    for (auto _ : state) {
        Prover prover(prover_spec, transport);
        CostLedger ledger;
        benchmark::DoNotOptimize(
            decode_step(problem, initial_beam(problem, config, {}), pool, prover, config, {}, ledger));
    }
}
BENCHMARK(BM_DecodeStepInProcess)->Args({2, 1})->Args({4, 4})->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
