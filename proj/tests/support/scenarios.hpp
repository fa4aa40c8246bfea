#pragma once

// Scripted scenarios and in-process harnesses shared by unit and acceptance
// tests.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stepweave/decode.hpp"
#include "stepweave/mock.hpp"
#include "stepweave/prover.hpp"

namespace stepweave::testing {

/// Endpoint description for the in-process mock: no retries, no backoff.
EndpointSpec mock_endpoint(const std::string& id, const std::string& model, double temperature = 0.0);

struct Harness {
    std::shared_ptr<const MockModel> model;
    std::shared_ptr<MockTransport> transport;
    TeacherPool teachers;
    std::unique_ptr<Prover> prover;

    const MockScenario& scenario() const { return model->scenario(); }
    Problem problem(std::size_t i = 0) const;
};

Harness make_harness(MockScenario scenario, Criterion criterion = Criterion::predictive_perplexity,
                     MockTransport::Fault fault = {});

struct TreeOptions {
    int teachers = 3;
    int depth = 4;
    double early_finish = 0.0;  // chance an interior node closes the reasoning
    int root_variants = 1;      // sampled variants per teacher at the root
    double score_quantum = 0.0; // round scores to multiples of this (creates ties)
};

/// Every node has one child per teacher (`root_variants` at the root) until
/// `depth`, where the reasoning ends. Step texts are unique across the tree.
MockScenario random_tree_scenario(std::uint64_t seed, const TreeOptions& options);

/// Teacher ids used by the builders: "A", "B", "C", ...
std::string teacher_name(int ordinal);

/// Node reached by following one teacher ordinal per step (variant 0).
const MockNode& node_at(const MockScenario& scenario, const MockProblem& problem, const std::vector<int>& path);

/// Teacher ordinal of every step of `t`.
std::vector<int> teacher_path(const MockScenario& scenario, const Trajectory& t);

/// Two teachers that never emit a stop sequence.
MockScenario endless_scenario();

/// Small hand-sized tree with known rewards for MCTS bookkeeping.
MockScenario mcts_scenario();

/// Three problems with two teachers, used for end-to-end runs.
MockScenario corpus_scenario();

/// Writes the corpus of `scenario` as JSONL.
std::string corpus_jsonl(const MockScenario& scenario);

}  // namespace stepweave::testing
