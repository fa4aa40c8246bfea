#pragma once

// Brute-force reference implementations, independent of the library code
// they check.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepweave/mock.hpp"

namespace stepweave::testing {

using Path = std::vector<int>;

struct OracleHypothesis {
    Path path;
    double score = 0.0;
    bool finalized = false;

    bool operator==(const OracleHypothesis&) const = default;
};

/// Beam recursion over the scripted tree: start from `beam` empty slots,
/// extend every open hypothesis by every teacher, rank by score then
/// (slot, teacher), drop repeated paths, keep the best `beam`. One entry per
/// depth until every hypothesis is finalized.
std::vector<std::vector<OracleHypothesis>> oracle_beams(const MockScenario& scenario, const MockProblem& problem,
                                                        int beam);

/// Every path that is a candidate at depth t: nodes at depth t plus
/// finalized nodes above it.
std::vector<OracleHypothesis> frontier(const MockScenario& scenario, const MockProblem& problem, int depth);

/// Best `beam` of `pool` by score when no tie straddles the cut.
std::optional<std::vector<OracleHypothesis>> unambiguous_top(std::vector<OracleHypothesis> pool, int beam);

/// Argmax child at every step (lowest ordinal on ties) until finalized.
Path greedy_chain(const MockScenario& scenario, const MockProblem& problem);

/// exp(mean(logprobs)) written out directly.
double reference_perplexity(const std::vector<double>& logprobs);

/// Per-bin teacher fractions for relative step positions, by direct counting.
std::vector<std::map<std::string, double>> reference_hit_rates(const std::vector<std::vector<std::string>>& sequences);

}  // namespace stepweave::testing
