#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/config.hpp"
#include "stepweave/dataset.hpp"
#include "stepweave/ledger.hpp"

namespace stepweave {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPartial = 3;
inline constexpr int kExitTotalFailure = 4;

struct ProblemResult {
    Problem problem;
    bool ok = false;
    std::string error;
    std::optional<DatasetEntry> entry;
    nlohmann::json trace;
    CostLedger ledger;
};

struct RunSummary {
    std::size_t problems = 0;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    int exit_code = kExitOk;
    CostLedger ledger;
    std::vector<ProblemResult> results;  // ordered by problem id
};

/// 0 when nothing failed (including an empty corpus), 3 when some problems
/// failed, 4 when all did.
int exit_code_for(std::size_t problems, std::size_t failed);

/// Runs the configured strategy over the corpus and writes entries.jsonl,
/// trace.jsonl, ledger.json, metrics.json and hitrate.json into the output
/// directory. Configuration and corpus problems throw ConfigError or
/// CorpusError before any request is made. `transport` defaults to HTTP.
RunSummary run(const RunConfig& config, std::shared_ptr<Transport> transport = nullptr);

/// Runs one problem with already constructed clients.
class ProblemRunner {
public:
    ProblemRunner(const RunConfig& config, std::shared_ptr<Transport> transport);
    ProblemResult run(const Problem& problem);

private:
    const RunConfig& config_;
    TeacherPool teachers_;
    std::unique_ptr<Prover> prover_;
    std::unique_ptr<Endpoint> integrator_;
    std::unique_ptr<AnswerJudge> judge_;
};

}  // namespace stepweave
