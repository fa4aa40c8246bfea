#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/baseline.hpp"
#include "stepweave/decode.hpp"
#include "stepweave/prover.hpp"
#include "stepweave/segment.hpp"

namespace stepweave {

struct RunConfig {
    Strategy strategy = Strategy::cord;
    std::filesystem::path corpus_path;
    std::filesystem::path output_dir = "out";
    std::vector<EndpointSpec> teachers;
    ProverSpec prover;
    DecodeConfig decode;
    MctsConfig mcts;
    int rollouts_per_teacher = 4;
    std::optional<EndpointSpec> integrator;
    int integration_attempts = 2;
    std::optional<EndpointSpec> judge;
    SegmentScheme segmentation = SegmentScheme::prompt_guided();
    int parallel_problems = 4;
    std::uint64_t seed = 0;
    bool record_timestamps = false;
};

/// Every problem found while reading or validating a configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Parses the JSON configuration document. Relative paths resolve against
/// `base_dir`. Curation rollouts and MCTS trajectory counts default to the
/// beam size so strategies generate the same number of trajectories.
/// Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Empty when the configuration is usable.
std::vector<std::string> validate_run_config(const RunConfig& config);

nlohmann::json to_json(const EndpointSpec& spec);
EndpointSpec endpoint_spec_from_json(const nlohmann::json& j);

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One JSON object per line: {id, question, answer, answer_mode?}. Line
/// endings inside text fields are normalized to "\n". Throws CorpusError.
std::vector<Problem> load_corpus(const std::filesystem::path& path);
std::vector<Problem> parse_corpus(std::string_view jsonl);

}  // namespace stepweave
