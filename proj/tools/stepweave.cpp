#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <optional>
#include <thread>

#include "stepweave/analytics.hpp"
#include "stepweave/config.hpp"
#include "stepweave/mock.hpp"
#include "stepweave/runner.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallel;
    std::string output_dir;
    std::string strategy;
};

stepweave::RunConfig load_with_overrides(const GlobalFlags& flags) {
    if (flags.config.empty()) throw stepweave::ConfigError({"--config is required"});
    auto config = stepweave::load_run_config(flags.config);
    if (flags.seed) {
        config.seed = *flags.seed;
        config.decode.seed = config.mcts.seed = config.prover.seed = *flags.seed;
    }
    if (flags.parallel) config.parallel_problems = *flags.parallel;
    if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
    if (!flags.strategy.empty()) {
        try {
            config.strategy = stepweave::strategy_from_string(flags.strategy);
        } catch (const std::invalid_argument& e) {
            throw stepweave::ConfigError({e.what()});
        }
    }
    return config;
}

std::filesystem::path entries_path(const std::string& given, const GlobalFlags& flags) {
    if (!given.empty()) return given;
    if (!flags.output_dir.empty()) return std::filesystem::path(flags.output_dir) / "entries.jsonl";
    if (!flags.config.empty()) return stepweave::load_run_config(flags.config).output_dir / "entries.jsonl";
    return std::filesystem::path("out") / "entries.jsonl";
}

int cmd_generate(const GlobalFlags& flags) {
    const auto config = load_with_overrides(flags);
    const auto summary = stepweave::run(config);
    std::cerr << "problems: " << summary.problems << ", succeeded: " << summary.succeeded
              << ", failed: " << summary.failed << ", output: " << config.output_dir.string() << "\n";
    return summary.exit_code;
}

int cmd_validate(const GlobalFlags& flags) {
    const auto config = load_with_overrides(flags);
    auto problems = stepweave::validate_run_config(config);
    if (problems.empty()) {
        try {
            const auto corpus = stepweave::load_corpus(config.corpus_path);
            std::cout << "ok: " << config.teachers.size() << " teachers, " << corpus.size() << " problems, strategy "
                      << stepweave::to_string(config.strategy) << "\n";
            return stepweave::kExitOk;
        } catch (const stepweave::CorpusError& e) {
            problems.emplace_back(e.what());
        }
    }
    throw stepweave::ConfigError(problems);
}

int cmd_mock_serve(const std::string& scenario_path, const std::string& host, int port) {
    auto model = std::make_shared<const stepweave::MockModel>(stepweave::MockScenario::load(scenario_path));
    stepweave::MockServer server(model, host, port);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << server.base_url() << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return stepweave::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative step-wise reasoning-trajectory synthesis over teacher endpoints"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config, "Run configuration (JSON)");
    app.add_option("--seed", flags.seed, "Override the run seed");
    app.add_option("--parallel", flags.parallel, "Problems processed concurrently")->check(CLI::PositiveNumber);
    app.add_option("--output-dir", flags.output_dir, "Directory for run outputs");
    app.add_option("--strategy", flags.strategy, "cord, greedy, curation, integration or mcts");

    auto* generate = app.add_subcommand("generate", "Synthesize trajectories for every problem in the corpus");
    auto* validate = app.add_subcommand("validate-config", "Check a configuration and its corpus without any requests");

    std::string entries_in;
    std::size_t failed = 0;
    auto* metrics = app.add_subcommand("metrics", "Answer accuracy and mean predictive perplexity of entries");
    metrics->add_option("entries", entries_in, "entries.jsonl (default: <output-dir>/entries.jsonl)");
    metrics->add_option("--failed", failed, "Problems without an entry, for the inclusive accuracy");

    auto* hitrate = app.add_subcommand("hitrate", "Teacher selection hit rates by relative step position");
    hitrate->add_option("entries", entries_in, "entries.jsonl (default: <output-dir>/entries.jsonl)");

    std::string sft_out;
    auto* export_sft = app.add_subcommand("export-sft", "Write question/response pairs for fine-tuning");
    export_sft->add_option("entries", entries_in, "entries.jsonl (default: <output-dir>/entries.jsonl)");
    export_sft->add_option("--out", sft_out, "Output JSONL path")->required();

    std::string scenario;
    std::string host = "127.0.0.1";
    int port = 0;
    auto* mock = app.add_subcommand("mock-serve", "Serve a scripted scenario over the completions protocol");
    mock->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    mock->add_option("--host", host, "Bind address");
    mock->add_option("--port", port, "Port (0 picks a free one)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) return cmd_generate(flags);
        if (*validate) return cmd_validate(flags);
        if (*metrics) {
            const auto entries = stepweave::read_entries(entries_path(entries_in, flags));
            if (entries.empty()) {
                stepweave::Metrics m;
                m.failed = failed;
                std::cout << m.to_json().dump(2) << "\n";
            } else {
                std::cout << stepweave::compute_metrics(entries, failed).to_json().dump(2) << "\n";
            }
            return stepweave::kExitOk;
        }
        if (*hitrate) {
            const auto entries = stepweave::read_entries(entries_path(entries_in, flags));
            std::cout << stepweave::compute_hit_rates(entries).to_json().dump(2) << "\n";
            return stepweave::kExitOk;
        }
        if (*export_sft) {
            stepweave::export_sft(stepweave::read_entries(entries_path(entries_in, flags)), sft_out);
            return stepweave::kExitOk;
        }
        if (*mock) return cmd_mock_serve(scenario, host, port);
    } catch (const stepweave::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return stepweave::kExitConfigError;
    } catch (const stepweave::CorpusError& e) {
        std::cerr << e.what() << "\n";
        return stepweave::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return stepweave::kExitTotalFailure;
    }
    return stepweave::kExitOk;
}
