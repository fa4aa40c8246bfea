#include "stepweave/runner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "stepweave/analytics.hpp"
#include "stepweave/parallel.hpp"

namespace stepweave {

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

nlohmann::json ledger_json(const CostLedger& ledger) {
    nlohmann::json j = ledger.to_json();
    const auto total = ledger.total();
    j["total"] = {{"calls", total.calls},
                  {"prompt_tokens", total.prompt_tokens},
                  {"completion_tokens", total.completion_tokens},
                  {"wall_ms", total.wall_ms},
                  {"failures", total.failures},
                  {"retries", total.retries},
                  {"cache_hits", total.cache_hits}};
    return j;
}

}  // namespace

int exit_code_for(std::size_t problems, std::size_t failed) {
    if (failed == 0) return kExitOk;
    return failed >= problems ? kExitTotalFailure : kExitPartial;
}

ProblemRunner::ProblemRunner(const RunConfig& config, std::shared_ptr<Transport> transport) : config_(config) {
    for (const auto& spec : config.teachers) teachers_.push_back(std::make_shared<Endpoint>(spec, transport));
    prover_ = std::make_unique<Prover>(config.prover, transport);
    if (config.integrator) integrator_ = std::make_unique<Endpoint>(*config.integrator, transport);
    if (config.judge) judge_ = std::make_unique<AnswerJudge>(*config.judge, transport);
}

ProblemResult ProblemRunner::run(const Problem& problem) {
    ProblemResult out;
    out.problem = problem;
    const std::string started = config_.record_timestamps ? utc_now() : std::string{};
    const std::string strategy(to_string(config_.strategy));
    const auto& scheme = config_.segmentation;

    std::optional<Trajectory> selected;
    std::vector<std::string> flags;
    try {
        switch (config_.strategy) {
            case Strategy::cord:
            case Strategy::greedy: {
                DecodeConfig decode = config_.decode;
                if (config_.strategy == Strategy::greedy) decode.beam_size = 1;
                auto r = stepweave::decode(problem, teachers_, *prover_, decode, scheme, out.ledger);
                out.trace = r.trace.to_json();
                if (r.trace.hit_max_steps) flags.emplace_back("max_steps");
                if (!r.trace.answer_fallbacks.empty()) flags.emplace_back("answer_fallback");
                if (r.ok) selected = std::move(r.trajectory);
                out.error = r.error;
                break;
            }
            case Strategy::curation: {
                CurationConfig cc;
                cc.rollouts_per_teacher = config_.rollouts_per_teacher;
                cc.budgets = {config_.decode.think_budget_tokens, config_.decode.answer_budget_tokens};
                cc.seed = config_.seed;
                auto r = run_curation(problem, teachers_, *prover_, cc, scheme, out.ledger);
                out.trace = r.trace_json();
                if (r.ok) selected = std::move(r.trajectory);
                out.error = r.error;
                break;
            }
            case Strategy::integration: {
                IntegrationConfig ic;
                ic.budgets = {config_.decode.think_budget_tokens, config_.decode.answer_budget_tokens};
                ic.max_attempts = config_.integration_attempts;
                ic.seed = config_.seed;
                auto r = run_integration(problem, teachers_, *integrator_, *prover_, ic, scheme, out.ledger);
                out.trace = r.trace_json();
                if (r.ok) selected = std::move(r.trajectory);
                out.error = r.error;
                break;
            }
            case Strategy::mcts: {
                auto r = run_mcts(problem, teachers_, *prover_, config_.mcts,
                                  {config_.decode.think_budget_tokens, config_.decode.answer_budget_tokens},
                                  config_.decode, scheme, out.ledger);
                out.trace = r.trace_json();
                if (!r.answer_fallbacks.empty()) flags.emplace_back("answer_fallback");
                if (r.ok && static_cast<int>(r.rollouts.size()) < config_.mcts.n_trajectories) {
                    flags.emplace_back("short_rollouts");
                }
                if (r.ok) selected = std::move(r.trajectory);
                out.error = r.error;
                break;
            }
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }

    if (selected) {
        DatasetEntry entry = make_entry(problem, *selected, strategy);
        entry.verdict = grade_answer(problem, entry.answer_text, judge_.get(), out.ledger);
        entry.flags = std::move(flags);
        if (config_.record_timestamps) {
            entry.started_at = started;
            entry.finished_at = utc_now();
        }
        out.entry = std::move(entry);
        out.ok = true;
    }
    return out;
}

RunSummary run(const RunConfig& config, std::shared_ptr<Transport> transport) {
    if (auto problems = validate_run_config(config); !problems.empty()) throw ConfigError(std::move(problems));
    auto corpus = load_corpus(config.corpus_path);
    std::sort(corpus.begin(), corpus.end(), [](const Problem& a, const Problem& b) { return a.id < b.id; });
    if (!transport) transport = std::make_shared<HttpTransport>();

    std::filesystem::create_directories(config.output_dir);
    ProblemRunner runner(config, transport);

    RunSummary summary;
    summary.problems = corpus.size();
    summary.results.resize(corpus.size());
    parallel_for(corpus.size(), static_cast<std::size_t>(config.parallel_problems),
                 [&](std::size_t i) { summary.results[i] = runner.run(corpus[i]); });

    std::vector<DatasetEntry> entries;
    std::vector<std::string> failed_ids;
    std::string trace_text;
    nlohmann::json per_problem = nlohmann::json::object();
    for (const auto& r : summary.results) {
        summary.ledger.merge(r.ledger);
        per_problem[r.problem.id] = r.ledger.to_json();
        if (r.ok) {
            entries.push_back(*r.entry);
            ++summary.succeeded;
        } else {
            failed_ids.push_back(r.problem.id);
            ++summary.failed;
        }
        trace_text += nlohmann::json{{"schema_version", kSchemaVersion},
                                     {"problem_id", r.problem.id},
                                     {"strategy", to_string(config.strategy)},
                                     {"ok", r.ok},
                                     {"error", r.error},
                                     {"trace", r.trace}}
                          .dump();
        trace_text += '\n';
    }
    summary.exit_code = exit_code_for(summary.problems, summary.failed);

    const auto& dir = config.output_dir;
    write_entries(dir / "entries.jsonl", entries);
    write_file_atomic(dir / "trace.jsonl", trace_text);

    nlohmann::json ledger = {{"schema_version", kSchemaVersion},
                             {"strategy", to_string(config.strategy)},
                             {"phases", ledger_json(summary.ledger)},
                             {"per_problem", std::move(per_problem)}};
    write_file_atomic(dir / "ledger.json", ledger.dump(2) + "\n");

    nlohmann::json metrics;
    if (!entries.empty()) {
        metrics = compute_metrics(entries, summary.failed).to_json();
    } else {
        Metrics empty;
        empty.failed = summary.failed;
        metrics = empty.to_json();
    }
    metrics["strategy"] = to_string(config.strategy);
    metrics["problems"] = summary.problems;
    metrics["failed_problem_ids"] = failed_ids;
    write_file_atomic(dir / "metrics.json", metrics.dump(2) + "\n");

    write_file_atomic(dir / "hitrate.json", compute_hit_rates(entries).to_json().dump(2) + "\n");
    return summary;
}

}  // namespace stepweave
