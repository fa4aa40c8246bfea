#include "stepweave/prover.hpp"

#include <cmath>
#include <random>

#include "stepweave/answer.hpp"

namespace stepweave {

namespace {

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, StepScorerFactory>& registry() {
    static std::map<std::string, StepScorerFactory> r;
    return r;
}

}  // namespace

std::string_view to_string(Criterion criterion) {
    switch (criterion) {
        case Criterion::predictive_perplexity: return "predictive_perplexity";
        case Criterion::binary_judgment: return "binary_judgment";
        case Criterion::random: return "random";
        case Criterion::max_length: return "max_length";
        case Criterion::external_plugin: return "external_plugin";
    }
    return "predictive_perplexity";
}

Criterion criterion_from_string(std::string_view text) {
    if (text == "predictive_perplexity") return Criterion::predictive_perplexity;
    if (text == "binary_judgment") return Criterion::binary_judgment;
    if (text == "random") return Criterion::random;
    if (text == "max_length") return Criterion::max_length;
    if (text == "external_plugin") return Criterion::external_plugin;
    throw std::invalid_argument("unknown prover criterion: " + std::string(text));
}

bool is_step_level(Criterion criterion) {
    return criterion == Criterion::predictive_perplexity || criterion == Criterion::binary_judgment ||
           criterion == Criterion::external_plugin;
}

ScoringTemplate::Rendered ScoringTemplate::render(std::string_view prefix_text, std::string_view gold_answer) const {
    constexpr std::string_view prefix_slot = "{prefix}";
    constexpr std::string_view answer_slot = "{answer}";
    if (pattern.find(answer_slot) == std::string::npos) {
        throw std::invalid_argument("scoring template lacks {answer}");
    }
    Rendered out;
    std::string_view rest = pattern;
    bool answer_placed = false;
    while (!rest.empty()) {
        if (rest.starts_with(prefix_slot)) {
            out.text += prefix_text;
            rest.remove_prefix(prefix_slot.size());
        } else if (rest.starts_with(answer_slot)) {
            if (!answer_placed) out.answer_begin = out.text.size();
            out.text += gold_answer;
            if (!answer_placed) out.answer_end = out.text.size();
            answer_placed = true;
            rest.remove_prefix(answer_slot.size());
        } else {
            out.text += rest.front();
            rest.remove_prefix(1);
        }
    }
    return out;
}

double perplexity_score(std::span<const double> logprobs) {
    if (logprobs.empty()) throw EmptyInput("perplexity of an empty answer span");
    double sum = 0.0;
    for (double lp : logprobs) sum += lp;
    return std::exp(sum / static_cast<double>(logprobs.size()));
}

std::vector<double> answer_span_logprobs(const TokenLogprobs& logprobs, std::string_view text, std::size_t begin,
                                         std::size_t end) {
    if (begin >= end || end > text.size()) throw SpanNotFound("answer range outside the echoed text");
    const std::size_t n = logprobs.tokens.size();
    if (logprobs.text_offset.size() != n || logprobs.token_logprobs.size() != n) {
        throw SpanNotFound("logprob arrays have inconsistent lengths");
    }
    std::vector<double> out;
    std::size_t covered_from = std::string_view::npos;
    std::size_t covered_to = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (logprobs.text_offset[i] < 0) throw SpanNotFound("negative text_offset");
        const std::size_t tb = utf8_byte_offset(text, static_cast<std::size_t>(logprobs.text_offset[i]));
        const std::size_t te = tb + logprobs.tokens[i].size();
        if (tb >= end || te <= begin) continue;
        if (!logprobs.token_logprobs[i]) throw SpanNotFound("answer token without a logprob");
        if (covered_from == std::string_view::npos) covered_from = tb;
        else if (tb > covered_to) throw SpanNotFound("gap between answer tokens");
        covered_to = std::max(covered_to, te);
        out.push_back(*logprobs.token_logprobs[i]);
    }
    if (out.empty() || covered_from > begin || covered_to < end) {
        throw SpanNotFound("tokens do not cover the answer span");
    }
    return out;
}

void register_step_scorer(const std::string& name, StepScorerFactory factory) {
    std::lock_guard lock(registry_mutex());
    registry()[name] = std::move(factory);
}

std::shared_ptr<StepScorer> make_step_scorer(const std::string& name) {
    std::lock_guard lock(registry_mutex());
    const auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("no step scorer registered as '" + name + "'");
    return it->second();
}

bool has_step_scorer(const std::string& name) {
    std::lock_guard lock(registry_mutex());
    return registry().contains(name);
}

std::size_t select_trajectory(Criterion criterion, std::span<const Trajectory> trajectories, std::uint64_t seed) {
    if (trajectories.empty()) throw EmptyInput("no trajectories to select from");
    switch (criterion) {
        case Criterion::random: {
            std::mt19937_64 rng(seed);
            return static_cast<std::size_t>(rng() % trajectories.size());
        }
        case Criterion::max_length: {
            std::size_t best = 0;
            for (std::size_t i = 1; i < trajectories.size(); ++i) {
                if (trajectories[i].think_tokens() > trajectories[best].think_tokens()) best = i;
            }
            return best;
        }
        default:
            throw std::invalid_argument("criterion " + std::string(to_string(criterion)) +
                                        " is not a trajectory-level selector");
    }
}

Prover::Prover(ProverSpec spec, std::shared_ptr<Transport> transport)
    : spec_(std::move(spec)), endpoint_(spec_.endpoint, std::move(transport)) {
    if (spec_.criterion == Criterion::external_plugin) plugin_ = make_step_scorer(spec_.plugin);
}

std::string Prover::scoring_prompt(const Problem& problem, const Trajectory& prefix) const {
    return prompts::problem_preamble(spec_.endpoint.system_prompt, problem.question) +
           spec_.scoring_template.render(render_think(prefix, false), problem.gold_answer).text;
}

std::string Prover::judgment_prompt(const Problem& problem, const Trajectory& prefix) const {
    return prompts::problem_preamble(spec_.endpoint.system_prompt, problem.question) + render_think(prefix, false) +
           std::string(prompts::kBinaryJudgmentSuffix);
}

ScoreRecord Prover::cached(const std::string& key, CostLedger& ledger, const std::function<ScoreRecord()>& compute) {
    std::promise<ScoreRecord> promise;
    std::shared_future<ScoreRecord> future;
    bool owner = false;
    {
        std::lock_guard lock(cache_mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end()) {
            future = it->second;
        } else {
            future = promise.get_future().share();
            cache_.emplace(key, future);
            owner = true;
        }
    }
    if (!owner) {
        ledger.record_cache_hit(Phase::meta_prover_evaluation);
        return future.get();
    }
    try {
        promise.set_value(compute());
    } catch (...) {
        {
            // Failures are not cached so a later request may retry.
            std::lock_guard lock(cache_mutex_);
            cache_.erase(key);
        }
        promise.set_exception(std::current_exception());
    }
    return future.get();
}

ScoreRecord Prover::score(const Problem& problem, const Trajectory& trajectory, CostLedger& ledger) {
    switch (spec_.criterion) {
        case Criterion::predictive_perplexity: return score_predictive_perplexity(problem, trajectory, ledger);
        case Criterion::binary_judgment:
            return score_binary_judgment(problem, trajectory, spec_.n_rollouts, ledger);
        case Criterion::external_plugin: {
            if (trajectory.steps.empty()) throw std::invalid_argument("plugin scoring needs at least one step");
            Trajectory parent = trajectory;
            parent.steps.pop_back();
            parent.finalized = false;
            parent.score.reset();
            ScoreRecord record;
            record.criterion = Criterion::external_plugin;
            record.score = plugin_->score(problem, parent, trajectory.steps.back());
            if (!(record.score >= 0.0 && record.score <= 1.0)) {
                throw std::out_of_range("step scorer returned a value outside [0,1]");
            }
            return record;
        }
        case Criterion::random:
        case Criterion::max_length: break;
    }
    throw std::invalid_argument("criterion " + std::string(to_string(spec_.criterion)) + " cannot score a prefix");
}

ScoreRecord Prover::score_predictive_perplexity(const Problem& problem, const Trajectory& prefix,
                                                CostLedger& ledger) {
    if (problem.gold_answer.empty()) throw std::invalid_argument("gold answer must be non-empty");
    const std::string preamble = prompts::problem_preamble(spec_.endpoint.system_prompt, problem.question);
    const auto rendered = spec_.scoring_template.render(render_think(prefix, false), problem.gold_answer);
    const std::string prompt = preamble + rendered.text;

    return cached(spec_.endpoint.model + '\0' + prompt, ledger, [&] {
        CompletionRequest request;
        request.model = spec_.endpoint.model;
        request.prompt = prompt;
        request.max_tokens = 0;
        request.temperature = 0.0;
        request.logprobs = 1;
        request.echo = true;
        const auto response = endpoint_.complete(request, ledger, Phase::meta_prover_evaluation);
        if (!response.logprobs) throw MalformedResponse("scoring response carries no logprobs");
        // Offsets are relative to the echoed text, which starts with the prompt.
        const auto lps = answer_span_logprobs(*response.logprobs, response.text, preamble.size() + rendered.answer_begin,
                                              preamble.size() + rendered.answer_end);
        ScoreRecord record;
        record.criterion = Criterion::predictive_perplexity;
        record.token_logprobs = lps;
        record.answer_token_count = static_cast<std::int64_t>(lps.size());
        record.score = perplexity_score(lps);
        return record;
    });
}

ScoreRecord Prover::score_binary_judgment(const Problem& problem, const Trajectory& prefix, int n_rollouts,
                                          CostLedger& ledger) {
    if (n_rollouts < 1) throw std::invalid_argument("n_rollouts must be at least 1");
    const std::string prompt = judgment_prompt(problem, prefix);
    const std::string key = spec_.endpoint.model + '\0' + std::to_string(n_rollouts) + '\0' + prompt;
    return cached(key, ledger, [&] {
        ScoreRecord record;
        record.criterion = Criterion::binary_judgment;
        for (int r = 0; r < n_rollouts; ++r) {
            CompletionRequest request;
            request.model = spec_.endpoint.model;
            request.prompt = prompt;
            request.max_tokens = spec_.judgment_tokens;
            request.temperature = spec_.endpoint.temperature;
            request.seed = spec_.seed + static_cast<std::uint64_t>(r);
            try {
                const auto response = endpoint_.complete(request, ledger, Phase::meta_prover_evaluation);
                ++record.rollouts_ok;
                if (answers_match(response.text, problem.gold_answer)) ++record.rollouts_correct;
            } catch (const EndpointError&) {
            } catch (const MalformedResponse&) {
                ledger.record_failure(Phase::meta_prover_evaluation);
            }
        }
        if (record.rollouts_ok == 0) throw EndpointError("every judgment rollout failed", 0, false);
        record.score = static_cast<double>(record.rollouts_correct) / record.rollouts_ok;
        return record;
    });
}

}  // namespace stepweave
