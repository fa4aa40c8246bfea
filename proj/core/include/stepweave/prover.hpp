#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "stepweave/endpoint.hpp"
#include "stepweave/ledger.hpp"
#include "stepweave/prompts.hpp"
#include "stepweave/trajectory.hpp"

namespace stepweave {

enum class Criterion { predictive_perplexity, binary_judgment, random, max_length, external_plugin };

std::string_view to_string(Criterion criterion);
Criterion criterion_from_string(std::string_view text);

/// True for criteria that score a single prefix (usable inside decoding).
bool is_step_level(Criterion criterion);

/// Renders the scoring prompt tail and remembers where the answer sits.
struct ScoringTemplate {
    std::string pattern{prompts::kPerplexityTemplate};

    struct Rendered {
        std::string text;
        std::size_t answer_begin = 0;  // byte offsets of the gold answer in `text`
        std::size_t answer_end = 0;
    };

    /// Throws std::invalid_argument when the pattern lacks `{answer}`.
    Rendered render(std::string_view prefix_text, std::string_view gold_answer) const;
};

struct ProverSpec {
    EndpointSpec endpoint;
    ScoringTemplate scoring_template;
    Criterion criterion = Criterion::predictive_perplexity;
    int n_rollouts = 10;
    std::int64_t judgment_tokens = 64;
    std::uint64_t seed = 0;
    std::string plugin;  // external_plugin name
};

struct ScoreRecord {
    double score = 0.0;
    std::int64_t answer_token_count = 0;
    std::vector<double> token_logprobs;  // answer span, perplexity criterion only
    Criterion criterion = Criterion::predictive_perplexity;
    int rollouts_ok = 0;  // binary judgment
    int rollouts_correct = 0;
};

class SpanNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// exp of the arithmetic mean. Throws EmptyInput on an empty span.
double perplexity_score(std::span<const double> logprobs);

/// Log-probabilities of the tokens overlapping bytes [begin, end) of `text`.
/// `text_offset` values are code-point offsets into `text`. Throws
/// SpanNotFound when the tokens do not cover the range or a logprob is null.
std::vector<double> answer_span_logprobs(const TokenLogprobs& logprobs, std::string_view text, std::size_t begin,
                                         std::size_t end);

/// Step-level scorer supplied from outside (e.g. a process reward model).
class StepScorer {
public:
    virtual ~StepScorer() = default;
    /// Value in [0,1] for `step` appended to `prefix`.
    virtual double score(const Problem& problem, const Trajectory& prefix, const ReasoningStep& step) = 0;
};

using StepScorerFactory = std::function<std::shared_ptr<StepScorer>()>;

void register_step_scorer(const std::string& name, StepScorerFactory factory);
/// Throws std::invalid_argument for unregistered names.
std::shared_ptr<StepScorer> make_step_scorer(const std::string& name);
bool has_step_scorer(const std::string& name);

/// Trajectory-level post-hoc choice for the random and max_length criteria.
/// Throws EmptyInput.
std::size_t select_trajectory(Criterion criterion, std::span<const Trajectory> trajectories, std::uint64_t seed);

/// The meta-prover. Scores are cached per (model, prompt) for the lifetime
/// of the object; concurrent identical requests share one network call.
class Prover {
public:
    Prover(ProverSpec spec, std::shared_ptr<Transport> transport);

    const ProverSpec& spec() const { return spec_; }

    /// Scores `trajectory` with the configured step-level criterion.
    ScoreRecord score(const Problem& problem, const Trajectory& trajectory, CostLedger& ledger);

    ScoreRecord score_predictive_perplexity(const Problem& problem, const Trajectory& prefix, CostLedger& ledger);
    ScoreRecord score_binary_judgment(const Problem& problem, const Trajectory& prefix, int n_rollouts,
                                      CostLedger& ledger);

    std::string scoring_prompt(const Problem& problem, const Trajectory& prefix) const;
    std::string judgment_prompt(const Problem& problem, const Trajectory& prefix) const;

private:
    ScoreRecord cached(const std::string& key, CostLedger& ledger, const std::function<ScoreRecord()>& compute);

    ProverSpec spec_;
    Endpoint endpoint_;
    std::shared_ptr<StepScorer> plugin_;
    std::mutex cache_mutex_;
    std::map<std::string, std::shared_future<ScoreRecord>> cache_;
};

}  // namespace stepweave
