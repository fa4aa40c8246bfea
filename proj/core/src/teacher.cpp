#include "stepweave/teacher.hpp"

#include <algorithm>
#include <chrono>

#include "stepweave/prompts.hpp"

namespace stepweave {

namespace {

GenerationResult interpret(const CompletionResponse& response, const std::vector<std::string>& stops,
                           std::int64_t latency_ms) {
    GenerationResult out;
    out.text = response.text;
    out.completion_tokens = response.usage.completion_tokens;
    out.prompt_tokens = response.usage.prompt_tokens;
    out.latency_ms = latency_ms;
    if (response.finish_reason == "length") {
        out.finish = FinishReason::length;
    } else if (response.stop_reason &&
               std::find(stops.begin(), stops.end(), *response.stop_reason) != stops.end()) {
        out.finish = FinishReason::stop_sequence;
        out.matched_stop = *response.stop_reason;
    } else if (response.finish_reason == "stop" || response.finish_reason.empty()) {
        out.finish = FinishReason::end_of_text;
    } else {
        throw MalformedResponse("unexpected finish_reason: " + response.finish_reason);
    }
    return out;
}

CompletionResponse timed_complete(Endpoint& endpoint, const CompletionRequest& request, CostLedger& ledger,
                                  Phase phase, std::int64_t& latency_ms) {
    const auto start = std::chrono::steady_clock::now();
    auto response = endpoint.complete(request, ledger, phase);
    latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return response;
}

// Splits `total` over the parts in proportion to their byte length; the
// remainder goes to the last part so the sum is exact.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<std::size_t>& weights) {
    std::vector<std::int64_t> out(weights.size(), 0);
    if (weights.empty()) return out;
    std::size_t sum = 0;
    for (auto w : weights) sum += w;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        out[i] = sum == 0 ? 0 : static_cast<std::int64_t>((static_cast<long double>(total) * weights[i]) / sum);
        assigned += out[i];
    }
    out.back() = total - assigned;
    return out;
}

}  // namespace

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop_sequence: return "stop_sequence";
        case FinishReason::length: return "length";
        case FinishReason::end_of_text: return "end_of_text";
    }
    return "end_of_text";
}

std::string step_prompt(const EndpointSpec& teacher, const Problem& problem, const Trajectory& prefix,
                        int step_number) {
    std::string prompt = prompts::problem_preamble(teacher.system_prompt, problem.question);
    prompt += render_think(prefix, false);
    prompt += forced_step_opening(prefix.layout, step_number, prefix.pending_header);
    return prompt;
}

ProposedStep propose_step(Endpoint& teacher, const Problem& problem, const Trajectory& prefix, int step_number,
                          const StepCaps& caps, const SegmentScheme& scheme, CostLedger& ledger,
                          std::optional<std::uint64_t> seed) {
    if (prefix.finalized) throw AppendToFinalized();
    if (caps.per_step_tokens <= 0 || caps.remaining_think_tokens <= 0) {
        throw std::invalid_argument("step caps must be positive");
    }

    CompletionRequest request;
    request.model = teacher.spec().model;
    request.prompt = step_prompt(teacher.spec(), problem, prefix, step_number);
    request.max_tokens = std::min(caps.per_step_tokens, caps.remaining_think_tokens);
    request.temperature = teacher.spec().temperature;
    request.stop = step_stop_sequences(scheme);
    request.seed = seed;

    std::int64_t latency = 0;
    const auto response = timed_complete(teacher, request, ledger, Phase::step_generation, latency);

    ProposedStep out;
    out.generation = interpret(response, request.stop, latency);
    out.step.index = step_number;
    out.step.header = forced_step_header(prefix.layout, step_number, prefix.pending_header);
    out.step.body = out.generation.text;
    out.step.teacher_id = teacher.id();
    out.step.token_count = std::max<std::int64_t>(0, out.generation.completion_tokens);

    switch (out.generation.finish) {
        case FinishReason::length: out.step.finish = StepFinish::token_cap; break;
        case FinishReason::end_of_text: out.step.finish = StepFinish::think_end; break;
        case FinishReason::stop_sequence:
            if (out.generation.matched_stop == kThinkClose) {
                out.step.finish = StepFinish::think_end;
            } else {
                out.step.finish = StepFinish::boundary;
                if (scheme.kind == SegmentKind::line_break) out.step.body += out.generation.matched_stop;
                if (scheme.kind == SegmentKind::prefix) out.next_pending_header = out.generation.matched_stop;
            }
            break;
    }
    return out;
}

Trajectory continue_to_end(Endpoint& teacher, const Problem& problem, const Trajectory& prefix,
                           std::int64_t think_budget, const SegmentScheme& scheme, CostLedger& ledger,
                           std::optional<std::uint64_t> seed, GenerationResult* generation) {
    if (prefix.finalized) return prefix;
    const int first_new = static_cast<int>(prefix.steps.size()) + 1;
    if (think_budget <= 0) return force_finalize(prefix);

    const std::string opening = forced_step_opening(prefix.layout, first_new, prefix.pending_header);
    CompletionRequest request;
    request.model = teacher.spec().model;
    request.prompt = prompts::problem_preamble(teacher.spec().system_prompt, problem.question) +
                     render_think(prefix, false) + opening;
    request.max_tokens = think_budget;
    request.temperature = teacher.spec().temperature;
    request.stop = {std::string(kThinkClose)};
    request.seed = seed;

    std::int64_t latency = 0;
    const auto response = timed_complete(teacher, request, ledger, Phase::step_generation, latency);
    const auto result = interpret(response, request.stop, latency);
    if (generation) *generation = result;

    const std::string full = render_think(prefix, false) + opening + result.text;
    const auto parsed = parse_think_text(full, scheme);
    if (parsed.steps.size() < prefix.steps.size()) {
        throw MalformedResponse("continuation does not extend the given prefix");
    }

    std::vector<std::size_t> weights;
    for (std::size_t i = prefix.steps.size(); i < parsed.steps.size(); ++i) {
        weights.push_back(parsed.steps[i].header.size() + parsed.steps[i].body.size());
    }
    const auto tokens = apportion(result.completion_tokens, weights);

    Trajectory out = prefix;
    for (std::size_t i = prefix.steps.size(); i < parsed.steps.size(); ++i) {
        const bool last = i + 1 == parsed.steps.size();
        ReasoningStep step;
        step.index = static_cast<int>(i) + 1;
        step.header = parsed.steps[i].header;
        step.body = parsed.steps[i].body;
        step.teacher_id = teacher.id();
        step.token_count = tokens[i - prefix.steps.size()];
        step.finish = StepFinish::boundary;
        if (last) {
            step.finish = result.finish == FinishReason::length ? StepFinish::token_cap : StepFinish::think_end;
        }
        out = append_step(out, std::move(step));
    }
    return out.finalized ? out : force_finalize(out);
}

AnswerResult generate_answer(Endpoint& teacher, const Problem& problem, const Trajectory& finalized,
                             std::int64_t answer_tokens, CostLedger& ledger, std::optional<std::uint64_t> seed) {
    if (!finalized.finalized) throw TrajectoryError("answer generation requires a finalized trajectory");
    if (answer_tokens <= 0) throw std::invalid_argument("answer budget must be positive");

    CompletionRequest request;
    request.model = teacher.spec().model;
    request.prompt =
        prompts::problem_preamble(teacher.spec().system_prompt, problem.question) + render_think(finalized, true);
    request.max_tokens = answer_tokens;
    request.temperature = teacher.spec().temperature;
    request.seed = seed;

    std::int64_t latency = 0;
    const auto response = timed_complete(teacher, request, ledger, Phase::answer_generation, latency);
    AnswerResult out;
    out.generation = interpret(response, request.stop, latency);
    out.text = out.generation.text;
    return out;
}

FullGeneration generate_full(Endpoint& teacher, const Problem& problem, const Budgets& budgets,
                             const SegmentScheme& scheme, CostLedger& ledger, std::optional<std::uint64_t> seed) {
    if (budgets.think_tokens <= 0 || budgets.answer_tokens <= 0) {
        throw std::invalid_argument("budgets must be positive");
    }
    FullGeneration out;
    Trajectory empty;
    empty.problem_id = problem.id;
    empty.layout = scheme.kind;
    out.trajectory = continue_to_end(teacher, problem, empty, budgets.think_tokens, scheme, ledger, seed, &out.think);
    out.answer = generate_answer(teacher, problem, out.trajectory, budgets.answer_tokens, ledger, seed);
    out.trajectory = with_final_answer(out.trajectory, out.answer.text);
    return out;
}

}  // namespace stepweave
