#include <algorithm>
#include <charconv>

#include "stepweave/answer.hpp"
#include "stepweave/baseline.hpp"
#include "stepweave/parallel.hpp"

namespace stepweave {

namespace {

std::string_view strip_fences(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return text;
    auto body = text.find('\n', open);
    if (body == std::string_view::npos) return text;
    ++body;
    const auto close = text.find("```", body);
    return text.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
}

std::optional<long long> step_number(std::string_view key) {
    constexpr std::string_view prefix = "integrated_step";
    if (!key.starts_with(prefix) || key.size() == prefix.size()) return std::nullopt;
    long long n = 0;
    const auto digits = key.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    return n;
}

}  // namespace

ParsedIntegration parse_integration_reply(std::string_view reply) {
    const std::string_view body = strip_fences(reply);
    const auto open = body.find('{');
    const auto close = body.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw IntegrationParseError("integrator reply has no JSON object");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body.substr(open, close - open + 1));
    } catch (const nlohmann::json::exception& e) {
        throw IntegrationParseError(std::string("integrator reply is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw IntegrationParseError("integrator reply is not a JSON object");

    std::vector<std::pair<long long, std::string>> numbered;
    for (const auto& [key, value] : j.items()) {
        const auto n = step_number(key);
        if (!n) continue;
        if (value.is_string()) {
            numbered.emplace_back(*n, value.get<std::string>());
        } else if (value.is_object() && value.contains("content") && value["content"].is_string()) {
            numbered.emplace_back(*n, value["content"].get<std::string>());
        } else {
            throw IntegrationParseError(key + " has no string content");
        }
    }
    if (numbered.empty()) throw IntegrationParseError("integrator reply has no integrated steps");
    std::sort(numbered.begin(), numbered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < numbered.size(); ++i) {
        if (numbered[i].first == numbered[i - 1].first) throw IntegrationParseError("duplicate integrated step number");
    }

    ParsedIntegration out;
    for (auto& [n, content] : numbered) out.steps.push_back(std::move(content));

    const auto answer = j.find("answer_part");
    if (answer == j.end()) throw IntegrationParseError("integrator reply lacks answer_part");
    if (answer->is_string()) {
        out.answer_part.push_back(answer->get<std::string>());
    } else if (answer->is_array() && !answer->empty()) {
        for (const auto& part : *answer) {
            if (!part.is_string()) throw IntegrationParseError("answer_part entries must be strings");
            out.answer_part.push_back(part.get<std::string>());
        }
    } else {
        throw IntegrationParseError("answer_part must be a string or a non-empty array");
    }
    return out;
}

Trajectory integrated_trajectory(const Problem& problem, const ParsedIntegration& parsed) {
    Trajectory t;
    t.problem_id = problem.id;
    t.layout = SegmentKind::prompt_guided;
    for (std::size_t i = 0; i < parsed.steps.size(); ++i) {
        const std::string& content = parsed.steps[i];
        ReasoningStep step;
        step.index = static_cast<int>(i) + 1;
        if (auto marker = marker_grammar_match(content)) step.header = marker->header;
        step.body = content.substr(step.header.size());
        step.teacher_id = std::string(kIntegratorTeacherId);
        step.finish = i + 1 == parsed.steps.size() ? StepFinish::think_end : StepFinish::boundary;
        t = append_step(t, std::move(step));
    }
    std::string answer;
    for (std::size_t i = 0; i < parsed.answer_part.size(); ++i) {
        if (i > 0) answer += '\n';
        answer += parsed.answer_part[i];
    }
    return with_final_answer(t, std::move(answer));
}

nlohmann::json IntegrationResult::trace_json() const {
    return {{"replies", replies},
            {"attempts", replies.size()},
            {"extracted_answer", extracted_answer ? nlohmann::json(*extracted_answer) : nlohmann::json(nullptr)},
            {"teacher_errors", teacher_errors}};
}

IntegrationResult run_integration(const Problem& problem, const TeacherPool& teachers, Endpoint& integrator,
                                  Prover& prover, const IntegrationConfig& config, const SegmentScheme& scheme,
                                  CostLedger& ledger) {
    if (teachers.empty()) throw std::invalid_argument("integration needs at least one teacher");
    if (config.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");

    IntegrationResult result;
    std::vector<std::optional<FullGeneration>> generations(teachers.size());
    std::vector<std::string> errors(teachers.size());
    parallel_for(teachers.size(), teachers.size(), [&](std::size_t k) {
        try {
            generations[k] = generate_full(*teachers[k], problem, config.budgets, scheme, ledger, config.seed);
        } catch (const std::exception& e) {
            errors[k] = teachers[k]->id() + ": " + e.what();
        }
    });

    std::vector<std::string> solutions;
    for (std::size_t k = 0; k < teachers.size(); ++k) {
        if (generations[k]) {
            const auto& t = generations[k]->trajectory;
            solutions.push_back(render_think(t, true) + "\n" + t.final_answer.value_or(""));
        } else {
            result.teacher_errors.push_back(errors[k]);
        }
    }
    if (solutions.empty()) {
        result.error = "every teacher failed to produce a trajectory";
        return result;
    }

    ChatRequest request;
    request.model = integrator.spec().model;
    request.temperature = integrator.spec().temperature;
    request.max_tokens = config.max_tokens;
    if (!integrator.spec().system_prompt.empty()) {
        request.messages.push_back({"system", integrator.spec().system_prompt});
    }
    request.messages.push_back({"user", prompts::render_integration_prompt(problem.question, solutions)});

    std::optional<ParsedIntegration> parsed;
    std::string last_error;
    for (int attempt = 0; attempt < config.max_attempts && !parsed; ++attempt) {
        ChatResponse response;
        try {
            response = integrator.chat(request, ledger, Phase::step_generation);
        } catch (const EndpointError& e) {
            result.error = std::string("integrator request failed: ") + e.what();
            return result;
        }
        result.replies.push_back(response.content);
        try {
            parsed = parse_integration_reply(response.content);
        } catch (const IntegrationParseError& e) {
            last_error = e.what();
            ledger.record_failure(Phase::step_generation);
            request.messages.push_back({"assistant", response.content});
            request.messages.push_back({"user", std::string(prompts::kJsonReask)});
        }
    }
    if (!parsed) {
        result.error = "integration failed after " + std::to_string(config.max_attempts) + " attempts: " + last_error;
        return result;
    }

    Trajectory merged = integrated_trajectory(problem, *parsed);
    result.extracted_answer = extract_final_answer(*merged.final_answer);
    try {
        merged = with_score(merged, prover.score_predictive_perplexity(problem, merged, ledger).score);
    } catch (const std::exception& e) {
        result.trajectory = merged;
        result.error = std::string("scoring the merged trajectory failed: ") + e.what();
        return result;
    }
    result.trajectory = std::move(merged);
    result.ok = true;
    return result;
}

}  // namespace stepweave
