#include "stepweave/answer.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

#include "stepweave/prompts.hpp"

namespace stepweave {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view strip_code_fence(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return text;
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return text;
    ++body_start;
    const auto close = text.find("```", body_start);
    return text.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::correct: return "correct";
        case Verdict::incorrect: return "incorrect";
        case Verdict::unjudged: return "unjudged";
    }
    return "unjudged";
}

Verdict verdict_from_string(std::string_view text) {
    if (text == "correct") return Verdict::correct;
    if (text == "incorrect") return Verdict::incorrect;
    if (text == "unjudged") return Verdict::unjudged;
    throw std::invalid_argument("unknown verdict: " + std::string(text));
}

std::optional<std::string> extract_boxed(std::string_view text) {
    constexpr std::string_view marker = "\\boxed{";
    std::size_t search_end = text.size();
    while (true) {
        const auto pos = text.rfind(marker, search_end);
        if (pos == std::string_view::npos) return std::nullopt;
        int depth = 1;
        std::size_t i = pos + marker.size();
        for (; i < text.size() && depth > 0; ++i) {
            if (text[i] == '{') ++depth;
            else if (text[i] == '}') --depth;
        }
        if (depth == 0) {
            const std::size_t begin = pos + marker.size();
            return std::string(text.substr(begin, i - 1 - begin));
        }
        if (pos == 0) return std::nullopt;
        search_end = pos - 1;
    }
}

std::optional<std::string> extract_final_answer(std::string_view text) {
    if (auto boxed = extract_boxed(text)) return boxed;
    constexpr std::string_view phrase = "final answer is";
    const auto lowered = ascii_lower(text);
    const auto pos = lowered.rfind(phrase);
    if (pos == std::string::npos) return std::nullopt;
    std::string_view rest = text.substr(pos + phrase.size());
    if (rest.starts_with(':')) rest.remove_prefix(1);
    return std::string(rest);
}

std::string normalize_answer(std::string_view text) {
    std::string collapsed;
    bool pending_space = false;
    for (char c : text) {
        if (c == '$') continue;
        if (is_space(c)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed += ' ';
        pending_space = false;
        collapsed += c;
    }
    while (!collapsed.empty() && (collapsed.back() == '.' || collapsed.back() == ' ')) collapsed.pop_back();
    return ascii_lower(collapsed);
}

bool answers_match(std::string_view answer_text, std::string_view gold) {
    const auto extracted = extract_final_answer(answer_text);
    const std::string candidate = normalize_answer(extracted ? std::string_view(*extracted) : answer_text);
    return !candidate.empty() && candidate == normalize_answer(gold);
}

bool parse_judge_reply(std::string_view reply) {
    std::string_view body = strip_code_fence(reply);
    const auto open = body.find('{');
    const auto close = body.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw JudgeParseError("judge reply has no JSON object");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body.substr(open, close - open + 1));
    } catch (const nlohmann::json::exception& e) {
        throw JudgeParseError(std::string("judge reply is not valid JSON: ") + e.what());
    }
    const auto it = j.find("correctness");
    if (it == j.end()) throw JudgeParseError("judge reply lacks \"correctness\"");
    if (it->is_boolean()) return it->get<bool>();
    if (!it->is_string()) throw JudgeParseError("\"correctness\" is not a string");
    const auto value = ascii_lower(it->get<std::string>());
    if (value == "true") return true;
    if (value == "false") return false;
    throw JudgeParseError("\"correctness\" must be True or False, got " + it->get<std::string>());
}

AnswerJudge::AnswerJudge(EndpointSpec spec, std::shared_ptr<Transport> transport, int max_attempts)
    : endpoint_(std::move(spec), std::move(transport)), max_attempts_(max_attempts < 1 ? 1 : max_attempts) {}

Verdict AnswerJudge::judge(const Problem& problem, std::string_view answer_text, CostLedger& ledger) {
    ChatRequest request;
    request.model = endpoint_.spec().model;
    request.temperature = endpoint_.spec().temperature;
    request.max_tokens = 256;
    if (!endpoint_.spec().system_prompt.empty()) {
        request.messages.push_back({"system", endpoint_.spec().system_prompt});
    }
    request.messages.push_back(
        {"user", prompts::render_judge_prompt(problem.question, problem.gold_answer, answer_text)});

    for (int attempt = 0; attempt < max_attempts_; ++attempt) {
        ChatResponse response;
        try {
            response = endpoint_.chat(request, ledger, Phase::meta_prover_evaluation);
        } catch (const EndpointError&) {
            return Verdict::unjudged;
        }
        try {
            return parse_judge_reply(response.content) ? Verdict::correct : Verdict::incorrect;
        } catch (const JudgeParseError&) {
            request.messages.push_back({"assistant", response.content});
            request.messages.push_back({"user", std::string(prompts::kJsonReask)});
        }
    }
    return Verdict::unjudged;
}

Verdict grade_answer(const Problem& problem, std::string_view answer_text, AnswerJudge* judge, CostLedger& ledger) {
    if (problem.answer_mode == AnswerMode::closed_ended) {
        return answers_match(answer_text, problem.gold_answer) ? Verdict::correct : Verdict::incorrect;
    }
    if (!judge) return Verdict::unjudged;
    return judge->judge(problem, answer_text, ledger);
}

}  // namespace stepweave
