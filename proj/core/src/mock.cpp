#include "stepweave/mock.hpp"

#include <httplib.h>

#include <cctype>
#include <cmath>
#include <fstream>

#include "stepweave/endpoint.hpp"
#include "stepweave/prompts.hpp"
#include "stepweave/segment.hpp"

namespace stepweave {

using nlohmann::json;

namespace {

// Log-probability the mock reports for an answer token of a zero-score node;
// exp() of it underflows to exactly 0.0.
constexpr double kZeroScoreLogprob = -1000.0;
constexpr double kContextLogprob = -1.0;

bool is_ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::size_t utf8_sequence_length(unsigned char lead) {
    if (lead >= 0xF0) return 4;
    if (lead >= 0xE0) return 3;
    if (lead >= 0xC0) return 2;
    return 1;
}

MockNode node_from_json(const json& j) {
    MockNode n;
    n.text = j.value("text", std::string{});
    n.finish = step_finish_from_string(j.value("finish", std::string("boundary")));
    n.score = j.value("score", 0.5);
    if (auto it = j.find("answer_logprobs"); it != j.end()) n.answer_logprobs = it->get<std::vector<double>>();
    if (auto it = j.find("answers"); it != j.end()) n.answers = it->get<std::map<std::string, std::string>>();
    if (auto it = j.find("judge"); it != j.end()) n.judge = it->get<std::vector<std::string>>();
    if (auto it = j.find("children"); it != j.end()) {
        for (const auto& [teacher, value] : it->items()) {
            auto& variants = n.children[teacher];
            if (value.is_array()) {
                for (const auto& v : value) variants.push_back(node_from_json(v));
            } else {
                variants.push_back(node_from_json(value));
            }
        }
    }
    return n;
}

json node_to_json(const MockNode& n) {
    json j = {{"text", n.text}, {"finish", to_string(n.finish)}, {"score", n.score}};
    if (n.answer_logprobs) j["answer_logprobs"] = *n.answer_logprobs;
    if (!n.answers.empty()) j["answers"] = n.answers;
    if (!n.judge.empty()) j["judge"] = n.judge;
    if (!n.children.empty()) {
        json children = json::object();
        for (const auto& [teacher, variants] : n.children) {
            json arr = json::array();
            for (const auto& v : variants) arr.push_back(node_to_json(v));
            children[teacher] = std::move(arr);
        }
        j["children"] = std::move(children);
    }
    return j;
}

void validate_node(const MockNode& n, const std::string& where) {
    if (!(n.score >= 0.0 && n.score <= 1.0)) throw std::invalid_argument(where + ": score outside [0,1]");
    if (n.answer_logprobs) {
        for (double lp : *n.answer_logprobs) {
            if (lp > 0.0) throw std::invalid_argument(where + ": answer_logprobs must be <= 0");
        }
    }
    for (const auto& [teacher, variants] : n.children) {
        if (variants.empty()) throw std::invalid_argument(where + ": empty variant list for " + teacher);
        for (std::size_t i = 0; i < variants.size(); ++i) {
            validate_node(variants[i], where + "/" + teacher + "[" + std::to_string(i) + "]");
        }
    }
}

struct Limited {
    std::string text;
    std::string finish_reason;
    std::optional<std::string> stop_reason;
};

Limited apply_limits(const std::string& stream, const std::vector<std::string>& stops, std::int64_t max_tokens) {
    std::size_t cut = stream.size();
    std::optional<std::string> matched;
    for (const auto& stop : stops) {
        if (stop.empty()) continue;
        const auto pos = stream.find(stop);
        if (pos != std::string::npos && pos < cut) {
            cut = pos;
            matched = stop;
        }
    }
    Limited out;
    const std::string candidate = stream.substr(0, cut);
    const auto tokens = mock_tokenize(candidate);
    const auto limit = static_cast<std::size_t>(std::max<std::int64_t>(0, max_tokens));
    if (tokens.size() <= limit) {
        out.text = candidate;
        out.finish_reason = "stop";
        out.stop_reason = matched;
    } else {
        out.text = limit == 0 ? std::string{} : candidate.substr(0, tokens[limit - 1].end);
        out.finish_reason = "length";
    }
    return out;
}

std::string repeat_for_tokens(const std::string& unit, std::int64_t max_tokens) {
    const auto per_unit = std::max<std::size_t>(1, mock_tokenize(unit).size());
    const auto repeats = static_cast<std::size_t>(std::max<std::int64_t>(0, max_tokens)) / per_unit + 2;
    std::string out;
    out.reserve(unit.size() * repeats);
    for (std::size_t i = 0; i < repeats; ++i) out += unit;
    return out;
}

bool is_endless_prefix(std::string_view unit, const std::string& endless) {
    if (endless.empty()) return false;
    for (std::size_t i = 0; i < unit.size(); ++i) {
        if (unit[i] != endless[i % endless.size()]) return false;
    }
    return true;
}

SegmentScheme scheme_for(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::prompt_guided: return SegmentScheme::prompt_guided();
        case SegmentKind::line_break: return SegmentScheme::line_break();
        case SegmentKind::prefix: return SegmentScheme::prefix();
    }
    return SegmentScheme::prompt_guided();
}

std::string default_answer(const MockProblem& p) {
    if (!p.default_answer.empty()) return p.default_answer;
    return "The final answer is \\boxed{" + p.answer + "}.";
}

std::string lowercase(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

constexpr std::string_view kJudgmentLead =
    " Time is up. Given the time I've spent and the approaches I've tried, I should stop thinking "
    "and formulate a final answer based on what I already have.";

}  // namespace

std::vector<MockToken> mock_tokenize(std::string_view text) {
    std::vector<MockToken> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        std::size_t j = i + 1;
        if (c == ' ' && j < text.size() && is_ascii_alnum(text[j])) {
            while (j < text.size() && is_ascii_alnum(text[j])) ++j;
        } else if (is_ascii_alnum(c)) {
            while (j < text.size() && is_ascii_alnum(text[j])) ++j;
        } else if (static_cast<unsigned char>(c) >= 0x80) {
            j = std::min(text.size(), i + utf8_sequence_length(static_cast<unsigned char>(c)));
        }
        tokens.push_back({i, j});
        i = j;
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// Scenario

MockScenario MockScenario::from_json(const json& j) {
    MockScenario s;
    s.format = segment_kind_from_string(j.value("format", std::string("prompt_guided")));
    for (const auto& t : j.at("teachers")) {
        MockTeacher teacher;
        teacher.id = t.at("id").get<std::string>();
        teacher.model = t.value("model", teacher.id);
        if (auto it = t.find("endless_text"); it != t.end()) teacher.endless_text = it->get<std::string>();
        teacher.endless_score = t.value("endless_score", 0.5);
        s.teachers.push_back(std::move(teacher));
    }
    s.prover_model = j.value("prover_model", s.prover_model);
    s.integrator_model = j.value("integrator_model", s.integrator_model);
    s.judge_model = j.value("judge_model", s.judge_model);
    for (const auto& p : j.at("problems")) {
        MockProblem problem;
        problem.id = p.at("id").get<std::string>();
        problem.question = p.at("question").get<std::string>();
        problem.answer = p.at("answer").get<std::string>();
        problem.default_answer = p.value("default_answer", std::string{});
        if (auto it = p.find("root"); it != p.end()) problem.root = node_from_json(*it);
        if (auto it = p.find("integrator_replies"); it != p.end()) {
            problem.integrator_replies = it->get<std::vector<std::string>>();
        }
        if (auto it = p.find("judge_reply"); it != p.end()) problem.judge_reply = it->get<std::string>();
        if (auto it = p.find("unscripted_score"); it != p.end()) problem.unscripted_score = it->get<double>();
        s.problems.push_back(std::move(problem));
    }
    s.validate();
    return s;
}

MockScenario MockScenario::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("scenario file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

json MockScenario::to_json() const {
    json teachers_json = json::array();
    for (const auto& t : teachers) {
        json tj = {{"id", t.id}, {"model", t.model}, {"endless_score", t.endless_score}};
        if (t.endless_text) tj["endless_text"] = *t.endless_text;
        teachers_json.push_back(std::move(tj));
    }
    json problems_json = json::array();
    for (const auto& p : problems) {
        json pj = {{"id", p.id}, {"question", p.question}, {"answer", p.answer}, {"root", node_to_json(p.root)}};
        if (!p.default_answer.empty()) pj["default_answer"] = p.default_answer;
        if (!p.integrator_replies.empty()) pj["integrator_replies"] = p.integrator_replies;
        if (p.judge_reply) pj["judge_reply"] = *p.judge_reply;
        if (p.unscripted_score) pj["unscripted_score"] = *p.unscripted_score;
        problems_json.push_back(std::move(pj));
    }
    return {
        {"schema_version", 1},
        {"format", to_string(format)},
        {"teachers", std::move(teachers_json)},
        {"prover_model", prover_model},
        {"integrator_model", integrator_model},
        {"judge_model", judge_model},
        {"problems", std::move(problems_json)},
    };
}

void MockScenario::validate() const {
    for (std::size_t i = 0; i < teachers.size(); ++i) {
        for (std::size_t k = i + 1; k < teachers.size(); ++k) {
            if (teachers[i].id == teachers[k].id) throw std::invalid_argument("duplicate teacher id " + teachers[i].id);
            if (teachers[i].model == teachers[k].model) {
                throw std::invalid_argument("duplicate teacher model " + teachers[i].model);
            }
        }
        if (teachers[i].endless_text && teachers[i].endless_text->empty()) {
            throw std::invalid_argument("teacher " + teachers[i].id + ": endless_text must be non-empty");
        }
    }
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const auto& p = problems[i];
        if (p.id.empty()) throw std::invalid_argument("problem with empty id");
        if (p.answer.empty()) throw std::invalid_argument("problem " + p.id + ": empty answer");
        for (std::size_t k = i + 1; k < problems.size(); ++k) {
            if (problems[k].id == p.id) throw std::invalid_argument("duplicate problem id " + p.id);
        }
        validate_node(p.root, p.id);
        if (p.unscripted_score && !(*p.unscripted_score >= 0.0 && *p.unscripted_score <= 1.0)) {
            throw std::invalid_argument(p.id + ": unscripted_score outside [0,1]");
        }
    }
}

// ---------------------------------------------------------------------------
// Model

struct MockModel::Located {
    const MockNode* node = nullptr;
    const MockTeacher* endless = nullptr;  // set once the path entered an endless chain
    int depth = 0;
    std::string pending;

    double score() const { return endless ? endless->endless_score : node->score; }
};

MockModel::MockModel(MockScenario scenario) : scenario_(std::move(scenario)) { scenario_.validate(); }

const MockTeacher* MockModel::teacher_by_model(std::string_view model) const {
    for (const auto& t : scenario_.teachers) {
        if (t.model == model) return &t;
    }
    return nullptr;
}

const MockProblem& MockModel::find_problem(std::string_view prompt, std::size_t& think_begin) const {
    for (const auto& p : scenario_.problems) {
        const std::string anchor = p.question + "\n" + std::string(kThinkOpen);
        const auto pos = prompt.find(anchor);
        if (pos != std::string_view::npos) {
            think_begin = pos + p.question.size() + 1 + kThinkOpen.size();
            return p;
        }
    }
    throw MockError(422, "prompt does not match any scripted problem");
}

MockModel::Located MockModel::walk(const MockProblem& problem, std::string_view region, bool has_pending) const {
    const auto parsed = parse_think_region(region, scheme_for(scenario_.format));
    if (!parsed.preamble.empty()) throw MockError(422, "reasoning region has unscripted preamble");
    std::vector<ParsedStep> steps = parsed.steps;

    Located at;
    at.node = &problem.root;
    if (has_pending && scenario_.format != SegmentKind::line_break && !steps.empty() && steps.back().body.empty() &&
        !steps.back().header.empty()) {
        at.pending = steps.back().header;
        steps.pop_back();
    }

    for (const auto& step : steps) {
        const std::string unit =
            scenario_.format == SegmentKind::prompt_guided ? step.body : step.header + step.body;
        if (at.endless) {
            if (!is_endless_prefix(unit, *at.endless->endless_text)) {
                throw MockError(422, "unscripted path after endless step " + std::to_string(at.depth));
            }
            ++at.depth;
            continue;
        }
        const MockNode* found = nullptr;
        for (int pass = 0; pass < 2 && !found; ++pass) {
            for (const auto& teacher : scenario_.teachers) {
                const auto it = at.node->children.find(teacher.id);
                if (it == at.node->children.end()) continue;
                for (const auto& child : it->second) {
                    const bool hit = pass == 0 ? child.text == unit : child.text.starts_with(unit);
                    if (hit) {
                        found = &child;
                        break;
                    }
                }
                if (found) break;
            }
        }
        if (found) {
            at.node = found;
        } else {
            for (const auto& teacher : scenario_.teachers) {
                if (teacher.endless_text && is_endless_prefix(unit, *teacher.endless_text)) {
                    at.endless = &teacher;
                    break;
                }
            }
            if (!at.endless) {
                throw MockError(422, "unscripted path at depth " + std::to_string(at.depth + 1) + " of problem " +
                                         problem.id);
            }
        }
        ++at.depth;
    }
    return at;
}

std::string MockModel::continuation(const MockProblem& problem, const Located& at, const MockTeacher& teacher,
                                    std::uint64_t seed, std::int64_t max_tokens) const {
    const auto endless_stream = [&]() -> std::string {
        if (!teacher.endless_text) {
            throw MockError(422, "no scripted continuation for teacher " + teacher.id + " in problem " + problem.id);
        }
        return repeat_for_tokens(*teacher.endless_text, max_tokens);
    };
    if (at.endless) return endless_stream();

    std::string stream;
    const MockNode* cur = at.node;
    int depth = at.depth;
    for (bool first = true;; first = false) {
        const auto it = cur->children.find(teacher.id);
        if (it == cur->children.end()) {
            if (teacher.endless_text) stream += endless_stream();
            else if (first) endless_stream();  // throws
            break;
        }
        const MockNode& child = it->second[seed % it->second.size()];
        std::string_view text = child.text;
        if (first && scenario_.format == SegmentKind::prefix && !at.pending.empty()) {
            if (!text.starts_with(at.pending)) throw MockError(422, "pending prefix term does not match script");
            text.remove_prefix(at.pending.size());
        }
        stream += text;
        ++depth;
        if (child.finish == StepFinish::think_end) {
            stream += kThinkClose;
            break;
        }
        if (scenario_.format == SegmentKind::prompt_guided) stream += "\n" + step_header(depth + 1);
        cur = &child;
    }
    return stream;
}

CompletionResponse MockModel::complete(const CompletionRequest& request) const {
    std::size_t think_begin = 0;
    const MockProblem& problem = find_problem(request.prompt, think_begin);
    const std::string_view after_open = std::string_view(request.prompt).substr(think_begin);
    const std::uint64_t seed = request.seed.value_or(0);

    CompletionResponse response;
    const auto close = after_open.find(kThinkClose);

    if (request.echo) {
        if (close == std::string_view::npos) throw MockError(422, "scoring prompt lacks </think>");
        std::string_view region = after_open.substr(0, close);
        if (region.ends_with(' ')) region.remove_suffix(1);
        std::optional<Located> at;
        try {
            at = walk(problem, region, false);
        } catch (const MockError&) {
            if (!problem.unscripted_score) throw;
        }

        const std::string& prompt = request.prompt;
        const std::string suffix = problem.answer + ".";
        if (!prompt.ends_with(suffix)) throw MockError(422, "scoring prompt does not end with the gold answer");
        const std::size_t answer_begin = prompt.size() - suffix.size();
        const std::size_t answer_end = answer_begin + problem.answer.size();

        const auto tokens = mock_tokenize(prompt);
        std::vector<std::size_t> span;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i].begin < answer_end && tokens[i].end > answer_begin) span.push_back(i);
        }
        std::vector<double> answer_lps;
        if (at && !at->endless && at->node->answer_logprobs) {
            answer_lps = *at->node->answer_logprobs;
            if (answer_lps.size() != span.size()) {
                throw MockError(422, "scripted answer_logprobs has " + std::to_string(answer_lps.size()) +
                                         " entries but the answer spans " + std::to_string(span.size()) + " tokens");
            }
        } else {
            const double s = at ? at->score() : *problem.unscripted_score;
            answer_lps.assign(span.size(), s > 0.0 ? std::log(s) : kZeroScoreLogprob);
        }

        TokenLogprobs lp;
        std::size_t next_span = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            lp.tokens.push_back(prompt.substr(tokens[i].begin, tokens[i].end - tokens[i].begin));
            lp.text_offset.push_back(static_cast<std::int64_t>(utf8_length(std::string_view(prompt).substr(0, tokens[i].begin))));
            if (next_span < span.size() && span[next_span] == i) {
                lp.token_logprobs.emplace_back(answer_lps[next_span++]);
            } else if (i == 0) {
                lp.token_logprobs.emplace_back(std::nullopt);
            } else {
                lp.token_logprobs.emplace_back(kContextLogprob);
            }
        }
        response.text = prompt;
        response.finish_reason = "length";
        response.logprobs = std::move(lp);
        response.usage.prompt_tokens = static_cast<std::int64_t>(tokens.size());
        return response;
    }

    const MockTeacher* teacher = teacher_by_model(request.model);
    std::string stream;
    if (close != std::string_view::npos) {
        std::string_view region = after_open.substr(0, close);
        const bool judgment = region.ends_with(kJudgmentLead);
        if (judgment) region.remove_suffix(kJudgmentLead.size());
        const Located at = walk(problem, region, false);
        if (judgment) {
            const auto& judge = at.endless ? std::vector<std::string>{} : at.node->judge;
            stream = judge.empty() ? " \\boxed{" + problem.answer + "}" : judge[seed % judge.size()];
        } else {
            stream = default_answer(problem);
            if (!at.endless) {
                const auto& answers = at.node->answers;
                if (teacher) {
                    if (auto it = answers.find(teacher->id); it != answers.end()) stream = it->second;
                    else if (auto any = answers.find("*"); any != answers.end()) stream = any->second;
                } else if (auto any = answers.find("*"); any != answers.end()) {
                    stream = any->second;
                }
            }
        }
    } else {
        if (!teacher) throw MockError(422, "model " + request.model + " is not a scripted teacher");
        const Located at = walk(problem, after_open, true);
        stream = continuation(problem, at, *teacher, seed, request.max_tokens);
    }

    auto limited = apply_limits(stream, request.stop, request.max_tokens);
    response.text = std::move(limited.text);
    response.finish_reason = std::move(limited.finish_reason);
    response.stop_reason = std::move(limited.stop_reason);
    response.usage.prompt_tokens = static_cast<std::int64_t>(mock_tokenize(request.prompt).size());
    response.usage.completion_tokens = static_cast<std::int64_t>(mock_tokenize(response.text).size());
    return response;
}

ChatResponse MockModel::chat(const ChatRequest& request) const {
    const MockProblem* problem = nullptr;
    for (const auto& p : scenario_.problems) {
        for (const auto& m : request.messages) {
            if (m.content.find(p.question) != std::string::npos) {
                problem = &p;
                break;
            }
        }
        if (problem) break;
    }
    if (!problem) throw MockError(422, "chat request does not match any scripted problem");

    std::string content;
    if (request.model == scenario_.integrator_model) {
        if (problem->integrator_replies.empty()) throw MockError(422, "no integrator replies scripted");
        std::size_t turn = 0;
        for (const auto& m : request.messages) turn += m.role == "assistant" ? 1 : 0;
        content = problem->integrator_replies[std::min(turn, problem->integrator_replies.size() - 1)];
    } else if (request.model == scenario_.judge_model) {
        if (problem->judge_reply) {
            content = *problem->judge_reply;
        } else {
            const std::string& prompt = request.messages.back().content;
            constexpr std::string_view marker = "Predicted ANSWER:\n";
            const auto pos = prompt.find(marker);
            std::string predicted = pos == std::string::npos ? prompt : prompt.substr(pos + marker.size());
            if (const auto end = predicted.find("\n\nOutput Format:"); end != std::string::npos) predicted.resize(end);
            const bool correct = lowercase(predicted).find(lowercase(problem->answer)) != std::string::npos;
            content = std::string("{\"correctness\": \"") + (correct ? "True" : "False") + "\"}";
        }
    } else {
        throw MockError(422, "model " + request.model + " has no chat script");
    }

    ChatResponse response;
    response.content = content;
    response.finish_reason = "stop";
    std::int64_t prompt_tokens = 0;
    for (const auto& m : request.messages) prompt_tokens += static_cast<std::int64_t>(mock_tokenize(m.content).size());
    response.usage.prompt_tokens = prompt_tokens;
    response.usage.completion_tokens = static_cast<std::int64_t>(mock_tokenize(content).size());
    return response;
}

// ---------------------------------------------------------------------------
// Transports

CompletionResponse MockTransport::complete(const EndpointSpec& endpoint, const CompletionRequest& request) {
    if (fault_) {
        if (auto status = fault_(endpoint, request)) {
            throw EndpointError("injected fault", *status, *status == 429 || *status >= 500);
        }
    }
    try {
        const auto wire_request = completion_request_from_json(json::parse(to_json(request).dump()));
        return completion_response_from_json(json::parse(to_json(model_->complete(wire_request)).dump()));
    } catch (const MockError& e) {
        throw EndpointError(e.what(), e.status(), false);
    }
}

ChatResponse MockTransport::chat(const EndpointSpec& endpoint, const ChatRequest& request) {
    if (fault_) {
        CompletionRequest probe;
        probe.model = request.model;
        if (!request.messages.empty()) probe.prompt = request.messages.back().content;
        if (auto status = fault_(endpoint, probe)) {
            throw EndpointError("injected fault", *status, *status == 429 || *status >= 500);
        }
    }
    try {
        const auto wire_request = chat_request_from_json(json::parse(to_json(request).dump()));
        return chat_response_from_json(json::parse(to_json(model_->chat(wire_request)).dump()));
    } catch (const MockError& e) {
        throw EndpointError(e.what(), e.status(), false);
    }
}

MockServer::MockServer(std::shared_ptr<const MockModel> model, const std::string& host, int port)
    : model_(std::move(model)), server_(std::make_unique<httplib::Server>()), host_(host) {
    const auto handle = [this](auto&& respond) {
        return [this, respond](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::exception& e) {
                res.status = 400;
                res.set_content(error_body(400, std::string("invalid JSON: ") + e.what()).dump(), "application/json");
                return;
            }
            try {
                res.set_content(respond(body).dump(), "application/json");
                res.status = 200;
            } catch (const MockError& e) {
                res.status = e.status();
                res.set_content(error_body(e.status(), e.what()).dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(error_body(400, e.what()).dump(), "application/json");
            }
        };
    };
    server_->Post("/v1/completions", handle([this](const json& body) {
                      return to_json(model_->complete(completion_request_from_json(body)));
                  }));
    server_->Post("/v1/chat/completions", handle([this](const json& body) {
                      return to_json(model_->chat(chat_request_from_json(body)));
                  }));
    server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"status\":\"ok\"}", "application/json");
    });

    if (port == 0) {
        port_ = server_->bind_to_any_port(host_);
    } else {
        port_ = server_->bind_to_port(host_, port) ? port : -1;
    }
    if (port_ <= 0) throw BindError("cannot bind mock server to " + host_ + ":" + std::to_string(port));
    worker_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

MockServer::~MockServer() { stop(); }

void MockServer::stop() {
    if (server_) server_->stop();
    if (worker_.joinable()) worker_.join();
}

std::string MockServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace stepweave
