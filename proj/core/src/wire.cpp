#include "stepweave/wire.hpp"

namespace stepweave {

using nlohmann::json;

json to_json(const CompletionRequest& request) {
    json j = {
        {"model", request.model},
        {"prompt", request.prompt},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
        {"stop", request.stop},
    };
    if (request.logprobs) j["logprobs"] = *request.logprobs;
    if (request.echo) j["echo"] = true;
    if (request.seed) j["seed"] = *request.seed;
    return j;
}

CompletionRequest completion_request_from_json(const json& j) {
    CompletionRequest r;
    r.model = j.at("model").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.max_tokens = j.value("max_tokens", std::int64_t{16});
    r.temperature = j.value("temperature", 1.0);
    if (auto it = j.find("stop"); it != j.end() && !it->is_null()) {
        if (it->is_string()) r.stop.push_back(it->get<std::string>());
        else r.stop = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("logprobs"); it != j.end() && !it->is_null()) r.logprobs = it->get<int>();
    r.echo = j.value("echo", false);
    if (auto it = j.find("seed"); it != j.end() && !it->is_null()) r.seed = it->get<std::uint64_t>();
    return r;
}

json to_json(const CompletionResponse& response) {
    json choice = {
        {"index", 0},
        {"text", response.text},
        {"finish_reason", response.finish_reason},
    };
    if (response.stop_reason) choice["stop_reason"] = *response.stop_reason;
    if (response.logprobs) {
        json lp;
        lp["tokens"] = response.logprobs->tokens;
        json values = json::array();
        for (const auto& v : response.logprobs->token_logprobs) {
            values.push_back(v ? json(*v) : json(nullptr));
        }
        lp["token_logprobs"] = std::move(values);
        lp["text_offset"] = response.logprobs->text_offset;
        choice["logprobs"] = std::move(lp);
    } else {
        choice["logprobs"] = nullptr;
    }
    return {
        {"object", "text_completion"},
        {"choices", json::array({std::move(choice)})},
        {"usage",
         {{"prompt_tokens", response.usage.prompt_tokens},
          {"completion_tokens", response.usage.completion_tokens},
          {"total_tokens", response.usage.prompt_tokens + response.usage.completion_tokens}}},
    };
}

namespace {

Usage usage_from_json(const json& j) {
    Usage u;
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
        u.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
        u.completion_tokens = it->value("completion_tokens", std::int64_t{0});
    }
    return u;
}

const json& first_choice(const json& j) {
    const auto it = j.find("choices");
    if (it == j.end() || !it->is_array() || it->empty()) throw MalformedResponse("response has no choices");
    return it->front();
}

}  // namespace

CompletionResponse completion_response_from_json(const json& j) {
    try {
        const json& choice = first_choice(j);
        CompletionResponse r;
        r.text = choice.at("text").get<std::string>();
        if (auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) {
            r.finish_reason = it->get<std::string>();
        }
        if (auto it = choice.find("stop_reason"); it != choice.end() && it->is_string()) {
            r.stop_reason = it->get<std::string>();
        }
        if (auto it = choice.find("logprobs"); it != choice.end() && it->is_object()) {
            TokenLogprobs lp;
            lp.tokens = it->at("tokens").get<std::vector<std::string>>();
            for (const auto& v : it->at("token_logprobs")) {
                lp.token_logprobs.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
            }
            lp.text_offset = it->at("text_offset").get<std::vector<std::int64_t>>();
            if (lp.tokens.size() != lp.token_logprobs.size() || lp.tokens.size() != lp.text_offset.size()) {
                throw MalformedResponse("logprobs arrays differ in length");
            }
            r.logprobs = std::move(lp);
        }
        r.usage = usage_from_json(j);
        return r;
    } catch (const json::exception& e) {
        throw MalformedResponse(std::string("bad completion response: ") + e.what());
    }
}

json to_json(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {
        {"model", request.model},
        {"messages", std::move(messages)},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
}

ChatRequest chat_request_from_json(const json& j) {
    ChatRequest r;
    r.model = j.at("model").get<std::string>();
    for (const auto& m : j.at("messages")) {
        r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    r.max_tokens = j.value("max_tokens", std::int64_t{0});
    r.temperature = j.value("temperature", 1.0);
    return r;
}

json to_json(const ChatResponse& response) {
    return {
        {"object", "chat.completion"},
        {"choices",
         json::array({{{"index", 0},
                       {"message", {{"role", "assistant"}, {"content", response.content}}},
                       {"finish_reason", response.finish_reason}}})},
        {"usage",
         {{"prompt_tokens", response.usage.prompt_tokens},
          {"completion_tokens", response.usage.completion_tokens},
          {"total_tokens", response.usage.prompt_tokens + response.usage.completion_tokens}}},
    };
}

ChatResponse chat_response_from_json(const json& j) {
    try {
        const json& choice = first_choice(j);
        ChatResponse r;
        const json& message = choice.at("message");
        if (const auto it = message.find("content"); it != message.end() && it->is_string()) {
            r.content = it->get<std::string>();
        }
        if (auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) {
            r.finish_reason = it->get<std::string>();
        }
        r.usage = usage_from_json(j);
        return r;
    } catch (const json::exception& e) {
        throw MalformedResponse(std::string("bad chat response: ") + e.what());
    }
}

json error_body(int status, const std::string& message) {
    return {{"error", {{"message", message}, {"type", "invalid_request_error"}, {"code", status}}}};
}

std::size_t utf8_length(std::string_view text) {
    std::size_t n = 0;
    for (const char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::size_t utf8_byte_offset(std::string_view text, std::size_t code_points) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            if (seen == code_points) return i;
            ++seen;
        }
    }
    return text.size();
}

}  // namespace stepweave
