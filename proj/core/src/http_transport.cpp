#include <httplib.h>

#include "stepweave/endpoint.hpp"
#include "stepweave/wire.hpp"

namespace stepweave {

namespace {

struct SplitUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

SplitUrl split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto slash = base_url.find('/', host_begin);
    SplitUrl out;
    if (slash == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, slash);
        out.path_prefix = base_url.substr(slash);
        while (out.path_prefix.ends_with('/')) out.path_prefix.pop_back();
    }
    // Accept base URLs that already carry the /v1 suffix.
    if (out.path_prefix.ends_with("/v1")) out.path_prefix.resize(out.path_prefix.size() - 3);
    return out;
}

}  // namespace

nlohmann::json HttpTransport::post(const EndpointSpec& endpoint, const std::string& path,
                                   const nlohmann::json& body) {
    const auto url = split_base_url(endpoint.base_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(10);
    client.set_read_timeout(timeout_seconds_);
    client.set_write_timeout(timeout_seconds_);
    httplib::Headers headers;
    if (auto key = resolve_api_key(endpoint); !key.empty()) {
        headers.emplace("Authorization", "Bearer " + key);
    }

    auto res = client.Post(url.path_prefix + path, headers, body.dump(), "application/json");
    if (!res) {
        throw EndpointError("request to " + endpoint.base_url + path + " failed: " + httplib::to_string(res.error()),
                            0, true);
    }
    if (res->status < 200 || res->status >= 300) {
        const bool retryable = res->status == 429 || res->status >= 500;
        std::string message = "HTTP " + std::to_string(res->status);
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (!parsed.is_discarded() && parsed.contains("error") && parsed["error"].is_object()) {
            message += ": " + parsed["error"].value("message", std::string{});
        }
        throw EndpointError(message, res->status, retryable);
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw MalformedResponse("response body is not JSON");
    return parsed;
}

CompletionResponse HttpTransport::complete(const EndpointSpec& endpoint, const CompletionRequest& request) {
    return completion_response_from_json(post(endpoint, "/v1/completions", to_json(request)));
}

ChatResponse HttpTransport::chat(const EndpointSpec& endpoint, const ChatRequest& request) {
    return chat_response_from_json(post(endpoint, "/v1/chat/completions", to_json(request)));
}

}  // namespace stepweave
