#pragma once

// Completions wire protocol shared by the HTTP client and the mock server.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stepweave {

struct CompletionRequest {
    std::string model;
    std::string prompt;
    std::int64_t max_tokens = 0;
    double temperature = 0.0;
    std::vector<std::string> stop;
    std::optional<int> logprobs;
    bool echo = false;
    std::optional<std::uint64_t> seed;

    bool operator==(const CompletionRequest&) const = default;
};

struct TokenLogprobs {
    std::vector<std::string> tokens;
    std::vector<std::optional<double>> token_logprobs;  // first prompt token has none
    std::vector<std::int64_t> text_offset;              // character (code point) offsets
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct CompletionResponse {
    std::string text;
    std::string finish_reason;               // "stop" or "length"
    std::optional<std::string> stop_reason;  // matched stop sequence, when the server reports it
    std::optional<TokenLogprobs> logprobs;
    Usage usage;
};

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    std::int64_t max_tokens = 0;
    double temperature = 0.0;
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    Usage usage;
};

/// Transport-level failure. `retryable` distinguishes connection errors,
/// 429 and 5xx from deterministic client errors.
class EndpointError : public std::runtime_error {
public:
    EndpointError(const std::string& what, int status, bool retryable)
        : std::runtime_error(what), status_(status), retryable_(retryable) {}
    int status() const { return status_; }
    bool retryable() const { return retryable_; }

private:
    int status_;
    bool retryable_;
};

class MalformedResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const CompletionRequest& request);
CompletionRequest completion_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CompletionResponse& response);
CompletionResponse completion_response_from_json(const nlohmann::json& j);  // throws MalformedResponse

nlohmann::json to_json(const ChatRequest& request);
ChatRequest chat_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChatResponse& response);
ChatResponse chat_response_from_json(const nlohmann::json& j);  // throws MalformedResponse

/// Protocol-level error body: {"error": {"message", "type", "code"}}.
nlohmann::json error_body(int status, const std::string& message);

struct EndpointSpec;

/// Moves one request to a model server and back. Implementations throw
/// EndpointError or MalformedResponse.
class Transport {
public:
    virtual ~Transport() = default;
    virtual CompletionResponse complete(const EndpointSpec& endpoint, const CompletionRequest& request) = 0;
    virtual ChatResponse chat(const EndpointSpec& endpoint, const ChatRequest& request) = 0;
};

/// HTTP/1.1 transport (cpp-httplib). One connection per request so a single
/// instance may be shared across threads.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(int timeout_seconds = 600) : timeout_seconds_(timeout_seconds) {}
    CompletionResponse complete(const EndpointSpec& endpoint, const CompletionRequest& request) override;
    ChatResponse chat(const EndpointSpec& endpoint, const ChatRequest& request) override;

private:
    nlohmann::json post(const EndpointSpec& endpoint, const std::string& path, const nlohmann::json& body);
    int timeout_seconds_;
};

// UTF-8 helpers for converting text_offset values into byte positions.
std::size_t utf8_length(std::string_view text);
std::size_t utf8_byte_offset(std::string_view text, std::size_t code_points);

}  // namespace stepweave
