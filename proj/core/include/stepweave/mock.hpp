#pragma once

// Deterministic scripted model server. Responses are a pure function of the
// request, so every test run against it is reproducible bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/trajectory.hpp"
#include "stepweave/wire.hpp"

namespace httplib {
class Server;
}

namespace stepweave {

/// One scripted step. `children` maps a teacher id to its sampled variants
/// (selected by `seed % variants.size()`).
struct MockNode {
    std::string text;
    StepFinish finish = StepFinish::boundary;
    double score = 0.5;                                 // prover score of the prefix ending here
    std::optional<std::vector<double>> answer_logprobs;  // overrides `score` for the answer span
    std::map<std::string, std::string> answers;          // teacher id -> final answer text
    std::vector<std::string> judge;                      // binary-judgment completions, by seed
    std::map<std::string, std::vector<MockNode>> children;
};

struct MockTeacher {
    std::string id;
    std::string model;
    std::optional<std::string> endless_text;  // never emits a stop; repeats this text
    double endless_score = 0.5;
};

struct MockProblem {
    std::string id;
    std::string question;
    std::string answer;
    std::string default_answer;  // empty: "The final answer is \boxed{<answer>}."
    MockNode root;
    std::vector<std::string> integrator_replies;  // indexed by assistant turns so far
    std::optional<std::string> judge_reply;
    std::optional<double> unscripted_score;  // scoring requests off the scripted tree (e.g. merged trajectories)
};

struct MockScenario {
    SegmentKind format = SegmentKind::prompt_guided;
    std::vector<MockTeacher> teachers;
    std::string prover_model = "mock-prover";
    std::string integrator_model = "mock-integrator";
    std::string judge_model = "mock-judge";
    std::vector<MockProblem> problems;

    static MockScenario from_json(const nlohmann::json& j);
    static MockScenario load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

/// Error surfaced to clients as an HTTP status plus error object.
class MockError : public std::runtime_error {
public:
    MockError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

/// Whitespace-attached word tokenizer used for every count the mock reports.
struct MockToken {
    std::size_t begin = 0;  // byte offsets
    std::size_t end = 0;
};
std::vector<MockToken> mock_tokenize(std::string_view text);

class MockModel {
public:
    explicit MockModel(MockScenario scenario);

    CompletionResponse complete(const CompletionRequest& request) const;
    ChatResponse chat(const ChatRequest& request) const;

    const MockScenario& scenario() const { return scenario_; }

private:
    struct Located;
    const MockProblem& find_problem(std::string_view prompt, std::size_t& think_begin) const;
    const MockTeacher* teacher_by_model(std::string_view model) const;
    Located walk(const MockProblem& problem, std::string_view region, bool has_pending) const;
    std::string continuation(const MockProblem& problem, const Located& at, const MockTeacher& teacher,
                             std::uint64_t seed, std::int64_t max_tokens) const;

    MockScenario scenario_;
};

/// In-process transport backed by a MockModel; requests and responses take a
/// JSON round-trip so serialization is exercised. `fault` may inject failures.
class MockTransport final : public Transport {
public:
    using Fault = std::function<std::optional<int>(const EndpointSpec&, const CompletionRequest&)>;

    explicit MockTransport(std::shared_ptr<const MockModel> model, Fault fault = {})
        : model_(std::move(model)), fault_(std::move(fault)) {}

    CompletionResponse complete(const EndpointSpec& endpoint, const CompletionRequest& request) override;
    ChatResponse chat(const EndpointSpec& endpoint, const ChatRequest& request) override;

private:
    std::shared_ptr<const MockModel> model_;
    Fault fault_;
};

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loopback HTTP server exposing a MockModel over the completions protocol.
/// Listens from construction until destruction (or stop()).
class MockServer {
public:
    MockServer(std::shared_ptr<const MockModel> model, const std::string& host = "127.0.0.1", int port = 0);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    int port() const { return port_; }
    std::string base_url() const;
    void stop();

private:
    std::shared_ptr<const MockModel> model_;
    std::unique_ptr<httplib::Server> server_;
    std::string host_;
    int port_ = 0;
    std::thread worker_;
};

}  // namespace stepweave
