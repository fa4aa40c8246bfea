#pragma once

#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "stepweave/ledger.hpp"
#include "stepweave/wire.hpp"

namespace stepweave {

struct RetryPolicy {
    int attempts = 2;  // retries after the first try
    int backoff_ms = 200;
};

/// A model served behind the completions protocol. Teachers, the
/// meta-prover, the integrator and the judge are all described this way.
struct EndpointSpec {
    std::string id;
    std::string base_url;
    std::string model;
    double temperature = 0.6;
    std::string system_prompt;
    std::optional<std::string> api_key_env;
    int max_parallel = 4;
    RetryPolicy retry;
};

using TeacherSpec = EndpointSpec;

/// Bearer token for `spec`, read from the environment; empty when unset.
std::string resolve_api_key(const EndpointSpec& spec);

/// Client for one endpoint: caps in-flight requests at `max_parallel`,
/// retries transient failures with exponential backoff, and charges every
/// attempt to the caller's ledger. Safe for concurrent use.
class Endpoint {
public:
    Endpoint(EndpointSpec spec, std::shared_ptr<Transport> transport);

    const EndpointSpec& spec() const { return spec_; }
    const std::string& id() const { return spec_.id; }

    CompletionResponse complete(const CompletionRequest& request, CostLedger& ledger, Phase phase);
    ChatResponse chat(const ChatRequest& request, CostLedger& ledger, Phase phase);

private:
    template <typename Response, typename Call>
    Response with_retries(CostLedger& ledger, Phase phase, Call&& call);

    EndpointSpec spec_;
    std::shared_ptr<Transport> transport_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace stepweave
