#include "stepweave/endpoint.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

namespace stepweave {

namespace {

class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<>& sem_;
};

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

std::string resolve_api_key(const EndpointSpec& spec) {
    if (!spec.api_key_env || spec.api_key_env->empty()) return {};
    const char* value = std::getenv(spec.api_key_env->c_str());
    return value ? std::string(value) : std::string{};
}

Endpoint::Endpoint(EndpointSpec spec, std::shared_ptr<Transport> transport)
    : spec_(std::move(spec)),
      transport_(std::move(transport)),
      slots_(std::make_unique<std::counting_semaphore<>>(spec_.max_parallel > 0 ? spec_.max_parallel : 1)) {}

template <typename Response, typename Call>
Response Endpoint::with_retries(CostLedger& ledger, Phase phase, Call&& call) {
    const int tries = 1 + (spec_.retry.attempts > 0 ? spec_.retry.attempts : 0);
    for (int attempt = 0;; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        bool retryable = false;
        std::string error;
        int status = 0;
        try {
            Response response;
            {
                SlotGuard slot(*slots_);
                response = call();
            }
            ledger.record_call(phase, response.usage.prompt_tokens, response.usage.completion_tokens,
                               elapsed_ms(start));
            return response;
        } catch (const EndpointError& e) {
            retryable = e.retryable();
            status = e.status();
            error = e.what();
        } catch (const MalformedResponse& e) {
            retryable = true;
            error = e.what();
        }
        ledger.record_call(phase, 0, 0, elapsed_ms(start));
        if (!retryable || attempt + 1 >= tries) {
            ledger.record_failure(phase);
            throw EndpointError(spec_.id + ": " + error, status, retryable);
        }
        ledger.record_retry(phase);
        const auto backoff = std::chrono::milliseconds(static_cast<std::int64_t>(spec_.retry.backoff_ms) << attempt);
        if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
    }
}

CompletionResponse Endpoint::complete(const CompletionRequest& request, CostLedger& ledger, Phase phase) {
    return with_retries<CompletionResponse>(ledger, phase, [&] { return transport_->complete(spec_, request); });
}

ChatResponse Endpoint::chat(const ChatRequest& request, CostLedger& ledger, Phase phase) {
    return with_retries<ChatResponse>(ledger, phase, [&] { return transport_->chat(spec_, request); });
}

}  // namespace stepweave
