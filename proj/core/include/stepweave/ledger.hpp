#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <string_view>

#include <nlohmann/json.hpp>

namespace stepweave {

/// Every network call is charged to exactly one phase.
enum class Phase { step_generation = 0, meta_prover_evaluation = 1, answer_generation = 2 };
inline constexpr std::size_t kPhaseCount = 3;

std::string_view to_string(Phase phase);

struct PhaseCounters {
    std::int64_t calls = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t wall_ms = 0;
    std::int64_t failures = 0;
    std::int64_t retries = 0;
    std::int64_t cache_hits = 0;

    PhaseCounters& operator+=(const PhaseCounters& other);
    bool operator==(const PhaseCounters&) const = default;
};

/// Thread-safe call, token and wall-time accounting.
class CostLedger {
public:
    CostLedger() = default;
    CostLedger(const CostLedger& other);
    CostLedger& operator=(const CostLedger& other);

    void record_call(Phase phase, std::int64_t prompt_tokens, std::int64_t completion_tokens,
                     std::int64_t wall_ms);
    void record_failure(Phase phase);
    void record_retry(Phase phase);
    void record_cache_hit(Phase phase);

    void merge(const CostLedger& delta);

    PhaseCounters phase(Phase phase) const;
    PhaseCounters total() const;

    nlohmann::json to_json() const;

private:
    mutable std::mutex mutex_;
    std::array<PhaseCounters, kPhaseCount> phases_{};
};

}  // namespace stepweave
