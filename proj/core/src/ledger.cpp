#include "stepweave/ledger.hpp"

namespace stepweave {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::step_generation: return "step_generation";
        case Phase::meta_prover_evaluation: return "meta_prover_evaluation";
        case Phase::answer_generation: return "answer_generation";
    }
    return "step_generation";
}

PhaseCounters& PhaseCounters::operator+=(const PhaseCounters& other) {
    calls += other.calls;
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    wall_ms += other.wall_ms;
    failures += other.failures;
    retries += other.retries;
    cache_hits += other.cache_hits;
    return *this;
}

CostLedger::CostLedger(const CostLedger& other) {
    std::lock_guard lock(other.mutex_);
    phases_ = other.phases_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
    if (this == &other) return *this;
    std::array<PhaseCounters, kPhaseCount> copy;
    {
        std::lock_guard lock(other.mutex_);
        copy = other.phases_;
    }
    std::lock_guard lock(mutex_);
    phases_ = copy;
    return *this;
}

void CostLedger::record_call(Phase phase, std::int64_t prompt_tokens, std::int64_t completion_tokens,
                             std::int64_t wall_ms) {
    std::lock_guard lock(mutex_);
    auto& p = phases_[static_cast<std::size_t>(phase)];
    ++p.calls;
    p.prompt_tokens += prompt_tokens;
    p.completion_tokens += completion_tokens;
    p.wall_ms += wall_ms;
}

void CostLedger::record_failure(Phase phase) {
    std::lock_guard lock(mutex_);
    ++phases_[static_cast<std::size_t>(phase)].failures;
}

void CostLedger::record_retry(Phase phase) {
    std::lock_guard lock(mutex_);
    ++phases_[static_cast<std::size_t>(phase)].retries;
}

void CostLedger::record_cache_hit(Phase phase) {
    std::lock_guard lock(mutex_);
    ++phases_[static_cast<std::size_t>(phase)].cache_hits;
}

void CostLedger::merge(const CostLedger& delta) {
    if (this == &delta) return;
    std::array<PhaseCounters, kPhaseCount> copy;
    {
        std::lock_guard lock(delta.mutex_);
        copy = delta.phases_;
    }
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < kPhaseCount; ++i) phases_[i] += copy[i];
}

PhaseCounters CostLedger::phase(Phase phase) const {
    std::lock_guard lock(mutex_);
    return phases_[static_cast<std::size_t>(phase)];
}

PhaseCounters CostLedger::total() const {
    std::lock_guard lock(mutex_);
    PhaseCounters sum;
    for (const auto& p : phases_) sum += p;
    return sum;
}

nlohmann::json CostLedger::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        const auto p = phase(static_cast<Phase>(i));
        j[std::string(to_string(static_cast<Phase>(i)))] = {
            {"calls", p.calls},
            {"prompt_tokens", p.prompt_tokens},
            {"completion_tokens", p.completion_tokens},
            {"wall_ms", p.wall_ms},
            {"failures", p.failures},
            {"retries", p.retries},
            {"cache_hits", p.cache_hits},
        };
    }
    return j;
}

}  // namespace stepweave
