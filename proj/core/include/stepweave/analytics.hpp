#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/dataset.hpp"

namespace stepweave {

struct Metrics {
    std::size_t entries = 0;
    std::size_t failed = 0;  // problems without an entry (aborted or integration-failed)
    std::size_t judged = 0;
    std::size_t unjudged = 0;
    std::size_t correct = 0;
    std::optional<double> answer_accuracy;            // correct / judged
    std::optional<double> answer_accuracy_inclusive;  // correct / (judged + failed)
    std::optional<double> mean_predictive_perplexity; // mean selected_score over scored entries
    std::size_t scored = 0;

    nlohmann::json to_json() const;
};

/// Throws EmptyInput when `entries` is empty.
Metrics compute_metrics(const std::vector<DatasetEntry>& entries, std::size_t failed = 0);

inline constexpr int kHitRateBins = 10;

struct HitRateBin {
    double lower = 0.0;  // relative position range, percent
    double upper = 0.0;
    std::int64_t steps = 0;
    std::map<std::string, std::int64_t> counts;
    std::map<std::string, double> fractions;
};

struct HitRateReport {
    std::array<HitRateBin, kHitRateBins> bins;
    std::int64_t total_steps = 0;

    nlohmann::json to_json() const;
};

/// Bin index for step `index` (1-based) of an `length`-step trajectory:
/// position (index - 0.5) / length split into ten equal bins.
int hit_rate_bin(int index, int length);

/// One teacher-id sequence per selected trajectory.
HitRateReport compute_hit_rates(const std::vector<std::vector<std::string>>& trajectories);
HitRateReport compute_hit_rates(const std::vector<DatasetEntry>& entries);

}  // namespace stepweave
