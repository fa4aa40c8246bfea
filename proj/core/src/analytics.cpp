#include "stepweave/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "stepweave/prover.hpp"

namespace stepweave {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json Metrics::to_json() const {
    return {
        {"schema_version", kSchemaVersion},
        {"entries", entries},
        {"failed", failed},
        {"judged", judged},
        {"unjudged", unjudged},
        {"correct", correct},
        {"answer_accuracy", optional_number(answer_accuracy)},
        {"answer_accuracy_inclusive", optional_number(answer_accuracy_inclusive)},
        {"mean_predictive_perplexity", optional_number(mean_predictive_perplexity)},
        {"mean_predictive_perplexity_scope", "selected trajectories"},
        {"scored", scored},
    };
}

Metrics compute_metrics(const std::vector<DatasetEntry>& entries, std::size_t failed) {
    if (entries.empty()) throw EmptyInput("metrics need at least one entry");
    Metrics m;
    m.entries = entries.size();
    m.failed = failed;
    double score_sum = 0.0;
    for (const auto& e : entries) {
        switch (e.verdict) {
            case Verdict::correct: ++m.correct; ++m.judged; break;
            case Verdict::incorrect: ++m.judged; break;
            case Verdict::unjudged: ++m.unjudged; break;
        }
        if (e.selected_score) {
            score_sum += *e.selected_score;
            ++m.scored;
        }
    }
    if (m.judged > 0) m.answer_accuracy = static_cast<double>(m.correct) / static_cast<double>(m.judged);
    if (m.judged + failed > 0) {
        m.answer_accuracy_inclusive = static_cast<double>(m.correct) / static_cast<double>(m.judged + failed);
    }
    if (m.scored > 0) m.mean_predictive_perplexity = score_sum / static_cast<double>(m.scored);
    return m;
}

int hit_rate_bin(int index, int length) {
    if (length < 1 || index < 1 || index > length) throw std::out_of_range("step index outside trajectory");
    const double position = (index - 0.5) / length;
    return std::min(static_cast<int>(std::floor(position * kHitRateBins)), kHitRateBins - 1);
}

nlohmann::json HitRateReport::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& b : bins) {
        list.push_back({{"lower_pct", b.lower},
                        {"upper_pct", b.upper},
                        {"steps", b.steps},
                        {"counts", b.counts},
                        {"fractions", b.fractions}});
    }
    return {{"schema_version", kSchemaVersion}, {"total_steps", total_steps}, {"bins", std::move(list)}};
}

HitRateReport compute_hit_rates(const std::vector<std::vector<std::string>>& trajectories) {
    HitRateReport report;
    for (int i = 0; i < kHitRateBins; ++i) {
        report.bins[static_cast<std::size_t>(i)].lower = 100.0 * i / kHitRateBins;
        report.bins[static_cast<std::size_t>(i)].upper = 100.0 * (i + 1) / kHitRateBins;
    }
    for (const auto& teachers : trajectories) {
        const int length = static_cast<int>(teachers.size());
        for (int i = 1; i <= length; ++i) {
            auto& bin = report.bins[static_cast<std::size_t>(hit_rate_bin(i, length))];
            ++bin.steps;
            ++bin.counts[teachers[static_cast<std::size_t>(i - 1)]];
            ++report.total_steps;
        }
    }
    for (auto& bin : report.bins) {
        for (const auto& [teacher, count] : bin.counts) {
            bin.fractions[teacher] = static_cast<double>(count) / static_cast<double>(bin.steps);
        }
    }
    return report;
}

HitRateReport compute_hit_rates(const std::vector<DatasetEntry>& entries) {
    std::vector<std::vector<std::string>> sequences;
    sequences.reserve(entries.size());
    for (const auto& e : entries) sequences.push_back(step_teachers(e));
    return compute_hit_rates(sequences);
}

}  // namespace stepweave
