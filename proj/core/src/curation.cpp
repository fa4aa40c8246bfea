#include "stepweave/baseline.hpp"
#include "stepweave/parallel.hpp"

namespace stepweave {

nlohmann::json CurationResult::trace_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : candidates) {
        list.push_back({
            {"teacher", c.teacher_id},
            {"teacher_ordinal", c.teacher_ordinal},
            {"rollout", c.rollout},
            {"ok", c.trajectory.has_value() && c.score.has_value()},
            {"score", c.score ? nlohmann::json(*c.score) : nlohmann::json(nullptr)},
            {"steps", c.trajectory ? static_cast<int>(c.trajectory->steps.size()) : 0},
            {"think_tokens", c.trajectory ? c.trajectory->think_tokens() : 0},
            {"error", c.error},
        });
    }
    return {{"candidates", std::move(list)}, {"selected", selected}};
}

CurationResult run_curation(const Problem& problem, const TeacherPool& teachers, Prover& prover,
                            const CurationConfig& config, const SegmentScheme& scheme, CostLedger& ledger) {
    if (config.rollouts_per_teacher < 1) throw std::invalid_argument("rollouts_per_teacher must be at least 1");
    if (teachers.empty()) throw std::invalid_argument("curation needs at least one teacher");

    const auto rollouts = static_cast<std::size_t>(config.rollouts_per_teacher);
    CurationResult result;
    result.candidates.resize(teachers.size() * rollouts);

    parallel_for(result.candidates.size(), result.candidates.size(), [&](std::size_t i) {
        auto& c = result.candidates[i];
        c.teacher_ordinal = static_cast<int>(i / rollouts);
        c.rollout = static_cast<int>(i % rollouts);
        Endpoint& teacher = *teachers[static_cast<std::size_t>(c.teacher_ordinal)];
        c.teacher_id = teacher.id();
        try {
            auto full = generate_full(teacher, problem, config.budgets, scheme, ledger,
                                      config.seed + static_cast<std::uint64_t>(c.rollout));
            c.trajectory = std::move(full.trajectory);
        } catch (const std::exception& e) {
            c.error = e.what();
            return;
        }
        try {
            c.score = is_step_level(prover.spec().criterion)
                          ? prover.score(problem, *c.trajectory, ledger).score
                          : prover.score_predictive_perplexity(problem, *c.trajectory, ledger).score;
            c.trajectory = with_score(*c.trajectory, *c.score);
        } catch (const std::exception& e) {
            c.error = e.what();
            c.score.reset();
        }
    });

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        if (result.candidates[i].trajectory && result.candidates[i].score) usable.push_back(i);
    }
    if (usable.empty()) {
        result.error = "every curation candidate failed";
        return result;
    }

    std::size_t chosen = usable.front();
    const Criterion criterion = prover.spec().criterion;
    if (is_step_level(criterion)) {
        for (std::size_t i : usable) {
            const auto& a = result.candidates[i];
            const auto& b = result.candidates[chosen];
            if (ranks_before(a.score, {a.teacher_ordinal, a.rollout}, b.score, {b.teacher_ordinal, b.rollout})) {
                chosen = i;
            }
        }
    } else {
        std::vector<Trajectory> pool;
        for (std::size_t i : usable) pool.push_back(*result.candidates[i].trajectory);
        chosen = usable[select_trajectory(criterion, pool, config.seed)];
    }
    result.selected = static_cast<int>(chosen);
    result.trajectory = *result.candidates[chosen].trajectory;
    result.ok = true;
    return result;
}

}  // namespace stepweave
