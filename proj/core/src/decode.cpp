#include "stepweave/decode.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "stepweave/parallel.hpp"
#include "stepweave/teacher.hpp"

namespace stepweave {

namespace {

struct PoolEntry {
    TieKey key;
    Trajectory extended;
    CandidateRecord record;
};

// Candidates that are the same proposal (same content and attribution) share
// this key; with dedup on, attribution is ignored.
std::string collapse_key(const Trajectory& t, bool dedup) {
    std::string key = render_think(t, true);
    if (dedup) return key;
    for (const auto& step : t.steps) {
        key += '\x1f';
        key += step.teacher_id;
        key += '/';
        key += to_string(step.finish);
    }
    return key;
}

}  // namespace

void DecodeConfig::validate() const {
    if (beam_size < 1) throw std::invalid_argument("beam_size must be at least 1");
    if (think_budget_tokens <= 0) throw std::invalid_argument("think_budget_tokens must be positive");
    if (answer_budget_tokens <= 0) throw std::invalid_argument("answer_budget_tokens must be positive");
    if (per_step_cap <= 0) throw std::invalid_argument("per_step_cap must be positive");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
}

nlohmann::json DecodeTrace::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const auto& s : steps) {
        nlohmann::json pool = nlohmann::json::array();
        for (const auto& c : s.pool) {
            pool.push_back({
                {"parent", c.parent},
                {"teacher", c.teacher_id},
                {"teacher_ordinal", c.teacher_ordinal},
                {"score", c.score ? nlohmann::json(*c.score) : nlohmann::json(nullptr)},
                {"carried", c.carried},
                {"collapsed", c.collapsed},
                {"finalized", c.finalized},
                {"forced", c.forced},
                {"finish", c.finish},
                {"token_count", c.token_count},
                {"think_tokens", c.think_tokens},
                {"beam_rank", c.beam_rank},
            });
        }
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& f : s.failures) {
            failures.push_back(
                {{"parent", f.parent}, {"teacher_ordinal", f.teacher_ordinal}, {"stage", f.stage}, {"error", f.error}});
        }
        steps_json.push_back({{"step", s.step}, {"pool", std::move(pool)}, {"failures", std::move(failures)},
                              {"frozen", s.frozen}});
    }
    return {{"steps", std::move(steps_json)},
            {"hit_max_steps", hit_max_steps},
            {"answer_teacher", answer_teacher},
            {"answer_fallbacks", answer_fallbacks}};
}

BeamState initial_beam(const Problem& problem, const DecodeConfig& config, const SegmentScheme& scheme) {
    Trajectory empty;
    empty.problem_id = problem.id;
    empty.layout = scheme.kind;
    BeamState beam;
    beam.step_index = 0;
    beam.hypotheses.assign(static_cast<std::size_t>(config.beam_size), empty);
    return beam;
}

StepOutcome decode_step(const Problem& problem, const BeamState& beam, const TeacherPool& teachers, Prover& prover,
                        const DecodeConfig& config, const SegmentScheme& scheme, CostLedger& ledger) {
    if (beam.hypotheses.empty()) throw BeamFailed("beam is empty");
    if (teachers.empty()) throw std::invalid_argument("teacher pool is empty");

    const int step_number = beam.step_index + 1;
    const int k_count = static_cast<int>(teachers.size());

    struct Task {
        int slot;
        int ordinal;
    };
    std::vector<Task> tasks;
    std::vector<PoolEntry> carried;
    for (int b = 0; b < static_cast<int>(beam.hypotheses.size()); ++b) {
        const auto& h = beam.hypotheses[static_cast<std::size_t>(b)];
        if (h.finalized) {
            carried.push_back({{b, 0}, h, {}});
            continue;
        }
        for (int k = 0; k < k_count; ++k) tasks.push_back({b, k});
    }

    std::vector<std::optional<PoolEntry>> produced(tasks.size());
    std::vector<std::optional<FailureRecord>> failed(tasks.size());

    parallel_for(tasks.size(), tasks.size(), [&](std::size_t i) {
        const auto [slot, ordinal] = tasks[i];
        const Trajectory& parent = beam.hypotheses[static_cast<std::size_t>(slot)];
        Endpoint& teacher = *teachers[static_cast<std::size_t>(ordinal)];
        const int step_index = static_cast<int>(parent.steps.size()) + 1;
        StepCaps caps;
        caps.per_step_tokens = config.per_step_cap;
        caps.remaining_think_tokens = config.think_budget_tokens - parent.think_tokens();

        Trajectory extended;
        try {
            auto proposed = propose_step(teacher, problem, parent, step_index, caps, scheme, ledger,
                                         config.seed + static_cast<std::uint64_t>(slot));
            extended = append_step(parent, std::move(proposed.step), std::move(proposed.next_pending_header));
        } catch (const std::exception& e) {
            failed[i] = FailureRecord{slot, ordinal, "generation", e.what()};
            return;
        }
        bool forced = false;
        if (!extended.finalized && extended.think_tokens() >= config.think_budget_tokens) {
            extended = force_finalize(extended);
            forced = true;
        }
        double score = 0.0;
        try {
            score = prover.score(problem, extended, ledger).score;
        } catch (const std::exception& e) {
            failed[i] = FailureRecord{slot, ordinal, "scoring", e.what()};
            return;
        }
        extended = with_score(extended, score);

        PoolEntry entry;
        entry.key = {slot, ordinal};
        const auto& step = extended.steps.back();
        entry.record.parent = slot;
        entry.record.teacher_ordinal = ordinal;
        entry.record.teacher_id = teacher.id();
        entry.record.score = score;
        entry.record.finalized = extended.finalized;
        entry.record.forced = forced;
        entry.record.finish = std::string(to_string(step.finish));
        entry.record.token_count = step.token_count;
        entry.record.think_tokens = extended.think_tokens();
        entry.record.body = step.body;
        entry.extended = std::move(extended);
        produced[i] = std::move(entry);
    });

    StepOutcome out;
    out.trace.step = step_number;

    std::vector<PoolEntry> pool;
    std::vector<bool> slot_has_candidate(beam.hypotheses.size(), false);
    std::vector<bool> slot_active(beam.hypotheses.size(), false);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        slot_active[static_cast<std::size_t>(tasks[i].slot)] = true;
        if (produced[i]) {
            slot_has_candidate[static_cast<std::size_t>(tasks[i].slot)] = true;
            pool.push_back(std::move(*produced[i]));
        } else if (failed[i]) {
            out.trace.failures.push_back(std::move(*failed[i]));
        }
    }

    bool any_progress = false;
    for (std::size_t b = 0; b < beam.hypotheses.size(); ++b) {
        if (!slot_active[b]) continue;
        if (slot_has_candidate[b]) {
            any_progress = true;
        } else {
            out.trace.frozen.push_back(static_cast<int>(b));
            carried.push_back({{static_cast<int>(b), 0}, beam.hypotheses[b], {}});
        }
    }
    if (!any_progress && !tasks.empty()) {
        throw BeamFailed("every candidate failed at step " + std::to_string(step_number));
    }

    for (auto& c : carried) {
        c.record.parent = c.key.parent_beam_index;
        c.record.teacher_ordinal = c.key.teacher_ordinal;
        c.record.teacher_id = c.extended.last_teacher_id.value_or("");
        c.record.score = c.extended.score;
        c.record.carried = true;
        c.record.finalized = c.extended.finalized;
        c.record.think_tokens = c.extended.think_tokens();
        pool.push_back(std::move(c));
    }

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(pool[a].extended.score, pool[a].key, pool[b].extended.score, pool[b].key);
    });

    std::set<std::string> seen;
    out.beam.step_index = step_number;
    for (std::size_t i : order) {
        auto& entry = pool[i];
        if (!seen.insert(collapse_key(entry.extended, config.dedup_candidates)).second) {
            entry.record.collapsed = true;
            continue;
        }
        if (static_cast<int>(out.beam.hypotheses.size()) >= config.beam_size) continue;
        entry.record.beam_rank = static_cast<int>(out.beam.hypotheses.size());
        out.beam.hypotheses.push_back(entry.extended);
    }
    for (std::size_t i : order) out.trace.pool.push_back(std::move(pool[i].record));
    return out;
}

std::pair<Trajectory, std::string> answer_with_fallback(const Problem& problem, const Trajectory& finalized,
                                                        const TeacherPool& teachers, const std::string& preferred,
                                                        std::int64_t answer_tokens, std::uint64_t seed,
                                                        CostLedger& ledger, std::vector<std::string>& fallbacks) {
    std::vector<Endpoint*> order;
    for (const auto& t : teachers) {
        if (t->id() == preferred) order.push_back(t.get());
    }
    for (const auto& t : teachers) {
        if (t->id() != preferred) order.push_back(t.get());
    }
    std::string last_error = "no teachers";
    for (Endpoint* teacher : order) {
        try {
            auto answer = generate_answer(*teacher, problem, finalized, answer_tokens, ledger, seed);
            return {with_final_answer(finalized, std::move(answer.text)), teacher->id()};
        } catch (const EndpointError& e) {
            last_error = e.what();
        } catch (const MalformedResponse& e) {
            last_error = e.what();
        }
        fallbacks.push_back(teacher->id());
    }
    throw EndpointError("answer generation failed: " + last_error, 0, false);
}

DecodeResult decode(const Problem& problem, const TeacherPool& teachers, Prover& prover, const DecodeConfig& config,
                    const SegmentScheme& scheme, CostLedger& ledger) {
    config.validate();
    if (teachers.empty()) throw std::invalid_argument("decode needs at least one teacher");

    DecodeResult result;
    BeamState beam = initial_beam(problem, config, scheme);
    try {
        while (beam.step_index < config.max_steps) {
            const bool open = std::any_of(beam.hypotheses.begin(), beam.hypotheses.end(),
                                          [](const Trajectory& t) { return !t.finalized; });
            if (!open) break;
            auto outcome = decode_step(problem, beam, teachers, prover, config, scheme, ledger);
            result.trace.steps.push_back(std::move(outcome.trace));
            beam = std::move(outcome.beam);
        }
    } catch (const BeamFailed& e) {
        result.error = e.what();
        result.final_beam = beam.hypotheses;
        return result;
    }

    for (auto& h : beam.hypotheses) {
        if (!h.finalized) {
            h = force_finalize(h);
            result.trace.hit_max_steps = true;
        }
    }
    result.final_beam = beam.hypotheses;
    const Trajectory& best = beam.hypotheses.front();

    try {
        auto [answered, teacher] =
            answer_with_fallback(problem, best, teachers, best.last_teacher_id.value_or(teachers.front()->id()),
                                 config.answer_budget_tokens, config.seed, ledger, result.trace.answer_fallbacks);
        result.trajectory = std::move(answered);
        result.trace.answer_teacher = teacher;
        result.ok = true;
    } catch (const EndpointError& e) {
        result.trajectory = best;
        result.error = e.what();
    }
    return result;
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::cord: return "cord";
        case Strategy::greedy: return "greedy";
        case Strategy::curation: return "curation";
        case Strategy::integration: return "integration";
        case Strategy::mcts: return "mcts";
    }
    return "cord";
}

Strategy strategy_from_string(std::string_view text) {
    if (text == "cord") return Strategy::cord;
    if (text == "greedy") return Strategy::greedy;
    if (text == "curation") return Strategy::curation;
    if (text == "integration") return Strategy::integration;
    if (text == "mcts") return Strategy::mcts;
    throw std::invalid_argument("unknown strategy: " + std::string(text));
}

CallCounts expected_call_counts(int steps, int teachers, int beam, Strategy strategy) {
    if (steps < 1 || teachers < 1 || beam < 1) throw std::invalid_argument("call counts need positive arguments");
    const std::int64_t t = steps, k = teachers, b = beam;
    switch (strategy) {
        case Strategy::cord: return {t * k * b, t * k * b};
        case Strategy::greedy: return {t * k, t * k};
        case Strategy::curation: return {k * b, k * b};
        case Strategy::integration:
        case Strategy::mcts: break;
    }
    throw std::invalid_argument("no closed form for strategy " + std::string(to_string(strategy)));
}

}  // namespace stepweave
