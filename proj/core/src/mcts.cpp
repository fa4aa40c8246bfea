#include <algorithm>
#include <limits>
#include <set>

#include "stepweave/baseline.hpp"

namespace stepweave {

namespace {

std::string rollout_key(const Trajectory& t) {
    std::string key = render_think(t, true);
    for (const auto& step : t.steps) {
        key += '\x1f';
        key += step.teacher_id;
    }
    return key;
}

std::unique_ptr<MctsNode> make_node(Trajectory prefix, MctsNode* parent, int ordinal, std::size_t teachers) {
    auto node = std::make_unique<MctsNode>();
    node->prefix = std::move(prefix);
    node->parent = parent;
    node->teacher_ordinal = ordinal;
    if (!node->prefix.finalized) {
        for (std::size_t k = 0; k < teachers; ++k) node->untried.push_back(static_cast<int>(k));
    }
    return node;
}

void mark_dead_upwards(MctsNode* node) {
    while (node && !node->dead && !node->terminal() && node->untried.empty() &&
           std::all_of(node->children.begin(), node->children.end(), [](const auto& c) { return c->dead; })) {
        node->dead = true;
        node = node->parent;
    }
}

Trajectory budget_close(Trajectory t, std::int64_t budget) {
    if (!t.finalized && t.think_tokens() >= budget) return force_finalize(t);
    return t;
}

nlohmann::json node_json(const MctsNode& node) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(node_json(*c));
    return {{"teacher_ordinal", node.teacher_ordinal},
            {"visits", node.visits},
            {"reward_sum", node.reward_sum},
            {"mean_reward", node.mean_reward()},
            {"finalized", node.prefix.finalized},
            {"dead", node.dead},
            {"children", std::move(children)}};
}

}  // namespace

std::string_view to_string(RolloutPolicy policy) {
    return policy == RolloutPolicy::round_robin ? "round_robin" : "greedy_single_teacher";
}

RolloutPolicy rollout_policy_from_string(std::string_view text) {
    if (text == "greedy_single_teacher") return RolloutPolicy::greedy_single_teacher;
    if (text == "round_robin") return RolloutPolicy::round_robin;
    throw std::invalid_argument("unknown rollout policy: " + std::string(text));
}

void MctsConfig::validate() const {
    if (!(exploration_c >= 0.0)) throw std::invalid_argument("exploration_c must be non-negative");
    if (n_trajectories < 1) throw std::invalid_argument("n_trajectories must be at least 1");
    if (max_simulations < n_trajectories) throw std::invalid_argument("max_simulations must cover n_trajectories");
}

double ucb1(double mean_reward, int parent_visits, int child_visits, double c) {
    if (child_visits <= 0) return std::numeric_limits<double>::infinity();
    return mean_reward + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / child_visits);
}

nlohmann::json MctsResult::trace_json() const {
    nlohmann::json sims = nlohmann::json::array();
    for (const auto& s : simulations) {
        nlohmann::json selections = nlohmann::json::array();
        for (const auto& sel : s.selections) {
            nlohmann::json ucb = nlohmann::json::array();
            for (double u : sel.ucb) ucb.push_back(std::isfinite(u) ? nlohmann::json(u) : nlohmann::json(nullptr));
            selections.push_back({{"depth", sel.depth}, {"ucb", std::move(ucb)}, {"chosen", sel.chosen}});
        }
        sims.push_back({{"index", s.index},
                        {"path", s.path},
                        {"selections", std::move(selections)},
                        {"expanded_teacher", s.expanded_teacher ? nlohmann::json(*s.expanded_teacher) : nlohmann::json(nullptr)},
                        {"reward", s.reward ? nlohmann::json(*s.reward) : nlohmann::json(nullptr)},
                        {"distinct", s.distinct},
                        {"error", s.error}});
    }
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& r : rollouts) scores.push_back(r.score ? nlohmann::json(*r.score) : nlohmann::json(nullptr));
    return {{"simulations", std::move(sims)},
            {"rollout_scores", std::move(scores)},
            {"expansion_calls", expansion_calls},
            {"rollout_calls", rollout_calls},
            {"answer_teacher", answer_teacher},
            {"answer_fallbacks", answer_fallbacks},
            {"tree", root ? node_json(*root) : nlohmann::json(nullptr)}};
}

MctsResult run_mcts(const Problem& problem, const TeacherPool& teachers, Prover& prover, const MctsConfig& config,
                    const Budgets& budgets, const DecodeConfig& decode, const SegmentScheme& scheme,
                    CostLedger& ledger) {
    config.validate();
    if (teachers.empty()) throw std::invalid_argument("mcts needs at least one teacher");
    const std::size_t k_count = teachers.size();

    MctsResult result;
    Trajectory empty;
    empty.problem_id = problem.id;
    empty.layout = scheme.kind;
    result.root = make_node(empty, nullptr, -1, k_count);
    std::set<std::string> seen;

    const auto step_caps = [&](const Trajectory& prefix) {
        StepCaps caps;
        caps.per_step_tokens = decode.per_step_cap;
        caps.remaining_think_tokens = budgets.think_tokens - prefix.think_tokens();
        return caps;
    };
    const auto extend = [&](int ordinal, const Trajectory& prefix) {
        auto proposed = propose_step(*teachers[static_cast<std::size_t>(ordinal)], problem, prefix,
                                     static_cast<int>(prefix.steps.size()) + 1, step_caps(prefix), scheme, ledger,
                                     config.seed);
        return budget_close(append_step(prefix, std::move(proposed.step), std::move(proposed.next_pending_header)),
                            budgets.think_tokens);
    };

    for (int sim = 0; sim < config.max_simulations && static_cast<int>(result.rollouts.size()) < config.n_trajectories;
         ++sim) {
        if (result.root->dead) break;
        SimulationRecord rec;
        rec.index = sim;

        MctsNode* node = result.root.get();
        int depth = 0;
        while (!node->terminal() && node->untried.empty()) {
            SelectionRecord sel;
            sel.depth = depth++;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < node->children.size(); ++i) {
                const auto& child = node->children[i];
                const double u = child->dead ? -std::numeric_limits<double>::infinity()
                                             : ucb1(child->mean_reward(), node->visits, child->visits,
                                                    config.exploration_c);
                sel.ucb.push_back(u);
                if (!child->dead && (sel.chosen < 0 || u > best)) {
                    best = u;
                    sel.chosen = static_cast<int>(i);
                }
            }
            rec.selections.push_back(sel);
            if (sel.chosen < 0) break;
            node = node->children[static_cast<std::size_t>(sel.chosen)].get();
            rec.path.push_back(node->teacher_ordinal);
        }
        if (node->dead) {
            rec.error = "selection reached an exhausted node";
            result.simulations.push_back(std::move(rec));
            continue;
        }

        MctsNode* leaf = node;
        Trajectory rollout;
        if (node->terminal()) {
            rollout = node->prefix;
        } else {
            const int ordinal = node->untried.front();
            node->untried.erase(node->untried.begin());
            rec.expanded_teacher = ordinal;
            Trajectory child_prefix;
            try {
                ++result.expansion_calls;
                child_prefix = extend(ordinal, node->prefix);
            } catch (const std::exception& e) {
                rec.error = std::string("expansion failed: ") + e.what();
                mark_dead_upwards(node);
                result.simulations.push_back(std::move(rec));
                continue;
            }
            node->children.push_back(make_node(child_prefix, node, ordinal, k_count));
            leaf = node->children.back().get();
            rec.path.push_back(ordinal);

            try {
                rollout = child_prefix;
                if (!rollout.finalized && config.rollout_policy == RolloutPolicy::greedy_single_teacher) {
                    ++result.rollout_calls;
                    rollout = continue_to_end(*teachers[static_cast<std::size_t>(ordinal)], problem, rollout,
                                              budgets.think_tokens - rollout.think_tokens(), scheme, ledger,
                                              config.seed);
                }
                for (std::size_t turn = 1; !rollout.finalized; ++turn) {
                    if (static_cast<int>(rollout.steps.size()) >= decode.max_steps) {
                        rollout = force_finalize(rollout);
                        break;
                    }
                    ++result.rollout_calls;
                    rollout = extend(static_cast<int>((static_cast<std::size_t>(ordinal) + turn) % k_count), rollout);
                }
            } catch (const std::exception& e) {
                rec.error = std::string("rollout failed: ") + e.what();
                node->children.pop_back();
                mark_dead_upwards(node);
                result.simulations.push_back(std::move(rec));
                continue;
            }
        }

        double reward = 0.0;
        try {
            reward = prover.score(problem, rollout, ledger).score;
        } catch (const std::exception& e) {
            rec.error = std::string("scoring failed: ") + e.what();
            if (leaf != node) node->children.pop_back();
            mark_dead_upwards(node);
            result.simulations.push_back(std::move(rec));
            continue;
        }
        rec.reward = reward;
        for (MctsNode* n = leaf; n; n = n->parent) {
            ++n->visits;
            n->reward_sum += reward;
        }
        if (seen.insert(rollout_key(rollout)).second) {
            rec.distinct = true;
            result.rollouts.push_back(with_score(rollout, reward));
        }
        result.simulations.push_back(std::move(rec));
    }

    if (result.rollouts.empty()) {
        result.error = "no rollout completed";
        return result;
    }
    if (static_cast<int>(result.rollouts.size()) < config.n_trajectories) {
        result.error = "only " + std::to_string(result.rollouts.size()) + " distinct rollouts within " +
                       std::to_string(config.max_simulations) + " simulations";
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.rollouts.size(); ++i) {
        if (*result.rollouts[i].score > *result.rollouts[best].score) best = i;
    }
    const Trajectory& chosen = result.rollouts[best];
    try {
        auto [answered, teacher] = answer_with_fallback(
            problem, chosen, teachers, chosen.last_teacher_id.value_or(teachers.front()->id()),
            budgets.answer_tokens, config.seed, ledger, result.answer_fallbacks);
        result.trajectory = std::move(answered);
        result.answer_teacher = teacher;
        result.ok = true;
    } catch (const EndpointError& e) {
        result.trajectory = chosen;
        result.error = e.what();
        result.ok = false;
    }
    return result;
}

}  // namespace stepweave
