#include "stepweave/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace stepweave {

namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed,
                std::vector<std::string>& problems) {
    if (!j.is_object()) {
        problems.push_back(where + ": expected an object");
        return;
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) problems.push_back(where + ": unknown key '" + key + "'");
    }
}

std::string normalize_newlines(std::string text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
        out += text[i];
    }
    return out;
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

json to_json(const EndpointSpec& spec) {
    json j = {{"id", spec.id},
              {"base_url", spec.base_url},
              {"model", spec.model},
              {"temperature", spec.temperature},
              {"system_prompt", spec.system_prompt},
              {"max_parallel", spec.max_parallel},
              {"retry", {{"attempts", spec.retry.attempts}, {"backoff_ms", spec.retry.backoff_ms}}}};
    if (spec.api_key_env) j["api_key_env"] = *spec.api_key_env;
    return j;
}

EndpointSpec endpoint_spec_from_json(const json& j) {
    std::vector<std::string> problems;
    check_keys(j, "endpoint", {"id", "base_url", "model", "temperature", "system_prompt", "api_key_env",
                               "max_parallel", "retry"},
               problems);
    if (!problems.empty()) throw ConfigError(problems);
    EndpointSpec s;
    read(j, "id", s.id);
    read(j, "base_url", s.base_url);
    read(j, "model", s.model);
    read(j, "temperature", s.temperature);
    read(j, "system_prompt", s.system_prompt);
    if (auto it = j.find("api_key_env"); it != j.end() && !it->is_null()) s.api_key_env = it->get<std::string>();
    read(j, "max_parallel", s.max_parallel);
    if (auto it = j.find("retry"); it != j.end()) {
        read(*it, "attempts", s.retry.attempts);
        read(*it, "backoff_ms", s.retry.backoff_ms);
    }
    if (s.id.empty()) s.id = s.model;
    return s;
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    std::vector<std::string> problems;
    check_keys(j, "config",
               {"schema_version", "strategy", "corpus", "output_dir", "seed", "parallel_problems", "record_timestamps",
                "teachers", "prover", "decode", "mcts", "curation", "integration", "judge", "segmentation"},
               problems);
    if (!problems.empty()) throw ConfigError(problems);

    RunConfig c;
    try {
        if (auto it = j.find("strategy"); it != j.end()) c.strategy = strategy_from_string(it->get<std::string>());
        if (auto it = j.find("corpus"); it != j.end()) c.corpus_path = resolve(base_dir, it->get<std::string>());
        if (auto it = j.find("output_dir"); it != j.end()) c.output_dir = resolve(base_dir, it->get<std::string>());
        read(j, "seed", c.seed);
        read(j, "parallel_problems", c.parallel_problems);
        read(j, "record_timestamps", c.record_timestamps);

        if (auto it = j.find("teachers"); it != j.end()) {
            if (!it->is_array()) throw ConfigError({"teachers: expected an array"});
            for (const auto& t : *it) c.teachers.push_back(endpoint_spec_from_json(t));
        }

        if (auto it = j.find("prover"); it != j.end()) {
            check_keys(*it, "prover", {"endpoint", "criterion", "n_rollouts", "judgment_tokens", "template", "plugin"},
                       problems);
            if (auto e = it->find("endpoint"); e != it->end()) c.prover.endpoint = endpoint_spec_from_json(*e);
            if (auto cr = it->find("criterion"); cr != it->end()) {
                c.prover.criterion = criterion_from_string(cr->get<std::string>());
            }
            read(*it, "n_rollouts", c.prover.n_rollouts);
            read(*it, "judgment_tokens", c.prover.judgment_tokens);
            read(*it, "template", c.prover.scoring_template.pattern);
            read(*it, "plugin", c.prover.plugin);
        }

        if (auto it = j.find("decode"); it != j.end()) {
            check_keys(*it, "decode",
                       {"beam_size", "think_budget_tokens", "answer_budget_tokens", "per_step_cap", "max_steps",
                        "dedup_candidates"},
                       problems);
            read(*it, "beam_size", c.decode.beam_size);
            read(*it, "think_budget_tokens", c.decode.think_budget_tokens);
            read(*it, "answer_budget_tokens", c.decode.answer_budget_tokens);
            read(*it, "per_step_cap", c.decode.per_step_cap);
            read(*it, "max_steps", c.decode.max_steps);
            read(*it, "dedup_candidates", c.decode.dedup_candidates);
        }

        c.rollouts_per_teacher = c.decode.beam_size;
        c.mcts.n_trajectories = c.decode.beam_size;
        if (auto it = j.find("curation"); it != j.end()) {
            check_keys(*it, "curation", {"rollouts_per_teacher"}, problems);
            read(*it, "rollouts_per_teacher", c.rollouts_per_teacher);
        }
        if (auto it = j.find("mcts"); it != j.end()) {
            check_keys(*it, "mcts", {"exploration_c", "n_trajectories", "rollout_policy", "max_simulations"},
                       problems);
            read(*it, "exploration_c", c.mcts.exploration_c);
            read(*it, "n_trajectories", c.mcts.n_trajectories);
            read(*it, "max_simulations", c.mcts.max_simulations);
            if (auto p = it->find("rollout_policy"); p != it->end()) {
                c.mcts.rollout_policy = rollout_policy_from_string(p->get<std::string>());
            }
        }
        if (auto it = j.find("integration"); it != j.end()) {
            check_keys(*it, "integration", {"integrator", "max_attempts"}, problems);
            if (auto e = it->find("integrator"); e != it->end()) c.integrator = endpoint_spec_from_json(*e);
            read(*it, "max_attempts", c.integration_attempts);
        }
        if (auto it = j.find("judge"); it != j.end() && !it->is_null()) c.judge = endpoint_spec_from_json(*it);

        if (auto it = j.find("segmentation"); it != j.end()) {
            check_keys(*it, "segmentation", {"scheme", "prefix_terms"}, problems);
            if (auto s = it->find("scheme"); s != it->end()) {
                c.segmentation.kind = segment_kind_from_string(s->get<std::string>());
            }
            read(*it, "prefix_terms", c.segmentation.prefix_terms);
        }
    } catch (const ConfigError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const json::exception& e) {
        problems.push_back(std::string("wrong value type: ") + e.what());
    } catch (const std::invalid_argument& e) {
        problems.push_back(e.what());
    }
    if (!problems.empty()) throw ConfigError(problems);

    c.decode.seed = c.seed;
    c.mcts.seed = c.seed;
    c.prover.seed = c.seed;
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path.string()});
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError({path.string() + " is not valid JSON: " + e.what()});
    }
    return parse_run_config(j, path.parent_path());
}

std::vector<std::string> validate_run_config(const RunConfig& c) {
    std::vector<std::string> problems;
    const auto check_endpoint = [&](const EndpointSpec& s, const std::string& where) {
        if (s.base_url.empty()) problems.push_back(where + ": base_url is required");
        if (s.model.empty()) problems.push_back(where + ": model is required");
        if (s.temperature < 0.0) problems.push_back(where + ": temperature must be >= 0");
        if (s.max_parallel < 1) problems.push_back(where + ": max_parallel must be >= 1");
        if (s.retry.attempts < 0) problems.push_back(where + ": retry.attempts must be >= 0");
        if (s.retry.backoff_ms < 0) problems.push_back(where + ": retry.backoff_ms must be >= 0");
    };

    if (c.corpus_path.empty()) problems.push_back("corpus is required");
    if (c.parallel_problems < 1) problems.push_back("parallel_problems must be >= 1");
    if (c.teachers.empty()) problems.push_back("at least one teacher is required");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < c.teachers.size(); ++i) {
        const auto& t = c.teachers[i];
        const std::string where = "teachers[" + std::to_string(i) + "]";
        check_endpoint(t, where);
        if (!ids.insert(t.id).second) problems.push_back(where + ": duplicate id '" + t.id + "'");
        if (t.id == kIntegratorTeacherId) problems.push_back(where + ": id 'integrator' is reserved");
    }

    check_endpoint(c.prover.endpoint, "prover.endpoint");
    if (c.prover.n_rollouts < 1) problems.push_back("prover.n_rollouts must be >= 1");
    if (c.prover.judgment_tokens < 1) problems.push_back("prover.judgment_tokens must be >= 1");
    if (c.prover.scoring_template.pattern.find("{answer}") == std::string::npos) {
        problems.push_back("prover.template must contain {answer}");
    }
    if (c.prover.criterion == Criterion::external_plugin && !has_step_scorer(c.prover.plugin)) {
        problems.push_back("prover.plugin '" + c.prover.plugin + "' is not registered");
    }
    const bool step_level = is_step_level(c.prover.criterion);
    if (!step_level && (c.strategy == Strategy::cord || c.strategy == Strategy::greedy || c.strategy == Strategy::mcts)) {
        problems.push_back("prover.criterion " + std::string(to_string(c.prover.criterion)) +
                           " selects whole trajectories and cannot drive strategy " +
                           std::string(to_string(c.strategy)));
    }

    try {
        c.decode.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("decode: ") + e.what());
    }
    try {
        c.mcts.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("mcts: ") + e.what());
    }
    if (c.rollouts_per_teacher < 1) problems.push_back("curation.rollouts_per_teacher must be >= 1");

    if (c.strategy == Strategy::integration) {
        if (!c.integrator) problems.push_back("strategy integration requires integration.integrator");
        else check_endpoint(*c.integrator, "integration.integrator");
    }
    if (c.integration_attempts < 1) problems.push_back("integration.max_attempts must be >= 1");
    if (c.judge) check_endpoint(*c.judge, "judge");
    if (c.segmentation.kind == SegmentKind::prefix && c.segmentation.prefix_terms.empty()) {
        problems.push_back("segmentation.prefix_terms must be non-empty for the prefix scheme");
    }
    return problems;
}

std::vector<Problem> parse_corpus(std::string_view jsonl) {
    std::vector<Problem> out;
    std::set<std::string> ids;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "corpus line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw CorpusError(where + ": " + e.what());
        }
        Problem p;
        try {
            p.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
            p.question = normalize_newlines(j.at("question").get<std::string>());
            p.gold_answer = normalize_newlines(j.at("answer").get<std::string>());
            if (auto it = j.find("answer_mode"); it != j.end()) p.answer_mode = answer_mode_from_string(it->get<std::string>());
        } catch (const std::exception& e) {
            throw CorpusError(where + ": " + e.what());
        }
        if (p.id.empty()) throw CorpusError(where + ": empty id");
        if (p.gold_answer.empty()) throw CorpusError(where + ": empty answer");
        if (!ids.insert(p.id).second) throw CorpusError(where + ": duplicate id '" + p.id + "'");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Problem> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open corpus " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_corpus(buffer.str());
}

}  // namespace stepweave
