#include "stepweave/dataset.hpp"

#include <fstream>
#include <sstream>

namespace stepweave {

namespace {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

DatasetEntry make_entry(const Problem& problem, const Trajectory& trajectory, std::string strategy) {
    if (!trajectory.finalized) throw TrajectoryError("dataset entries need a finalized trajectory");
    DatasetEntry e;
    e.problem_id = problem.id;
    e.question = problem.question;
    e.think_text = render_think(trajectory, true);
    e.answer_text = trajectory.final_answer.value_or("");
    e.selected_score = trajectory.score;
    e.strategy = std::move(strategy);
    for (const auto& s : trajectory.steps) e.steps.push_back({s.index, s.teacher_id, s.token_count, s.finish});
    return e;
}

nlohmann::json to_json(const DatasetEntry& entry) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : entry.steps) {
        steps.push_back({{"index", s.index},
                         {"teacher_id", s.teacher_id},
                         {"token_count", s.token_count},
                         {"finish", to_string(s.finish)}});
    }
    nlohmann::json j = {
        {"schema_version", kSchemaVersion},
        {"problem_id", entry.problem_id},
        {"question", entry.question},
        {"think_text", entry.think_text},
        {"answer_text", entry.answer_text},
        {"selected_score", entry.selected_score ? nlohmann::json(*entry.selected_score) : nlohmann::json(nullptr)},
        {"answer_correct", entry.verdict == Verdict::unjudged ? nlohmann::json("unjudged")
                                                               : nlohmann::json(entry.verdict == Verdict::correct)},
        {"steps", std::move(steps)},
        {"strategy", entry.strategy},
        {"flags", entry.flags},
    };
    if (entry.started_at || entry.finished_at) {
        const auto stamp = [](const std::optional<std::string>& t) {
            return t ? nlohmann::json(*t) : nlohmann::json(nullptr);
        };
        j["timestamps"] = {{"started_at", stamp(entry.started_at)}, {"finished_at", stamp(entry.finished_at)}};
    }
    return j;
}

DatasetEntry entry_from_json(const nlohmann::json& j) {
    DatasetEntry e;
    e.problem_id = j.at("problem_id").get<std::string>();
    e.question = j.at("question").get<std::string>();
    e.think_text = j.at("think_text").get<std::string>();
    e.answer_text = j.at("answer_text").get<std::string>();
    if (const auto& s = j.at("selected_score"); !s.is_null()) e.selected_score = s.get<double>();
    const auto& correct = j.at("answer_correct");
    if (correct.is_boolean()) e.verdict = correct.get<bool>() ? Verdict::correct : Verdict::incorrect;
    for (const auto& s : j.at("steps")) {
        e.steps.push_back({s.at("index").get<int>(), s.at("teacher_id").get<std::string>(),
                           s.at("token_count").get<std::int64_t>(),
                           step_finish_from_string(s.at("finish").get<std::string>())});
    }
    e.strategy = j.value("strategy", std::string{});
    e.flags = j.value("flags", std::vector<std::string>{});
    if (auto it = j.find("timestamps"); it != j.end()) {
        const auto stamp = [&](const char* key) -> std::optional<std::string> {
            const auto field = it->find(key);
            if (field == it->end() || field->is_null()) return std::nullopt;
            return field->get<std::string>();
        };
        e.started_at = stamp("started_at");
        e.finished_at = stamp("finished_at");
    }
    return e;
}

std::vector<std::string> step_teachers(const DatasetEntry& entry) {
    std::vector<std::string> out;
    out.reserve(entry.steps.size());
    for (const auto& s : entry.steps) out.push_back(s.teacher_id);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_entries(const std::filesystem::path& path, const std::vector<DatasetEntry>& entries) {
    std::string text;
    for (const auto& e : entries) {
        text += to_json(e).dump();
        text += '\n';
    }
    write_file_atomic(path, text);
}

std::vector<DatasetEntry> read_entries(const std::filesystem::path& path) {
    std::vector<DatasetEntry> out;
    for (const auto& j : read_jsonl(path)) out.push_back(entry_from_json(j));
    return out;
}

SftRecord to_sft(const DatasetEntry& entry) {
    return {entry.question, entry.think_text + "\n" + entry.answer_text};
}

void export_sft(const std::vector<DatasetEntry>& entries, const std::filesystem::path& path) {
    std::string text;
    for (const auto& e : entries) {
        if (!e.think_text.starts_with(kThinkOpen) || !e.think_text.ends_with(kThinkClose)) {
            throw std::invalid_argument("entry " + e.problem_id + " has an unclosed reasoning region");
        }
        const auto record = to_sft(e);
        text += nlohmann::json{{"question", record.question}, {"response", record.response}}.dump();
        text += '\n';
    }
    write_file_atomic(path, text);
}

std::vector<SftRecord> load_sft(const std::filesystem::path& path) {
    std::vector<SftRecord> out;
    for (const auto& j : read_jsonl(path)) {
        out.push_back({j.at("question").get<std::string>(), j.at("response").get<std::string>()});
    }
    return out;
}

}  // namespace stepweave
