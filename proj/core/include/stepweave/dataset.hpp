#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepweave/answer.hpp"
#include "stepweave/trajectory.hpp"

namespace stepweave {

inline constexpr int kSchemaVersion = 1;

struct EntryStep {
    int index = 0;
    std::string teacher_id;
    std::int64_t token_count = 0;
    StepFinish finish = StepFinish::boundary;

    bool operator==(const EntryStep&) const = default;
};

/// One distillation record: the question with its selected reasoning and answer.
struct DatasetEntry {
    std::string problem_id;
    std::string question;
    std::string think_text;   // `<think>` ... `</think>`
    std::string answer_text;
    std::optional<double> selected_score;
    Verdict verdict = Verdict::unjudged;
    std::vector<EntryStep> steps;
    std::string strategy;
    std::vector<std::string> flags;  // e.g. "max_steps", "answer_fallback"
    std::optional<std::string> started_at;
    std::optional<std::string> finished_at;

    bool operator==(const DatasetEntry&) const = default;
};

DatasetEntry make_entry(const Problem& problem, const Trajectory& trajectory, std::string strategy);

nlohmann::json to_json(const DatasetEntry& entry);
DatasetEntry entry_from_json(const nlohmann::json& j);

/// Teacher id of every step, in order.
std::vector<std::string> step_teachers(const DatasetEntry& entry);

void write_entries(const std::filesystem::path& path, const std::vector<DatasetEntry>& entries);
std::vector<DatasetEntry> read_entries(const std::filesystem::path& path);

struct SftRecord {
    std::string question;
    std::string response;  // think_text + "\n" + answer_text

    bool operator==(const SftRecord&) const = default;
};

SftRecord to_sft(const DatasetEntry& entry);
/// One JSON object per line. Throws std::runtime_error on IO failure and
/// std::invalid_argument for entries whose think text is not closed.
void export_sft(const std::vector<DatasetEntry>& entries, const std::filesystem::path& path);
std::vector<SftRecord> load_sft(const std::filesystem::path& path);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace stepweave
