#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "stepweave/dataset.hpp"

namespace stepweave {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("stepweave_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Trajectory two_steps() {
    ReasoningStep a;
    a.index = 1;
    a.header = "### Step 1.";
    a.body = " Add.";
    a.teacher_id = "A";
    a.token_count = 2;
    ReasoningStep b = a;
    b.index = 2;
    b.header = "### Step 2.";
    b.body = " Done.";
    b.teacher_id = "B";
    b.finish = StepFinish::think_end;
    auto t = append_step(append_step(Trajectory{}, a), b);
    return with_final_answer(with_score(t, 0.75), "\\boxed{3}");
}

TEST(DatasetEntry, MadeFromFinalizedTrajectory) {
    const auto e = make_entry(Problem{"p1", "One plus two?", "3"}, two_steps(), "cord");
    EXPECT_EQ(e.think_text, "<think>\n### Step 1. Add.\n### Step 2. Done.</think>");
    EXPECT_EQ(e.answer_text, "\\boxed{3}");
    EXPECT_EQ(e.selected_score, 0.75);
    EXPECT_EQ(step_teachers(e), (std::vector<std::string>{"A", "B"}));
    EXPECT_THROW(make_entry(Problem{"p1", "q", "3"}, Trajectory{}, "cord"), TrajectoryError);
}

TEST(DatasetEntry, JsonRoundTrip) {
    auto e = make_entry(Problem{"p1", "One plus two?", "3"}, two_steps(), "cord");
    e.verdict = Verdict::correct;
    e.flags = {"answer_fallback"};
    e.started_at = "2026-01-01T00:00:00Z";
    EXPECT_EQ(entry_from_json(to_json(e)), e);
    EXPECT_EQ(to_json(e)["schema_version"], kSchemaVersion);
}

TEST(DatasetEntry, FileRoundTrip) {
    const auto dir = temp_dir("entries");
    auto a = make_entry(Problem{"p1", "q1", "3"}, two_steps(), "cord");
    auto b = make_entry(Problem{"p2", "q2\nwith newline", "3"}, two_steps(), "greedy");
    b.selected_score.reset();
    write_entries(dir / "entries.jsonl", {a, b});
    EXPECT_EQ(read_entries(dir / "entries.jsonl"), (std::vector<DatasetEntry>{a, b}));
    fs::remove_all(dir);
}

TEST(Sft, ResponseJoinsThinkAndAnswer) {
    const auto e = make_entry(Problem{"p1", "One plus two?", "3"}, two_steps(), "cord");
    const auto r = to_sft(e);
    EXPECT_EQ(r.question, "One plus two?");
    EXPECT_EQ(r.response, "<think>\n### Step 1. Add.\n### Step 2. Done.</think>\n\\boxed{3}");

    const auto dir = temp_dir("sft");
    export_sft({e}, dir / "sft.jsonl");
    EXPECT_EQ(load_sft(dir / "sft.jsonl"), (std::vector<SftRecord>{r}));

    auto open = e;
    open.think_text = "<think>\nunfinished";
    EXPECT_THROW(export_sft({open}, dir / "bad.jsonl"), std::invalid_argument);
    fs::remove_all(dir);
}

TEST(WriteFileAtomic, ReplacesContent) {
    const auto dir = temp_dir("atomic");
    write_file_atomic(dir / "x.txt", "one");
    write_file_atomic(dir / "x.txt", "two");
    std::ifstream in(dir / "x.txt");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(text, "two");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
    fs::remove_all(dir);
}

}  // namespace
}  // namespace stepweave
