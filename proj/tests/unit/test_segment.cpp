#include <gtest/gtest.h>

#include <random>

#include "stepweave/segment.hpp"

namespace stepweave {
namespace {

std::vector<std::string> texts(const std::vector<Segment>& segments) {
    std::vector<std::string> out;
    for (const auto& s : segments) out.push_back(s.text);
    return out;
}

struct GrammarCase {
    std::string line;
    std::optional<MarkerMatch> want;
};

TEST(MarkerGrammar, TableDriven) {
    const std::vector<GrammarCase> cases = {
        {"### Step 2. Recalling the theorem", MarkerMatch{2, "### Step 2."}},
        {"### Step 12:", MarkerMatch{12, "### Step 12:"}},
        {"### Step 3", MarkerMatch{3, "### Step 3"}},
        {"### Step 3.", MarkerMatch{3, "### Step 3."}},
        {"### Step 7 then", MarkerMatch{7, "### Step 7"}},
        {"###  Step\t4.", MarkerMatch{4, "###  Step\t4."}},
        {"Step 2. foo", std::nullopt},
        {"## Step 2.", std::nullopt},
        {"### Step", std::nullopt},
        {"### Step x.", std::nullopt},
        {"###Step 2.", std::nullopt},
        {" ### Step 2.", std::nullopt},
        {"### step 2.", std::nullopt},
        {"", std::nullopt},
    };
    for (const auto& c : cases) EXPECT_EQ(marker_grammar_match(c.line), c.want) << c.line;
}

TEST(Segment, PromptGuidedCutsAtLineStartMarkers) {
    const std::string text = "### Step 1. a\nmore\n### Step 2: b\nquote ### Step 3. inline";
    const auto segs = segment(text, SegmentScheme::prompt_guided());
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].text, "### Step 1. a\nmore\n");
    EXPECT_EQ(segs[0].boundary, BoundaryKind::marker);
    EXPECT_EQ(segs[1].text, "### Step 2: b\nquote ### Step 3. inline");
}

TEST(Segment, PromptGuidedPreambleIsStartOfText) {
    const auto segs = segment("intro\n### Step 1. x", SegmentScheme::prompt_guided());
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].boundary, BoundaryKind::start_of_text);
    EXPECT_EQ(segs[1].boundary, BoundaryKind::marker);
}

TEST(Segment, LineBreakDelimiterBelongsToPrecedingSegment) {
    EXPECT_EQ(texts(segment("a\n\nb\n\nc", SegmentScheme::line_break())),
              (std::vector<std::string>{"a\n\n", "b\n\n", "c"}));
    EXPECT_EQ(texts(segment("a\n\n", SegmentScheme::line_break())), (std::vector<std::string>{"a\n\n"}));
    EXPECT_EQ(texts(segment("a\nb", SegmentScheme::line_break())), (std::vector<std::string>{"a\nb"}));
}

TEST(Segment, PrefixSplitsBeforeTheTerm) {
    const std::string text = "Hmm, but wait, if you have four circles";
    const auto segs = segment(text, SegmentScheme::prefix());
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].text, "Hmm, but ");
    EXPECT_EQ(segs[1].text, "wait, if you have four circles");
    EXPECT_EQ(segs[1].boundary, BoundaryKind::prefix_term);
}

TEST(Segment, PrefixIsCaseInsensitiveOnWordBoundaries) {
    EXPECT_EQ(segment("x Wait y", SegmentScheme::prefix()).size(), 2u);
    EXPECT_EQ(segment("await awaiting", SegmentScheme::prefix()).size(), 1u);
    EXPECT_EQ(segment("notwaiting", SegmentScheme::prefix()).size(), 1u);
}

TEST(Segment, PrefixPrefersLongestTerm) {
    SegmentScheme scheme{SegmentKind::prefix, {"let me", "let me check"}};
    const auto segs = segment("ok let me check this", scheme);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[1].text, "let me check this");
}

TEST(Segment, NoBoundaryYieldsOneSegment) {
    for (const auto& scheme : {SegmentScheme::prompt_guided(), SegmentScheme::line_break(), SegmentScheme::prefix()}) {
        const auto segs = segment("plain text", scheme);
        ASSERT_EQ(segs.size(), 1u);
        EXPECT_EQ(segs[0].boundary, BoundaryKind::start_of_text);
    }
}

TEST(Segment, EmptyInputYieldsOneEmptySegment) {
    const auto segs = segment("", SegmentScheme::line_break());
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].text, "");
}

TEST(Segment, LosslessOnRandomBytes) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "ab #\n:.Swait1";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const int n = std::uniform_int_distribution<int>(0, 60)(rng);
        for (int i = 0; i < n; ++i) {
            text += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        }
        for (const auto& scheme : {SegmentScheme::prompt_guided(), SegmentScheme::line_break(), SegmentScheme::prefix()}) {
            std::string joined;
            for (const auto& s : segment(text, scheme)) joined += s.text;
            EXPECT_EQ(joined, text);
        }
    }
}

TEST(StepLayout, StopSequences) {
    EXPECT_EQ(step_stop_sequences(SegmentScheme::prompt_guided()), (std::vector<std::string>{"\n### Step", "</think>"}));
    EXPECT_EQ(step_stop_sequences(SegmentScheme::line_break()), (std::vector<std::string>{"\n\n", "</think>"}));
    const auto prefix = step_stop_sequences(SegmentScheme{SegmentKind::prefix, {"wait"}});
    EXPECT_EQ(prefix, (std::vector<std::string>{"wait", "Wait", "</think>"}));
}

TEST(StepLayout, ForcedOpenings) {
    EXPECT_EQ(forced_step_opening(SegmentKind::prompt_guided, 1, ""), "\n### Step 1.");
    EXPECT_EQ(forced_step_opening(SegmentKind::prompt_guided, 3, ""), "\n### Step 3.");
    EXPECT_EQ(forced_step_opening(SegmentKind::line_break, 1, ""), "\n");
    EXPECT_EQ(forced_step_opening(SegmentKind::line_break, 2, ""), "");
    EXPECT_EQ(forced_step_opening(SegmentKind::prefix, 2, "Wait"), "Wait");
}

TEST(ParseThink, InvertsPromptGuidedRendering) {
    const auto parsed = parse_think_text("<think>\n### Step 1. Add.\n### Step 2. Done.</think>", {});
    EXPECT_TRUE(parsed.preamble.empty());
    ASSERT_EQ(parsed.steps.size(), 2u);
    EXPECT_EQ(parsed.steps[0], (ParsedStep{"### Step 1.", " Add."}));
    EXPECT_EQ(parsed.steps[1], (ParsedStep{"### Step 2.", " Done."}));
}

TEST(ParseThink, LineBreakAndPrefix) {
    const auto lb = parse_think_region("\nFirst.\n\nSecond.", SegmentScheme::line_break());
    ASSERT_EQ(lb.steps.size(), 2u);
    EXPECT_EQ(lb.steps[0].body, "First.\n\n");
    EXPECT_EQ(lb.steps[1].body, "Second.");

    const auto px = parse_think_region("\nCompute it. Wait, recheck.", SegmentScheme::prefix());
    ASSERT_EQ(px.steps.size(), 2u);
    EXPECT_EQ(px.steps[0], (ParsedStep{"", "Compute it. "}));
    EXPECT_EQ(px.steps[1], (ParsedStep{"Wait", ", recheck."}));
}

}  // namespace
}  // namespace stepweave
