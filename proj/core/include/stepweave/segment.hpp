#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stepweave/trajectory.hpp"

namespace stepweave {

/// Self-verification, multi-method validation and self-correction phrases.
const std::vector<std::string>& default_prefix_terms();

struct SegmentScheme {
    SegmentKind kind = SegmentKind::prompt_guided;
    std::vector<std::string> prefix_terms;  // consulted only for SegmentKind::prefix

    static SegmentScheme prompt_guided() { return {}; }
    static SegmentScheme line_break() { return {SegmentKind::line_break, {}}; }
    static SegmentScheme prefix() { return {SegmentKind::prefix, default_prefix_terms()}; }
};

enum class BoundaryKind { start_of_text, marker, blank_line, prefix_term };

/// A contiguous byte range of the input. Segments returned by segment() tile
/// the input exactly.
struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string text;
    BoundaryKind boundary = BoundaryKind::start_of_text;
};

std::vector<Segment> segment(std::string_view text, const SegmentScheme& scheme);

struct MarkerMatch {
    int step_number = 0;
    std::string header;  // exact matched bytes, e.g. "### Step 12:"

    bool operator==(const MarkerMatch&) const = default;
};

/// Matches `### Step <digits>` with an optional trailing `.` or `:` at the
/// start of `line`.
std::optional<MarkerMatch> marker_grammar_match(std::string_view line);

/// Header the orchestrator injects for step `step_number` under the
/// prompt-guided layout.
std::string step_header(int step_number);

// ---------------------------------------------------------------------------
// Step layout: the pieces decode needs to swap schemes without touching any
// other code path.

/// Text placed before step `step_index` (1-based) when rendering.
std::string_view step_join(SegmentKind kind, int step_index);

/// Stop sequences for a single-step proposal, think-end sentinel included.
std::vector<std::string> step_stop_sequences(const SegmentScheme& scheme);

/// Forced text appended to the prompt before the teacher continues step
/// `step_number`: the join plus the injected header (or the pending prefix
/// term).
std::string forced_step_opening(SegmentKind kind, int step_number, std::string_view pending_header);

/// Header recorded on the step produced after forced_step_opening().
std::string forced_step_header(SegmentKind kind, int step_number, std::string_view pending_header);

struct ParsedStep {
    std::string header;
    std::string body;

    bool operator==(const ParsedStep&) const = default;
};

struct ParsedThink {
    std::string preamble;  // bytes before the first step that are not a join
    std::vector<ParsedStep> steps;
};

/// Inverse of render_think for the reasoning region between the sentinels
/// (neither `<think>` nor `</think>` included).
ParsedThink parse_think_region(std::string_view region, const SegmentScheme& scheme);

/// Strips the sentinels from a rendered think text and parses it.
ParsedThink parse_think_text(std::string_view think_text, const SegmentScheme& scheme);

}  // namespace stepweave
