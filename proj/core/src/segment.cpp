#include "stepweave/segment.hpp"

#include <algorithm>
#include <cctype>

namespace stepweave {

namespace {

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || c == '_' || u >= 0x80;
}

char ascii_lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view term) {
    if (pos + term.size() > text.size()) return false;
    for (std::size_t i = 0; i < term.size(); ++i) {
        if (ascii_lower(text[pos + i]) != ascii_lower(term[i])) return false;
    }
    return true;
}

// Longest prefix term matching at `pos` on word boundaries; 0 when none.
std::size_t prefix_term_length_at(std::string_view text, std::size_t pos,
                                  const std::vector<std::string>& terms) {
    if (pos > 0 && is_word_byte(text[pos - 1])) return 0;
    std::size_t best = 0;
    for (const auto& term : terms) {
        if (term.empty() || term.size() <= best) continue;
        if (!iequals_at(text, pos, term)) continue;
        const std::size_t after = pos + term.size();
        if (after < text.size() && is_word_byte(text[after]) && is_word_byte(term.back())) continue;
        best = term.size();
    }
    return best;
}

std::vector<Segment> from_boundaries(std::string_view text,
                                     const std::vector<std::pair<std::size_t, BoundaryKind>>& cuts,
                                     BoundaryKind first_kind) {
    std::vector<Segment> out;
    std::size_t start = 0;
    BoundaryKind kind = first_kind;
    for (const auto& [pos, next_kind] : cuts) {
        if (pos <= start) continue;
        out.push_back({start, pos, std::string(text.substr(start, pos - start)), kind});
        start = pos;
        kind = next_kind;
    }
    if (start < text.size() || out.empty()) {
        out.push_back({start, text.size(), std::string(text.substr(start)), kind});
    }
    return out;
}

std::vector<Segment> segment_prompt_guided(std::string_view text) {
    std::vector<std::pair<std::size_t, BoundaryKind>> cuts;
    BoundaryKind first = BoundaryKind::start_of_text;
    std::size_t line = 0;
    while (line <= text.size()) {
        if (marker_grammar_match(text.substr(line))) {
            if (line == 0) first = BoundaryKind::marker;
            else cuts.emplace_back(line, BoundaryKind::marker);
        }
        const std::size_t nl = text.find('\n', line);
        if (nl == std::string_view::npos) break;
        line = nl + 1;
    }
    return from_boundaries(text, cuts, first);
}

std::vector<Segment> segment_line_break(std::string_view text) {
    std::vector<std::pair<std::size_t, BoundaryKind>> cuts;
    std::size_t pos = 0;
    while ((pos = text.find("\n\n", pos)) != std::string_view::npos) {
        pos += 2;
        if (pos < text.size()) cuts.emplace_back(pos, BoundaryKind::blank_line);
    }
    return from_boundaries(text, cuts, BoundaryKind::start_of_text);
}

std::vector<Segment> segment_prefix(std::string_view text, const std::vector<std::string>& terms) {
    std::vector<std::pair<std::size_t, BoundaryKind>> cuts;
    BoundaryKind first = BoundaryKind::start_of_text;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t len = prefix_term_length_at(text, i, terms);
        if (len == 0) {
            ++i;
            continue;
        }
        if (i == 0) first = BoundaryKind::prefix_term;
        else cuts.emplace_back(i, BoundaryKind::prefix_term);
        i += len;
    }
    return from_boundaries(text, cuts, first);
}

std::string capitalized(std::string term) {
    if (!term.empty()) term[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(term[0])));
    return term;
}

}  // namespace

const std::vector<std::string>& default_prefix_terms() {
    static const std::vector<std::string> terms = {
        // self-verification
        "let me check", "let me verify", "double-check", "going back to", "wait",
        // multi-method validation
        "alternatively", "another way", "let's try a different approach", "using another method",
        "we can also verify",
        // self-correction
        "this is wrong", "the mistake was", "that's impossible", "this contradicts", "the error is",
    };
    return terms;
}

std::vector<Segment> segment(std::string_view text, const SegmentScheme& scheme) {
    switch (scheme.kind) {
        case SegmentKind::prompt_guided: return segment_prompt_guided(text);
        case SegmentKind::line_break: return segment_line_break(text);
        case SegmentKind::prefix: return segment_prefix(text, scheme.prefix_terms);
    }
    return segment_prompt_guided(text);
}

std::optional<MarkerMatch> marker_grammar_match(std::string_view line) {
    constexpr std::string_view hashes = "###";
    constexpr std::string_view word = "Step";
    if (!line.starts_with(hashes)) return std::nullopt;
    std::size_t pos = hashes.size();
    const auto skip_blanks = [&] {
        const std::size_t before = pos;
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        return pos > before;
    };
    if (!skip_blanks()) return std::nullopt;
    if (line.substr(pos, word.size()) != word) return std::nullopt;
    pos += word.size();
    if (!skip_blanks()) return std::nullopt;

    const std::size_t digits_begin = pos;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == digits_begin || pos - digits_begin > 9) return std::nullopt;
    const int number = std::stoi(std::string(line.substr(digits_begin, pos - digits_begin)));
    if (pos < line.size() && (line[pos] == '.' || line[pos] == ':')) ++pos;
    return MarkerMatch{number, std::string(line.substr(0, pos))};
}

std::string step_header(int step_number) {
    return "### Step " + std::to_string(step_number) + ".";
}

std::string_view step_join(SegmentKind kind, int step_index) {
    if (kind == SegmentKind::prompt_guided || step_index <= 1) return "\n";
    return "";
}

std::vector<std::string> step_stop_sequences(const SegmentScheme& scheme) {
    std::vector<std::string> stops;
    switch (scheme.kind) {
        case SegmentKind::prompt_guided: stops.emplace_back("\n### Step"); break;
        case SegmentKind::line_break: stops.emplace_back("\n\n"); break;
        case SegmentKind::prefix:
            for (const auto& term : scheme.prefix_terms) {
                stops.push_back(term);
                auto upper = capitalized(term);
                if (upper != term) stops.push_back(std::move(upper));
            }
            break;
    }
    stops.emplace_back(kThinkClose);
    return stops;
}

std::string forced_step_opening(SegmentKind kind, int step_number, std::string_view pending_header) {
    return std::string(step_join(kind, step_number)) + forced_step_header(kind, step_number, pending_header);
}

std::string forced_step_header(SegmentKind kind, int step_number, std::string_view pending_header) {
    switch (kind) {
        case SegmentKind::prompt_guided: return step_header(step_number);
        case SegmentKind::line_break: return {};
        case SegmentKind::prefix: return std::string(pending_header);
    }
    return {};
}

ParsedThink parse_think_region(std::string_view region, const SegmentScheme& scheme) {
    ParsedThink out;
    if (region.empty()) return out;

    if (scheme.kind == SegmentKind::prompt_guided) {
        const auto segments = segment(region, scheme);
        for (std::size_t i = 0; i < segments.size(); ++i) {
            std::string text = segments[i].text;
            const bool has_next = i + 1 < segments.size();
            if (has_next && text.ends_with('\n')) text.pop_back();  // join of the next step
            if (segments[i].boundary != BoundaryKind::marker) {
                out.preamble += text;
                continue;
            }
            auto match = marker_grammar_match(text);
            ParsedStep step;
            step.header = match->header;
            step.body = text.substr(match->header.size());
            out.steps.push_back(std::move(step));
        }
        return out;
    }

    std::string_view rest = region;
    const std::string_view first_join = step_join(scheme.kind, 1);
    if (rest.starts_with(first_join)) rest.remove_prefix(first_join.size());
    else {
        out.preamble = std::string(rest);
        return out;
    }
    if (rest.empty()) return out;
    for (const auto& seg : segment(rest, scheme)) {
        ParsedStep step;
        std::size_t header_len = 0;
        if (seg.boundary == BoundaryKind::prefix_term) {
            header_len = prefix_term_length_at(seg.text, 0, scheme.prefix_terms);
        }
        step.header = seg.text.substr(0, header_len);
        step.body = seg.text.substr(header_len);
        out.steps.push_back(std::move(step));
    }
    return out;
}

ParsedThink parse_think_text(std::string_view think_text, const SegmentScheme& scheme) {
    std::string_view region = think_text;
    if (region.starts_with(kThinkOpen)) region.remove_prefix(kThinkOpen.size());
    if (region.ends_with(kThinkClose)) region.remove_suffix(kThinkClose.size());
    return parse_think_region(region, scheme);
}

}  // namespace stepweave
