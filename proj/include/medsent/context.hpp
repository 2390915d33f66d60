#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/corpus.hpp"
#include "medsent/mention.hpp"

namespace medsent {

// Reserved token that replaces the target surface in classifier input.
inline constexpr std::string_view kPlaceholder = "<MEDICATION>";
// What a literal placeholder already present in source text is rewritten to,
// so the masked window holds exactly one placeholder.
inline constexpr std::string_view kNeutralizedPlaceholder = "(MEDICATION)";

// Sentence spans tiling text. A sentence ends after '.', '!' or '?' (plus
// any closing quotes/brackets) followed by whitespace or end of text, or at a
// line break; trailing whitespace belongs to the sentence it follows. A
// period after a listed abbreviation (dr, mrs, e.g, ...) does not end a
// sentence. Empty text has no sentences.
std::vector<Span> segment_sentences(std::string_view text);

// Index of the sentence containing byte pos (the last one if pos == size).
std::size_t sentence_at(const std::vector<Span>& sentences, std::size_t pos);

struct ContextWindow {
  std::string mention_id;
  Field field = Field::Body;
  std::string masked_text;
  Span window_span;                    // source byte range, within the field
  std::size_t placeholder_offset = 0;  // byte offset of the placeholder in masked_text
};

// Masks the mention and keeps up to max_chars code points of source text
// (surface included) around it. Context is split evenly left/right; budget
// one side cannot use flows to the other. Throws SpanOutOfBounds when the
// mention span does not fit its field or its text differs from the surface.
ContextWindow extract_window(const Post& post, const Mention& mention, std::size_t max_chars = 1000);

// The window with the surface put back at the placeholder.
std::string unmask(const ContextWindow& window, std::string_view surface);

// Windows file: one {mention_id, masked_text, field, window_start,
// window_end, placeholder_offset} object per line.
std::string write_windows(std::span<const ContextWindow> windows);
std::vector<ContextWindow> read_windows(std::string_view text);

}  // namespace medsent
