#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medsent {

// Half-open byte range [begin, end) into a UTF-8 string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(const Span& other) const noexcept {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const Span& other) const noexcept {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

// A token views into the string passed to tokenize(); it must not outlive it.
struct Token {
  std::string_view text;
  Span span;
};

using TokenStream = std::vector<Token>;

// Splits text into word tokens. A token is a run of word characters
// (ASCII alphanumerics and non-punctuation non-ASCII code points), where a
// single hyphen or apostrophe (ASCII ' or U+2019) between two word
// characters is kept inside the token. Everything else separates tokens.
// Spans are UTF-8 byte offsets.
TokenStream tokenize(std::string_view text);

// ASCII case folding; bytes >= 0x80 pass through unchanged.
std::string fold_case(std::string_view text);

// Case-folds, trims, and collapses internal whitespace runs to one space.
std::string normalize_phrase(std::string_view text);

// Space or tab. Newlines are sentence terminators, not token glue.
constexpr bool is_horizontal_space(char c) noexcept { return c == ' ' || c == '\t'; }

// True when every byte of text is a horizontal space and text is nonempty.
bool is_horizontal_gap(std::string_view text) noexcept;

// Byte length of the UTF-8 sequence starting at text[pos] (1 for invalid bytes).
std::size_t utf8_sequence_length(std::string_view text, std::size_t pos) noexcept;

// Moves pos back (floor) or forward (ceil) to the nearest code point start.
std::size_t utf8_floor(std::string_view text, std::size_t pos) noexcept;
std::size_t utf8_ceil(std::string_view text, std::size_t pos) noexcept;

// Number of code points in text.
std::size_t utf8_length(std::string_view text) noexcept;

// Counts non-overlapping occurrences of needle in haystack.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept;

// Calendar helpers over UTC Unix seconds.
int utc_year(std::int64_t unix_seconds);
std::string format_utc_date(std::int64_t unix_seconds);  // YYYY-MM-DD
std::int64_t utc_seconds(int year, unsigned month, unsigned day);

}  // namespace medsent
