#include "medsent/text.hpp"

#include <chrono>
#include <cstdio>

namespace medsent {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

CodePoint decode(std::string_view text, std::size_t pos) noexcept {
  const auto byte = static_cast<unsigned char>(text[pos]);
  if (byte < 0x80) return {byte, 1};
  std::size_t length = utf8_sequence_length(text, pos);
  if (length == 1) return {byte, 1};
  char32_t value = byte & (0xFF >> (length + 1));
  for (std::size_t i = 1; i < length; ++i) {
    value = (value << 6) | (static_cast<unsigned char>(text[pos + i]) & 0x3F);
  }
  return {value, length};
}

bool is_separator_code_point(char32_t cp) noexcept {
  return (cp >= 0x80 && cp <= 0xBF) ||       // C1 controls, NBSP, Latin-1 punctuation
         cp == 0xD7 || cp == 0xF7 ||          // multiplication / division signs
         (cp >= 0x2000 && cp <= 0x206F) ||    // general punctuation
         (cp >= 0x2190 && cp <= 0x2BFF) ||    // arrows, math, technical, shapes, dingbats
         (cp >= 0x3000 && cp <= 0x303F) ||    // CJK punctuation
         cp == 0xFE0F || cp == 0xFEFF ||      // variation selector, BOM
         (cp >= 0x1F000 && cp <= 0x1FAFF);    // emoji
}

enum class CharClass { Word, Connector, Separator };

CharClass classify(const CodePoint& cp) noexcept {
  if (cp.value < 0x80) {
    const auto c = static_cast<char>(cp.value);
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      return CharClass::Word;
    }
    if (c == '-' || c == '\'') return CharClass::Connector;
    return CharClass::Separator;
  }
  if (cp.value == 0x2019) return CharClass::Connector;
  if (is_separator_code_point(cp.value)) return CharClass::Separator;
  return CharClass::Word;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    CodePoint cp = decode(text, pos);
    if (classify(cp) != CharClass::Word) {
      pos += cp.length;
      continue;
    }
    const std::size_t begin = pos;
    pos += cp.length;
    while (pos < n) {
      CodePoint next = decode(text, pos);
      CharClass cls = classify(next);
      if (cls == CharClass::Word) {
        pos += next.length;
        continue;
      }
      if (cls == CharClass::Connector && pos + next.length < n) {
        CodePoint after = decode(text, pos + next.length);
        if (classify(after) == CharClass::Word) {
          pos += next.length + after.length;
          continue;
        }
      }
      break;
    }
    tokens.push_back({text.substr(begin, pos - begin), {begin, pos}});
  }
  return tokens;
}

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_phrase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

bool is_horizontal_gap(std::string_view text) noexcept {
  if (text.empty()) return false;
  for (char c : text) {
    if (!is_horizontal_space(c)) return false;
  }
  return true;
}

std::size_t utf8_sequence_length(std::string_view text, std::size_t pos) noexcept {
  const auto byte = static_cast<unsigned char>(text[pos]);
  std::size_t length = 1;
  if ((byte & 0xE0) == 0xC0) {
    length = 2;
  } else if ((byte & 0xF0) == 0xE0) {
    length = 3;
  } else if ((byte & 0xF8) == 0xF0) {
    length = 4;
  } else {
    return 1;
  }
  if (pos + length > text.size()) return 1;
  for (std::size_t i = 1; i < length; ++i) {
    if ((static_cast<unsigned char>(text[pos + i]) & 0xC0) != 0x80) return 1;
  }
  return length;
}

namespace {
bool is_continuation(std::string_view text, std::size_t pos) noexcept {
  return (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80;
}
}  // namespace

std::size_t utf8_floor(std::string_view text, std::size_t pos) noexcept {
  if (pos >= text.size()) return text.size();
  std::size_t start = pos;
  // At most three continuation bytes precede a lead byte.
  for (int i = 0; i < 3 && start > 0 && is_continuation(text, start); ++i) --start;
  if (start != pos && start + utf8_sequence_length(text, start) > pos) return start;
  return pos;
}

std::size_t utf8_ceil(std::string_view text, std::size_t pos) noexcept {
  if (pos >= text.size()) return text.size();
  std::size_t start = utf8_floor(text, pos);
  if (start == pos) return pos;
  return start + utf8_sequence_length(text, start);
}

std::size_t utf8_length(std::string_view text) noexcept {
  std::size_t count = 0;
  for (std::size_t pos = 0; pos < text.size(); pos += utf8_sequence_length(text, pos)) ++count;
  return count;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

int utc_year(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{unix_seconds}});
  return static_cast<int>(year_month_day{day}.year());
}

std::string format_utc_date(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(sys_seconds{seconds{unix_seconds}})};
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buffer;
}

std::int64_t utc_seconds(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  const sys_days d{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return duration_cast<seconds>(d.time_since_epoch()).count();
}

}  // namespace medsent
