#include "medsent/context.hpp"

#include <algorithm>
#include <array>

#include <json.hpp>

#include "medsent/error.hpp"

namespace medsent {

namespace {

constexpr std::array<std::string_view, 13> kAbbreviations = {
    "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "approx"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// The word right before a period, folded, without leading brackets/quotes.
bool follows_abbreviation(std::string_view text, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && !is_space(text[start - 1])) --start;
  std::string word = fold_case(text.substr(start, period - start));
  const auto first = word.find_first_not_of("(\"'[");
  if (first == std::string::npos) return false;
  word.erase(0, first);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace

std::vector<Span> segment_sentences(std::string_view text) {
  std::vector<Span> out;
  std::size_t begin = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    std::size_t end = std::string_view::npos;
    if (text[i] == '\n') {
      end = i + 1;
    } else if (text[i] == '.' || text[i] == '!' || text[i] == '?') {
      std::size_t j = i;
      while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      const std::size_t last_terminator = j - 1;
      while (j < n && is_closer(text[j])) ++j;
      const bool boundary = j == n || is_space(text[j]);
      const bool guarded = text[last_terminator] == '.' && last_terminator == i &&
                           follows_abbreviation(text, i);
      if (boundary && !guarded) {
        end = j;
      } else {
        i = j;
        continue;
      }
    }
    if (end == std::string_view::npos) {
      ++i;
      continue;
    }
    while (end < n && is_space(text[end])) ++end;
    out.push_back({begin, end});
    begin = end;
    i = end;
  }
  if (begin < n) out.push_back({begin, n});
  return out;
}

std::size_t sentence_at(const std::vector<Span>& sentences, std::size_t pos) {
  if (sentences.empty()) return 0;
  auto it = std::upper_bound(sentences.begin(), sentences.end(), pos,
                             [](std::size_t p, const Span& s) { return p < s.end; });
  if (it == sentences.end()) return sentences.size() - 1;
  return static_cast<std::size_t>(it - sentences.begin());
}

namespace {

// Moves back over up to count code points; returns the new position.
std::size_t back_code_points(std::string_view text, std::size_t pos, std::size_t count) {
  while (count > 0 && pos > 0) {
    pos = utf8_floor(text, pos - 1);
    --count;
  }
  return pos;
}

std::size_t forward_code_points(std::string_view text, std::size_t pos, std::size_t count) {
  while (count > 0 && pos < text.size()) {
    pos += utf8_sequence_length(text, pos);
    --count;
  }
  return std::min(pos, text.size());
}

std::string neutralize(std::string_view text) {
  std::string out(text);
  for (std::size_t at = out.find(kPlaceholder); at != std::string::npos; at = out.find(kPlaceholder, at)) {
    out.replace(at, kPlaceholder.size(), kNeutralizedPlaceholder);
    at += kNeutralizedPlaceholder.size();
  }
  return out;
}

}  // namespace

ContextWindow extract_window(const Post& post, const Mention& mention, std::size_t max_chars) {
  const std::string_view text = post.text(mention.field);
  const Span target = mention.span;
  if (target.begin >= target.end || target.end > text.size() ||
      utf8_floor(text, target.begin) != target.begin || utf8_floor(text, target.end) != target.end) {
    throw SpanOutOfBounds("mention '" + mention.mention_id + "' span [" + std::to_string(target.begin) +
                          ", " + std::to_string(target.end) + ") outside " +
                          std::string(to_string(mention.field)) + " of " + std::to_string(text.size()) +
                          " bytes");
  }
  if (fold_case(text.substr(target.begin, target.size())) != fold_case(mention.surface)) {
    throw SpanOutOfBounds("mention '" + mention.mention_id + "' span does not hold surface '" +
                          mention.surface + "'");
  }

  const std::size_t surface_chars = utf8_length(text.substr(target.begin, target.size()));
  const std::size_t left_avail = utf8_length(text.substr(0, target.begin));
  const std::size_t right_avail = utf8_length(text.substr(target.end));
  const std::size_t budget = max_chars > surface_chars ? max_chars - surface_chars : 0;
  std::size_t left = std::min(left_avail, budget / 2);
  const std::size_t right = std::min(right_avail, budget - left);
  left = std::min(left_avail, budget - right);

  ContextWindow window;
  window.mention_id = mention.mention_id;
  window.field = mention.field;
  window.window_span = {back_code_points(text, target.begin, left),
                        forward_code_points(text, target.end, right)};
  const std::string before = neutralize(text.substr(window.window_span.begin, target.begin - window.window_span.begin));
  const std::string after = neutralize(text.substr(target.end, window.window_span.end - target.end));
  window.placeholder_offset = before.size();
  window.masked_text.reserve(before.size() + kPlaceholder.size() + after.size());
  window.masked_text += before;
  window.masked_text += kPlaceholder;
  window.masked_text += after;
  return window;
}

std::string unmask(const ContextWindow& window, std::string_view surface) {
  std::string out = window.masked_text;
  out.replace(window.placeholder_offset, kPlaceholder.size(), surface);
  return out;
}

std::string write_windows(std::span<const ContextWindow> windows) {
  std::string out;
  for (const auto& w : windows) {
    nlohmann::ordered_json record;
    record["mention_id"] = w.mention_id;
    record["masked_text"] = w.masked_text;
    record["field"] = to_string(w.field);
    record["window_start"] = w.window_span.begin;
    record["window_end"] = w.window_span.end;
    record["placeholder_offset"] = w.placeholder_offset;
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<ContextWindow> read_windows(std::string_view text) {
  std::vector<ContextWindow> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      ContextWindow w;
      w.mention_id = record.at("mention_id").get<std::string>();
      w.masked_text = record.at("masked_text").get<std::string>();
      w.field = parse_field(record.value("field", std::string("body")));
      w.window_span.begin = record.value("window_start", std::size_t{0});
      w.window_span.end = record.value("window_end", std::size_t{0});
      const auto at = w.masked_text.find(kPlaceholder);
      w.placeholder_offset = record.value("placeholder_offset", at == std::string::npos ? 0 : at);
      if (at == std::string::npos || w.masked_text.compare(w.placeholder_offset, kPlaceholder.size(),
                                                           kPlaceholder) != 0) {
        throw ParseError("window has no placeholder at its recorded offset");
      }
      out.push_back(std::move(w));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("windows:" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("windows:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace medsent
