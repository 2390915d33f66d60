#include <doctest.h>

#include <random>
#include <sstream>

#include "medsent/error.hpp"
#include "medsent/phrase_index.hpp"
#include "medsent/text.hpp"
#include "medsent/tsv.hpp"

using namespace medsent;

namespace {
std::vector<std::string> token_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.emplace_back(t.text);
  return out;
}
}  // namespace

TEST_CASE("tokenize: basic words and punctuation") {
  CHECK(token_texts("Started ketamine.") == std::vector<std::string>{"Started", "ketamine"});
  CHECK(tokenize("").empty());
  CHECK(token_texts("  ,;  ").empty());
}

TEST_CASE("tokenize: internal hyphen and apostrophes stay inside a token") {
  auto toks = token_texts("amphetamine-dextroamphetamine works");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0] == "amphetamine-dextroamphetamine");
  CHECK(token_texts("didn't help") == std::vector<std::string>{"didn't", "help"});
  CHECK(token_texts("didn\xE2\x80\x99t") == std::vector<std::string>{"didn\xE2\x80\x99t"});
  CHECK(token_texts("-lead trail- a--b") == std::vector<std::string>{"lead", "trail", "a", "b"});
}

TEST_CASE("tokenize: non-ASCII letters are word characters, symbols are not") {
  CHECK(token_texts("caf\xC3\xA9 au lait") == std::vector<std::string>{"caf\xC3\xA9", "au", "lait"});
  CHECK(token_texts("zoloft\xF0\x9F\x98\x8Ahelped") == std::vector<std::string>{"zoloft", "helped"});
  CHECK(token_texts("a\xC2\xA0" "b") == std::vector<std::string>{"a", "b"});
  CHECK(token_texts("a\xE2\x80\x94" "b") == std::vector<std::string>{"a", "b"});  // em dash separates
}

TEST_CASE("tokenize: spans are ordered, disjoint and reconstruct the input") {
  std::mt19937_64 gen(7);
  const std::string alphabet[] = {"a", "Z", "9", " ", "-", "'", ".", "\n", "\xC3\xA9", "\xE2\x80\x99", "\xF0\x9F\x98\x8A"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int len = static_cast<int>(gen() % 40);
    for (int i = 0; i < len; ++i) text += alphabet[gen() % 11];
    const auto tokens = tokenize(text);
    std::size_t cursor = 0;
    std::string rebuilt;
    for (const auto& t : tokens) {
      REQUIRE(t.span.begin >= cursor);
      REQUIRE(t.span.end <= text.size());
      REQUIRE(t.span.begin < t.span.end);
      rebuilt += text.substr(cursor, t.span.begin - cursor);
      rebuilt += std::string(t.text);
      CHECK(text.substr(t.span.begin, t.span.size()) == t.text);
      cursor = t.span.end;
    }
    rebuilt += text.substr(cursor);
    CHECK(rebuilt == text);
  }
}

TEST_CASE("case folding is ASCII only") {
  CHECK(fold_case("ProZAC \xC3\x89") == "prozac \xC3\x89");
  CHECK(normalize_phrase("  Effexor \t  XR\n") == "effexor xr");
}

TEST_CASE("utf8 helpers") {
  const std::string s = "a\xC3\xA9\xE2\x80\x99\xF0\x9F\x98\x8A";
  CHECK(utf8_length(s) == 4);
  CHECK(utf8_sequence_length(s, 1) == 2);
  CHECK(utf8_sequence_length(s, 3) == 3);
  CHECK(utf8_sequence_length(s, 6) == 4);
  CHECK(utf8_floor(s, 2) == 1);
  CHECK(utf8_ceil(s, 2) == 3);
  CHECK(count_occurrences("abab ab", "ab") == 3);
  CHECK(count_occurrences("aaaa", "aa") == 2);
}

TEST_CASE("calendar helpers") {
  CHECK(utc_seconds(1970, 1, 1) == 0);
  CHECK(utc_seconds(2024, 2, 29) == 1709164800);
  CHECK(utc_year(utc_seconds(2024, 12, 31) + 86399) == 2024);
  CHECK(utc_year(utc_seconds(2025, 1, 1)) == 2025);
  CHECK(format_utc_date(utc_seconds(2025, 7, 31)) == "2025-07-31");
}

TEST_CASE("phrase index: canonical phrases and whole-token occurrences") {
  CHECK(canonical_phrase("Effexor  XR") == "effexor xr");
  PhraseIndex index;
  CHECK_FALSE(index.insert("effexor", 0).has_value());
  CHECK_FALSE(index.insert("Effexor XR", 1).has_value());
  CHECK(index.insert("EFFEXOR", 9) == std::optional<std::size_t>{0});
  CHECK(index.size() == 2);
  CHECK(index.find("effexor  xr") == std::optional<std::size_t>{1});

  auto all = index.candidates("Effexor XR, effexor");
  CHECK(all.size() == 3);
  auto picked = index.matches("Effexor XR, effexor");
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].id == 1);
  CHECK(picked[0].span == Span{0, 10});
  CHECK(picked[1].id == 0);

  // Line breaks and punctuation interrupt multiword phrases.
  CHECK(index.matches("effexor\nxr").size() == 1);
  CHECK(index.matches("effexor, xr").size() == 1);
  CHECK(index.matches("effexor \t xr")[0].id == 1);
}

TEST_CASE("longest-leftmost resolution") {
  using C = PhraseIndex::Candidate;
  std::vector<C> cands = {{0, 1, {0, 3}, 0}, {0, 2, {0, 7}, 1}, {1, 3, {4, 11}, 2}, {2, 3, {8, 11}, 3}};
  auto out = resolve_longest_leftmost(cands);
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == 1);  // {0,7} beats {4,11} (same length, leftmost)
  CHECK(out[1].id == 3);
}

TEST_CASE("tsv escaping round-trips awkward fields") {
  const std::string field = "a\tb\\c\nd\re";
  CHECK(tsv_unescape(tsv_escape(field)) == field);
  CHECK(tsv_escape(field).find('\t') == std::string::npos);

  Table t{"t", {"x", "y"}, {{"1", field}, {"", "z"}}};
  std::ostringstream out;
  write_tsv(out, t);
  std::istringstream in(out.str());
  Table back = read_tsv(in, "t");
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.column("y") == 1);
  CHECK_THROWS_AS(back.column("nope"), ParseError);

  std::istringstream ragged("a\tb\n1\n");
  CHECK_THROWS_AS(read_tsv(ragged), ParseError);
}

TEST_CASE("number formatting") {
  CHECK(format_fixed(0.8027, 3) == "0.803");
  CHECK(format_sci(1.953125e-3) == "1.95e-03");
  CHECK(format_percent(0.1481) == "14.8");
  CHECK(config_lines("# c\n\n  # indented\na\r\nb\n") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("rounding that keeps the total") {
  const std::vector<double> thirds = {100.0 / 3, 100.0 / 3, 100.0 / 3};
  CHECK(round_preserving_total(thirds, 1) == std::vector<double>{33.4, 33.3, 33.3});
  CHECK(round_preserving_total(std::vector<double>{25.0, 75.0}, 1) == std::vector<double>{25.0, 75.0});
  CHECK(round_preserving_total(std::vector<double>{}, 1).empty());
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> w(1 + gen() % 15);
    double sum = 0.0;
    for (auto& x : w) sum += (x = static_cast<double>(gen() % 1000));
    if (sum == 0.0) continue;
    for (auto& x : w) x = x / sum * 100.0;
    const auto r = round_preserving_total(w, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(std::abs(r[i] - w[i]) < 0.1 + 1e-9);
      total += r[i];
    }
    CHECK(std::abs(total - 100.0) < 1e-6);
  }
}
