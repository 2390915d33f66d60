#include <doctest.h>

#include <random>
#include <sstream>

#include "medsent/error.hpp"
#include "medsent/matcher.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace medsent;

namespace {

ClassTaxonomy taxonomy() {
  return ClassTaxonomy({{"NMDA", false}, {"SSRI", false}, {"SNRI", false}},
                       {{"ketamine", "NMDA"}, {"fluoxetine", "SSRI"}, {"venlafaxine", "SNRI"}});
}

Lexicon small_lexicon() {
  std::vector<MedicationEntity> es(3);
  es[0].generic_name = "ketamine";
  es[0].variants = {"ket", "special k"};
  es[1].generic_name = "fluoxetine";
  es[1].variants = {"prozac"};
  es[2].generic_name = "venlafaxine";
  es[2].variants = {"effexor", "effexor xr"};
  return Lexicon::compile(es, taxonomy());
}

Post body_post(std::string body, std::string title = "") {
  Post p;
  p.id = "p1";
  p.subreddit = "trd";
  p.author = "u";
  p.created_utc = 1600000000;
  p.title = std::move(title);
  p.body = std::move(body);
  return p;
}

}  // namespace

TEST_CASE("every occurrence is a mention") {
  auto ms = match_mentions(body_post("ketamine then more ketamine"), small_lexicon());
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].generic_name == "ketamine");
  CHECK(ms[1].generic_name == "ketamine");
  CHECK(ms[0].mention_id == "p1#1");
  CHECK(ms[1].mention_id == "p1#2");
  CHECK(ms[1].span == Span{19, 27});
}

TEST_CASE("substrings inside tokens never match") {
  CHECK(match_mentions(body_post("NoProzacHere"), small_lexicon()).empty());
  CHECK(match_mentions(body_post("prozacs and xprozac"), small_lexicon()).empty());
  CHECK(match_mentions(body_post("anti-prozac"), small_lexicon()).empty());
  CHECK(match_mentions(body_post("prozac's"), small_lexicon()).empty());
  CHECK(match_mentions(body_post("(prozac)"), small_lexicon()).size() == 1);
}

TEST_CASE("multiword surface wins over its embedded single token") {
  auto ms = match_mentions(body_post("Switched to Effexor XR last week"), small_lexicon());
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].surface == "Effexor XR");
  CHECK(ms[0].generic_name == "venlafaxine");

  auto split = match_mentions(body_post("Effexor\nXR"), small_lexicon());
  REQUIRE(split.size() == 1);
  CHECK(split[0].surface == "Effexor");
}

TEST_CASE("title then body, with per-field offsets and sentence indices") {
  const auto post = body_post("Fine. Then ket. Then Prozac.", "Prozac question");
  auto ms = match_mentions(post, small_lexicon());
  REQUIRE(ms.size() == 3);
  CHECK(ms[0].field == Field::Title);
  CHECK(ms[0].span == Span{0, 6});
  CHECK(ms[1].field == Field::Body);
  CHECK(ms[1].surface == "ket");
  CHECK(ms[1].sentence_index == 1);
  CHECK(ms[2].sentence_index == 2);
  CHECK(ms[2].mention_id == "p1#3");
  for (const auto& m : ms) {
    const auto text = post.text(m.field);
    CHECK(fold_case(text.substr(m.span.begin, m.span.size())) == fold_case(m.surface));
  }
}

TEST_CASE("matcher equals the brute-force scanner on fuzzed posts") {
  const auto fuzz = testsupport::make_fuzz_lexicon(2024);
  std::mt19937_64 gen(99);
  std::size_t total = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::string text = testsupport::fuzz_post(gen, fuzz, 600);
    const auto got = match_mentions(body_post(text), fuzz.lexicon);
    const auto want = oracle::brute_force_matches(text, fuzz.surfaces);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].span.begin == want[i].begin);
      CHECK(got[i].span.end == want[i].end);
      CHECK(got[i].generic_name == fuzz.lexicon.entities()[want[i].entity].generic_name);
    }
    total += got.size();
  }
  CHECK(total > 150);
}

TEST_CASE("mention frequencies and reach") {
  auto mk = [](std::string post, std::string author, std::string generic) {
    Mention m;
    m.mention_id = post + "#1";
    m.post_id = std::move(post);
    m.author = std::move(author);
    m.generic_name = std::move(generic);
    m.therapy_class = "c";
    return m;
  };
  SUBCASE("single author") {
    std::vector<Mention> ms = {mk("p", "A", "ketamine")};
    auto t = mention_frequencies(ms);
    CHECK(t.mentioning_subscribers == 1);
    CHECK(t.entities[0].subscribers == 1);
    CHECK(t.entities[0].reach == 1.0);
  }
  SUBCASE("hand computed") {
    std::vector<Mention> ms = {mk("p", "A", "x"), mk("q", "B", "x"), mk("r", "B", "y")};
    auto t = mention_frequencies(ms);
    CHECK(t.mentioning_subscribers == 2);
    REQUIRE(t.entities.size() == 2);
    CHECK(t.entities[0].generic_name == "x");
    CHECK(t.entities[0].reach == 1.0);
    CHECK(t.entities[1].reach == 0.5);
  }
  SUBCASE("1138 of 2700 authors") {
    std::vector<Mention> ms;
    for (int i = 0; i < 2700; ++i) {
      ms.push_back(mk("p" + std::to_string(i), "u" + std::to_string(i), i < 1138 ? "ketamine" : "fluoxetine"));
    }
    auto t = mention_frequencies(ms);
    const auto it = std::find_if(t.entities.begin(), t.entities.end(),
                                 [](const EntityFrequency& e) { return e.generic_name == "ketamine"; });
    REQUIRE(it != t.entities.end());
    CHECK(it->reach == doctest::Approx(0.42).epsilon(0.01));
    CHECK(format_fixed(it->reach, 2) == "0.42");
  }
}

TEST_CASE("mentions file round-trips") {
  const auto lex = testsupport::reference_lexicon();
  std::istringstream in(testsupport::data_file("fixtures/posts.jsonl"));
  const auto corpus = ingest(in);
  const auto ms = match_corpus(corpus.posts, lex);
  REQUIRE_FALSE(ms.empty());
  const auto text = write_mentions(ms);
  CHECK(read_mentions(text) == ms);
  CHECK(write_mentions(read_mentions(text)) == text);
  CHECK(mentions_table(ms).columns == kMentionColumns);
  CHECK_THROWS_AS(read_mentions("mention_id\tpost_id\n"), ParseError);
}

TEST_CASE("fixture corpus matches with the reference lexicon") {
  const auto lex = testsupport::reference_lexicon();
  std::istringstream in(testsupport::data_file("fixtures/posts.jsonl"));
  const auto corpus = ingest(in);
  const auto kw = KeywordLexicon::parse(testsupport::data_file("keywords/trd_keywords.tsv"));
  const auto kept = filter_trd(corpus.posts, kw);
  CHECK(kept.retained.size() == 8);
  const auto ms = match_corpus(kept.retained, lex);
  CHECK(ms.size() == 36);
  for (std::size_t i = 1; i < ms.size(); ++i) CHECK(ms[i - 1].post_id <= ms[i].post_id);
  for (const auto& m : ms) {
    const auto* e = lex.normalize(m.surface);
    REQUIRE(e != nullptr);
    CHECK(e->generic_name == m.generic_name);
  }
}
