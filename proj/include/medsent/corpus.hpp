#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/mention.hpp"
#include "medsent/phrase_index.hpp"

namespace medsent {

struct Post {
  std::string id;
  std::string subreddit;
  std::string author;
  std::int64_t created_utc = 0;
  std::string title;
  std::string body;

  std::string_view text(Field field) const noexcept { return field == Field::Title ? title : body; }
  friend bool operator==(const Post&, const Post&) = default;
};

struct IngestIssue {
  std::size_t line = 0;
  std::string kind;  // MalformedRecord | DuplicateId
  std::string post_id;
  std::string reason;
};

struct IngestReport {
  std::size_t lines_read = 0;
  std::size_t posts_ingested = 0;
  std::vector<IngestIssue> issues;

  std::size_t count(std::string_view kind) const;
  std::string to_json() const;
};

struct IngestOptions {
  std::int64_t earliest_utc = utc_seconds(2010, 1, 1);
  // Last second of data collection; the final calendar year is partial.
  std::int64_t collection_end_utc = utc_seconds(2025, 8, 1) - 1;
};

struct Corpus {
  std::vector<Post> posts;
  IngestReport report;
};

// Reads one JSON object per line with fields {id, subreddit, author,
// created_utc, title, selftext}. Bad lines and repeated ids are recorded in
// the report and skipped; the first occurrence of an id wins.
Corpus ingest(std::istream& in, const IngestOptions& options = {});

std::string serialize_post(const Post& post);
std::string serialize_posts(std::span<const Post> posts);

// Case-folded tokens over titles and bodies.
std::set<std::string> corpus_vocabulary(std::span<const Post> posts);

enum class KeywordCategory { CoreClinical, Abbreviation, Colloquialism };

std::string_view to_string(KeywordCategory category) noexcept;
KeywordCategory parse_keyword_category(std::string_view text);

struct Keyword {
  KeywordCategory category = KeywordCategory::CoreClinical;
  std::string phrase;
};

// Cohort-defining phrases. Matching folds case and treats hyphens as
// spaces, so "treatment-resistant" and "treatment resistant" coincide.
class KeywordLexicon {
 public:
  explicit KeywordLexicon(std::vector<Keyword> keywords);

  // category<TAB>phrase per line; '#' comments allowed.
  static KeywordLexicon parse(std::string_view text);

  const std::vector<Keyword>& keywords() const noexcept { return keywords_; }

  // Keyword phrases (as written in the file) found in text, in file order.
  std::vector<std::string> find(std::string_view text) const;

 private:
  std::vector<Keyword> keywords_;
  PhraseIndex index_;
  std::vector<std::vector<std::size_t>> owners_;  // normalized phrase id -> keyword indices
};

// Hyphen -> space, U+2019 -> apostrophe; the form keyword matching runs on.
std::string keyword_match_form(std::string_view text);

struct FilterResult {
  std::vector<Post> retained;
  // Parallel to retained: matched keyword phrases per post.
  std::vector<std::vector<std::string>> matched_keywords;
};

FilterResult filter_trd(std::span<const Post> posts, const KeywordLexicon& keywords);

struct CountSummary {
  double mean = 0.0;
  double median = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
};

CountSummary summarize_counts(std::vector<std::size_t> counts);

struct CohortStats {
  std::size_t post_count = 0;
  std::size_t subscriber_count = 0;
  std::size_t subreddit_count = 0;
  std::int64_t first_post_utc = 0;
  std::int64_t last_post_utc = 0;
  std::size_t posts_with_mentions = 0;
  std::size_t total_mentions = 0;
  std::size_t entities_observed = 0;
  CountSummary mentions_per_post;            // over all posts
  CountSummary distinct_medications_per_post;
  std::size_t subscribers_with_one_post = 0;
  std::size_t subscribers_with_5_plus_posts = 0;
  std::size_t subscribers_with_10_plus_posts = 0;
};

// Throws DanglingMention when a mention references a post not in posts.
CohortStats cohort_stats(std::span<const Post> posts, std::span<const Mention> mentions);

struct SubscriberDistribution {
  std::map<std::size_t, std::size_t> subscribers_by_distinct_count;
  std::size_t subscribers = 0;

  double share(std::size_t distinct_count) const;  // fraction in [0,1]
};

// Distinct generic names per author, over authors with at least one mention.
SubscriberDistribution subscriber_medication_distribution(std::span<const Mention> mentions);

struct YearShare {
  int year = 0;
  std::size_t posts = 0;
  double share_percent = 0.0;
  bool partial = false;
};

// Distinct posts per calendar year as a percentage of all posts. When
// collection_end_utc is given and falls before the end of its year, that
// year is flagged partial.
std::vector<YearShare> annual_share(std::span<const Post> posts,
                                    std::optional<std::int64_t> collection_end_utc = std::nullopt);

}  // namespace medsent
