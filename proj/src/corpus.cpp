#include "medsent/corpus.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "medsent/error.hpp"
#include "medsent/tsv.hpp"

namespace medsent {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Field field) noexcept { return field == Field::Title ? "title" : "body"; }

Field parse_field(std::string_view text) {
  if (text == "title") return Field::Title;
  if (text == "body") return Field::Body;
  throw ParseError("unknown field '" + std::string(text) + "'");
}

std::size_t IngestReport::count(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [&](const IngestIssue& i) { return i.kind == kind; }));
}

std::string IngestReport::to_json() const {
  ordered_json doc;
  doc["lines_read"] = lines_read;
  doc["posts_ingested"] = posts_ingested;
  doc["malformed_records"] = count("MalformedRecord");
  doc["duplicate_ids"] = count("DuplicateId");
  doc["issues"] = ordered_json::array();
  for (const auto& issue : issues) {
    ordered_json entry;
    entry["line"] = issue.line;
    entry["kind"] = issue.kind;
    entry["post_id"] = issue.post_id;
    entry["reason"] = issue.reason;
    doc["issues"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

namespace {

// Reason string when the record cannot become a Post, empty otherwise.
std::string read_string(const json& record, const char* key, bool required, std::string& out) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    if (required) return std::string("missing ") + key;
    out.clear();
    return {};
  }
  if (!it->is_string()) return std::string(key) + " is not a string";
  out = it->get<std::string>();
  return {};
}

std::string read_timestamp(const json& record, std::int64_t& out) {
  auto it = record.find("created_utc");
  if (it == record.end() || it->is_null()) return "missing created_utc";
  if (it->is_number_integer()) {
    out = it->get<std::int64_t>();
    return {};
  }
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (!(v >= -9.2e18 && v <= 9.2e18)) return "created_utc out of range";
    out = static_cast<std::int64_t>(v);
    return {};
  }
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    std::size_t used = 0;
    try {
      const double v = std::stod(s, &used);
      if (used != s.size() || !(v >= -9.2e18 && v <= 9.2e18)) return "created_utc is not numeric";
      out = static_cast<std::int64_t>(v);
      return {};
    } catch (const std::exception&) {
      return "created_utc is not numeric";
    }
  }
  return "created_utc is not a number";
}

}  // namespace

Corpus ingest(std::istream& in, const IngestOptions& options) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++corpus.report.lines_read;

    auto malformed = [&](std::string reason, std::string id = {}) {
      corpus.report.issues.push_back({line_no, "MalformedRecord", std::move(id), std::move(reason)});
    };

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      malformed(std::string("invalid JSON: ") + e.what());
      continue;
    }
    if (!record.is_object()) {
      malformed("record is not an object");
      continue;
    }

    Post post;
    std::string reason = read_string(record, "id", true, post.id);
    if (reason.empty() && post.id.empty()) reason = "empty id";
    if (reason.empty()) reason = read_string(record, "subreddit", true, post.subreddit);
    if (reason.empty()) reason = read_string(record, "author", true, post.author);
    if (reason.empty()) reason = read_timestamp(record, post.created_utc);
    if (reason.empty()) reason = read_string(record, "title", false, post.title);
    if (reason.empty()) reason = read_string(record, "selftext", false, post.body);
    if (reason.empty() && post.title.empty() && post.body.empty()) reason = "title and selftext both empty";
    if (reason.empty() &&
        (post.created_utc < options.earliest_utc || post.created_utc > options.collection_end_utc)) {
      reason = "created_utc outside collection window";
    }
    if (!reason.empty()) {
      malformed(std::move(reason), post.id);
      continue;
    }
    if (!seen.insert(post.id).second) {
      corpus.report.issues.push_back({line_no, "DuplicateId", post.id, "first occurrence kept"});
      continue;
    }
    corpus.posts.push_back(std::move(post));
  }
  corpus.report.posts_ingested = corpus.posts.size();
  return corpus;
}

std::string serialize_post(const Post& post) {
  ordered_json record;
  record["id"] = post.id;
  record["subreddit"] = post.subreddit;
  record["author"] = post.author;
  record["created_utc"] = post.created_utc;
  record["title"] = post.title;
  record["selftext"] = post.body;
  return record.dump();
}

std::string serialize_posts(std::span<const Post> posts) {
  std::string out;
  for (const auto& post : posts) {
    out += serialize_post(post);
    out += '\n';
  }
  return out;
}

std::set<std::string> corpus_vocabulary(std::span<const Post> posts) {
  std::set<std::string> vocabulary;
  for (const auto& post : posts) {
    for (const auto* text : {&post.title, &post.body}) {
      for (const auto& token : tokenize(*text)) vocabulary.insert(fold_case(token.text));
    }
  }
  return vocabulary;
}

std::string_view to_string(KeywordCategory category) noexcept {
  switch (category) {
    case KeywordCategory::CoreClinical: return "core_clinical";
    case KeywordCategory::Abbreviation: return "abbreviation";
    case KeywordCategory::Colloquialism: return "colloquialism";
  }
  return "core_clinical";
}

KeywordCategory parse_keyword_category(std::string_view text) {
  if (text == "core_clinical") return KeywordCategory::CoreClinical;
  if (text == "abbreviation") return KeywordCategory::Abbreviation;
  if (text == "colloquialism") return KeywordCategory::Colloquialism;
  throw ParseError("unknown keyword category '" + std::string(text) + "'");
}

std::string keyword_match_form(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '-') {
      out.push_back(' ');
    } else if (text.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

KeywordLexicon::KeywordLexicon(std::vector<Keyword> keywords) : keywords_(std::move(keywords)) {
  if (keywords_.empty()) throw InvalidArgument("keyword lexicon is empty");
  for (std::size_t i = 0; i < keywords_.size(); ++i) {
    const std::string canonical = canonical_phrase(keyword_match_form(keywords_[i].phrase));
    if (canonical.empty()) throw InvalidArgument("keyword '" + keywords_[i].phrase + "' has no tokens");
    const auto existing = index_.insert(canonical, owners_.size());
    if (existing) {
      owners_[*existing].push_back(i);
    } else {
      owners_.push_back({i});
    }
  }
}

KeywordLexicon KeywordLexicon::parse(std::string_view text) {
  std::vector<Keyword> keywords;
  for (const auto& line : config_lines(text)) {
    const auto fields = split_tsv_line(line);
    if (fields.size() != 2) throw ParseError("keyword line needs category<TAB>phrase: '" + line + "'");
    keywords.push_back({parse_keyword_category(fields[0]), normalize_phrase(fields[1])});
  }
  return KeywordLexicon(std::move(keywords));
}

std::vector<std::string> KeywordLexicon::find(std::string_view text) const {
  const std::string form = keyword_match_form(text);
  // Every occurrence counts here; overlapping keywords are all recorded.
  std::vector<bool> hit(keywords_.size(), false);
  for (const auto& candidate : index_.candidates(form)) {
    for (std::size_t k : owners_[candidate.id]) hit[k] = true;
  }
  std::vector<std::string> found;
  for (std::size_t k = 0; k < keywords_.size(); ++k) {
    if (hit[k]) found.push_back(keywords_[k].phrase);
  }
  return found;
}

FilterResult filter_trd(std::span<const Post> posts, const KeywordLexicon& keywords) {
  FilterResult result;
  for (const auto& post : posts) {
    auto in_title = keywords.find(post.title);
    auto in_body = keywords.find(post.body);
    if (in_title.empty() && in_body.empty()) continue;
    // Merge in keyword-file order.
    std::vector<std::string> matched;
    for (const auto& kw : keywords.keywords()) {
      const bool hit = std::find(in_title.begin(), in_title.end(), kw.phrase) != in_title.end() ||
                       std::find(in_body.begin(), in_body.end(), kw.phrase) != in_body.end();
      if (hit && std::find(matched.begin(), matched.end(), kw.phrase) == matched.end()) {
        matched.push_back(kw.phrase);
      }
    }
    result.retained.push_back(post);
    result.matched_keywords.push_back(std::move(matched));
  }
  return result;
}

CountSummary summarize_counts(std::vector<std::size_t> counts) {
  CountSummary summary;
  if (counts.empty()) return summary;
  std::sort(counts.begin(), counts.end());
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const std::size_t n = counts.size();
  summary.mean = total / static_cast<double>(n);
  summary.median = n % 2 ? static_cast<double>(counts[n / 2])
                         : (static_cast<double>(counts[n / 2 - 1]) + static_cast<double>(counts[n / 2])) / 2.0;
  summary.min = counts.front();
  summary.max = counts.back();
  return summary;
}

CohortStats cohort_stats(std::span<const Post> posts, std::span<const Mention> mentions) {
  CohortStats stats;
  stats.post_count = posts.size();

  std::unordered_map<std::string_view, std::size_t> post_slot;
  std::map<std::string_view, std::size_t> posts_per_author;
  std::set<std::string_view> subreddits;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    post_slot.emplace(posts[i].id, i);
    ++posts_per_author[posts[i].author];
    subreddits.insert(posts[i].subreddit);
    if (i == 0 || posts[i].created_utc < stats.first_post_utc) stats.first_post_utc = posts[i].created_utc;
    if (i == 0 || posts[i].created_utc > stats.last_post_utc) stats.last_post_utc = posts[i].created_utc;
  }
  stats.subscriber_count = posts_per_author.size();
  stats.subreddit_count = subreddits.size();

  std::vector<std::size_t> per_post(posts.size(), 0);
  std::vector<std::set<std::string_view>> distinct(posts.size());
  std::set<std::string_view> entities;
  for (const auto& mention : mentions) {
    auto it = post_slot.find(mention.post_id);
    if (it == post_slot.end()) {
      throw DanglingMention("mention '" + mention.mention_id + "' references unknown post '" +
                            mention.post_id + "'");
    }
    ++per_post[it->second];
    distinct[it->second].insert(mention.generic_name);
    entities.insert(mention.generic_name);
  }
  stats.total_mentions = mentions.size();
  stats.entities_observed = entities.size();
  stats.posts_with_mentions =
      static_cast<std::size_t>(std::count_if(per_post.begin(), per_post.end(), [](auto c) { return c > 0; }));

  std::vector<std::size_t> distinct_counts;
  distinct_counts.reserve(distinct.size());
  for (const auto& d : distinct) distinct_counts.push_back(d.size());
  stats.mentions_per_post = summarize_counts(per_post);
  stats.distinct_medications_per_post = summarize_counts(std::move(distinct_counts));

  for (const auto& [author, n] : posts_per_author) {
    if (n == 1) ++stats.subscribers_with_one_post;
    if (n >= 5) ++stats.subscribers_with_5_plus_posts;
    if (n >= 10) ++stats.subscribers_with_10_plus_posts;
  }
  return stats;
}

double SubscriberDistribution::share(std::size_t distinct_count) const {
  if (subscribers == 0) return 0.0;
  auto it = subscribers_by_distinct_count.find(distinct_count);
  if (it == subscribers_by_distinct_count.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(subscribers);
}

SubscriberDistribution subscriber_medication_distribution(std::span<const Mention> mentions) {
  std::map<std::string_view, std::set<std::string_view>> per_author;
  for (const auto& m : mentions) per_author[m.author].insert(m.generic_name);
  SubscriberDistribution dist;
  dist.subscribers = per_author.size();
  for (const auto& [author, names] : per_author) ++dist.subscribers_by_distinct_count[names.size()];
  return dist;
}

std::vector<YearShare> annual_share(std::span<const Post> posts,
                                    std::optional<std::int64_t> collection_end_utc) {
  std::map<int, std::set<std::string_view>> by_year;
  std::set<std::string_view> all;
  for (const auto& post : posts) {
    by_year[utc_year(post.created_utc)].insert(post.id);
    all.insert(post.id);
  }
  std::vector<YearShare> out;
  for (const auto& [year, ids] : by_year) {
    YearShare row;
    row.year = year;
    row.posts = ids.size();
    row.share_percent = 100.0 * static_cast<double>(ids.size()) / static_cast<double>(all.size());
    if (collection_end_utc && utc_year(*collection_end_utc) == year) {
      row.partial = *collection_end_utc < utc_seconds(year + 1, 1, 1) - 1;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace medsent
