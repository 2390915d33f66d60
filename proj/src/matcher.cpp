#include "medsent/matcher.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "medsent/context.hpp"
#include "medsent/error.hpp"

namespace medsent {

std::vector<Mention> match_mentions(const Post& post, const Lexicon& lexicon) {
  std::vector<Mention> out;
  for (Field field : {Field::Title, Field::Body}) {
    const std::string_view text = post.text(field);
    const auto hits = lexicon.phrases().matches(text);
    if (hits.empty()) continue;
    const auto sentences = segment_sentences(text);
    for (const auto& hit : hits) {
      const auto& entity = lexicon.entities()[hit.id];
      Mention m;
      m.mention_id = post.id + "#" + std::to_string(out.size() + 1);
      m.post_id = post.id;
      m.subreddit = post.subreddit;
      m.author = post.author;
      m.created_utc = post.created_utc;
      m.generic_name = entity.generic_name;
      m.therapy_class = entity.therapy_class;
      m.surface = std::string(text.substr(hit.span.begin, hit.span.size()));
      m.field = field;
      m.span = hit.span;
      m.sentence_index = sentence_at(sentences, hit.span.begin);
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<Mention> match_corpus(std::span<const Post> posts, const Lexicon& lexicon) {
  std::vector<const Post*> order;
  order.reserve(posts.size());
  for (const auto& p : posts) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Post* a, const Post* b) { return a->id < b->id; });
  std::vector<Mention> out;
  for (const Post* p : order) {
    auto found = match_mentions(*p, lexicon);
    std::move(found.begin(), found.end(), std::back_inserter(out));
  }
  return out;
}

FrequencyTable mention_frequencies(std::span<const Mention> mentions) {
  struct Acc {
    std::string therapy_class;
    std::size_t mentions = 0;
    std::set<std::string_view> authors;
  };
  std::map<std::string_view, Acc> by_entity;
  std::set<std::string_view> everyone;
  for (const auto& m : mentions) {
    auto& acc = by_entity[m.generic_name];
    acc.therapy_class = m.therapy_class;
    ++acc.mentions;
    acc.authors.insert(m.author);
    everyone.insert(m.author);
  }
  FrequencyTable table;
  table.total_mentions = mentions.size();
  table.mentioning_subscribers = everyone.size();
  for (const auto& [name, acc] : by_entity) {
    EntityFrequency row;
    row.generic_name = std::string(name);
    row.therapy_class = acc.therapy_class;
    row.mentions = acc.mentions;
    row.subscribers = acc.authors.size();
    row.reach = static_cast<double>(row.subscribers) / static_cast<double>(everyone.size());
    table.entities.push_back(std::move(row));
  }
  std::stable_sort(table.entities.begin(), table.entities.end(),
                   [](const auto& a, const auto& b) { return a.mentions > b.mentions; });
  return table;
}

const std::vector<std::string> kMentionColumns = {
    "mention_id", "post_id",        "subreddit", "author", "created_utc", "generic_name",
    "therapy_class", "surface", "field", "start", "end", "sentence_index"};

Table mentions_table(std::span<const Mention> mentions) {
  Table table;
  table.name = "mentions";
  table.columns = kMentionColumns;
  for (const auto& m : mentions) {
    table.rows.push_back({m.mention_id, m.post_id, m.subreddit, m.author, std::to_string(m.created_utc),
                          m.generic_name, m.therapy_class, m.surface, std::string(to_string(m.field)),
                          std::to_string(m.span.begin), std::to_string(m.span.end),
                          std::to_string(m.sentence_index)});
  }
  return table;
}

std::string write_mentions(std::span<const Mention> mentions) {
  std::ostringstream out;
  write_tsv(out, mentions_table(mentions));
  return out.str();
}

namespace {

template <typename T>
T parse_integer(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ParseError("mentions: bad " + std::string(what) + " '" + s + "'");
  }
}

}  // namespace

std::vector<Mention> read_mentions(std::string_view text) {
  std::istringstream in{std::string(text)};
  const Table table = read_tsv(in, "mentions");
  std::vector<std::size_t> col;
  for (const auto& name : kMentionColumns) col.push_back(table.column(name));
  std::vector<Mention> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Mention m;
    m.mention_id = row[col[0]];
    m.post_id = row[col[1]];
    m.subreddit = row[col[2]];
    m.author = row[col[3]];
    m.created_utc = parse_integer<std::int64_t>(row[col[4]], "created_utc");
    m.generic_name = row[col[5]];
    m.therapy_class = row[col[6]];
    m.surface = row[col[7]];
    m.field = parse_field(row[col[8]]);
    m.span.begin = parse_integer<std::size_t>(row[col[9]], "start");
    m.span.end = parse_integer<std::size_t>(row[col[10]], "end");
    m.sentence_index = parse_integer<std::size_t>(row[col[11]], "sentence_index");
    if (m.span.end < m.span.begin) throw ParseError("mentions: span end before start for " + m.mention_id);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace medsent
