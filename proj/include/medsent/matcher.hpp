#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/corpus.hpp"
#include "medsent/lexicon.hpp"
#include "medsent/mention.hpp"
#include "medsent/tsv.hpp"

namespace medsent {

// All lexicon hits in the post, title first, then body, each in text order.
// mention_id is post_id#n with n counting from 1 in that order.
std::vector<Mention> match_mentions(const Post& post, const Lexicon& lexicon);

// Concatenated per-post results ordered by (post_id, field, start).
std::vector<Mention> match_corpus(std::span<const Post> posts, const Lexicon& lexicon);

struct EntityFrequency {
  std::string generic_name;
  std::string therapy_class;
  std::size_t mentions = 0;
  std::size_t subscribers = 0;  // u_i
  double reach = 0.0;           // u_i / U
};

struct FrequencyTable {
  std::vector<EntityFrequency> entities;  // mentions desc, then name
  std::size_t total_mentions = 0;
  std::size_t mentioning_subscribers = 0;  // U
};

FrequencyTable mention_frequencies(std::span<const Mention> mentions);

extern const std::vector<std::string> kMentionColumns;

Table mentions_table(std::span<const Mention> mentions);
std::string write_mentions(std::span<const Mention> mentions);
std::vector<Mention> read_mentions(std::string_view text);

}  // namespace medsent
