#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "medsent/text.hpp"

namespace medsent {

enum class Field { Title, Body };

std::string_view to_string(Field field) noexcept;
Field parse_field(std::string_view text);

// One normalized medication occurrence. The span is a byte range into the
// named field (title or body) of the post; sentence_index counts sentences
// within that field from zero. Post metadata is carried along so mention
// tables can be aggregated without re-joining the corpus.
struct Mention {
  std::string mention_id;
  std::string post_id;
  std::string subreddit;
  std::string author;
  std::int64_t created_utc = 0;
  std::string generic_name;
  std::string therapy_class;
  std::string surface;
  Field field = Field::Body;
  Span span;
  std::size_t sentence_index = 0;

  friend bool operator==(const Mention&, const Mention&) = default;
};

}  // namespace medsent
