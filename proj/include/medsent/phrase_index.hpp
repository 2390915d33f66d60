#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/text.hpp"

namespace medsent {

// Canonical form of a phrase: case-folded tokens joined by single spaces.
std::string canonical_phrase(std::string_view phrase);

// Token-level trie over case-folded phrases. A phrase occurrence in text is
// a run of consecutive tokens equal to the phrase tokens whose separators
// are horizontal whitespace only, so matches never span punctuation or a
// line break.
class PhraseIndex {
 public:
  struct Candidate {
    std::size_t first_token = 0;
    std::size_t end_token = 0;  // exclusive
    Span span;
    std::size_t id = 0;
  };

  // Inserts a phrase under id. Returns the id already stored for the same
  // canonical phrase, if any (the index is left unchanged in that case).
  std::optional<std::size_t> insert(std::string_view phrase, std::size_t id);

  std::optional<std::size_t> find(std::string_view phrase) const;

  // Every phrase occurrence, including overlapping and nested ones,
  // ordered by (first token, length).
  std::vector<Candidate> candidates(std::string_view text, const TokenStream& tokens) const;
  std::vector<Candidate> candidates(std::string_view text) const;

  // Non-overlapping occurrences chosen longest-first (byte length),
  // leftmost on ties, returned in text order.
  std::vector<Candidate> matches(std::string_view text, const TokenStream& tokens) const;
  std::vector<Candidate> matches(std::string_view text) const;

  std::size_t size() const noexcept { return phrase_count_; }
  bool empty() const noexcept { return phrase_count_ == 0; }

 private:
  struct Node {
    std::map<std::string, std::size_t, std::less<>> children;
    std::optional<std::size_t> id;
  };

  std::vector<Node> nodes_{Node{}};
  std::size_t phrase_count_ = 0;
};

// Greedy longest-match-wins selection over overlapping candidates; ties go
// to the leftmost start. Output is sorted by span begin.
std::vector<PhraseIndex::Candidate> resolve_longest_leftmost(
    std::vector<PhraseIndex::Candidate> candidates);

}  // namespace medsent
