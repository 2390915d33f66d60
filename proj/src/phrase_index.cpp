#include "medsent/phrase_index.hpp"

#include <algorithm>

namespace medsent {

std::string canonical_phrase(std::string_view phrase) {
  std::string out;
  for (const Token& token : tokenize(phrase)) {
    if (!out.empty()) out.push_back(' ');
    out += fold_case(token.text);
  }
  return out;
}

std::optional<std::size_t> PhraseIndex::insert(std::string_view phrase, std::size_t id) {
  const TokenStream tokens = tokenize(phrase);
  if (tokens.empty()) return std::nullopt;
  std::size_t node = 0;
  for (const Token& token : tokens) {
    std::string key = fold_case(token.text);
    auto it = nodes_[node].children.find(key);
    if (it == nodes_[node].children.end()) {
      nodes_.push_back(Node{});
      it = nodes_[node].children.emplace(std::move(key), nodes_.size() - 1).first;
    }
    node = it->second;
  }
  if (nodes_[node].id) return nodes_[node].id;
  nodes_[node].id = id;
  ++phrase_count_;
  return std::nullopt;
}

std::optional<std::size_t> PhraseIndex::find(std::string_view phrase) const {
  const TokenStream tokens = tokenize(phrase);
  if (tokens.empty()) return std::nullopt;
  std::size_t node = 0;
  for (const Token& token : tokens) {
    auto it = nodes_[node].children.find(fold_case(token.text));
    if (it == nodes_[node].children.end()) return std::nullopt;
    node = it->second;
  }
  return nodes_[node].id;
}

std::vector<PhraseIndex::Candidate> PhraseIndex::candidates(std::string_view text,
                                                            const TokenStream& tokens) const {
  std::vector<std::string> folded;
  folded.reserve(tokens.size());
  for (const Token& token : tokens) folded.push_back(fold_case(token.text));

  std::vector<Candidate> found;
  for (std::size_t first = 0; first < tokens.size(); ++first) {
    std::size_t node = 0;
    for (std::size_t last = first; last < tokens.size(); ++last) {
      if (last > first) {
        const std::size_t gap_begin = tokens[last - 1].span.end;
        const std::size_t gap_end = tokens[last].span.begin;
        if (!is_horizontal_gap(text.substr(gap_begin, gap_end - gap_begin))) break;
      }
      auto it = nodes_[node].children.find(folded[last]);
      if (it == nodes_[node].children.end()) break;
      node = it->second;
      if (nodes_[node].id) {
        found.push_back({first, last + 1, {tokens[first].span.begin, tokens[last].span.end},
                         *nodes_[node].id});
      }
    }
  }
  return found;
}

std::vector<PhraseIndex::Candidate> PhraseIndex::candidates(std::string_view text) const {
  return candidates(text, tokenize(text));
}

std::vector<PhraseIndex::Candidate> PhraseIndex::matches(std::string_view text,
                                                         const TokenStream& tokens) const {
  return resolve_longest_leftmost(candidates(text, tokens));
}

std::vector<PhraseIndex::Candidate> PhraseIndex::matches(std::string_view text) const {
  return matches(text, tokenize(text));
}

std::vector<PhraseIndex::Candidate> resolve_longest_leftmost(
    std::vector<PhraseIndex::Candidate> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.span.size() != b.span.size()) return a.span.size() > b.span.size();
    return a.span.begin < b.span.begin;
  });
  std::vector<PhraseIndex::Candidate> chosen;
  for (const auto& candidate : candidates) {
    const bool clashes = std::any_of(chosen.begin(), chosen.end(), [&](const auto& kept) {
      return kept.span.overlaps(candidate.span);
    });
    if (!clashes) chosen.push_back(candidate);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const auto& a, const auto& b) { return a.span.begin < b.span.begin; });
  return chosen;
}

}  // namespace medsent
