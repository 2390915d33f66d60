#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/phrase_index.hpp"

namespace medsent {

struct TherapyClass {
  std::string name;
  // True for classes whose name is a local choice rather than an
  // established label used in prior reporting.
  bool provisional = false;
};

// Ordered therapeutic classes plus the generic-name -> class assignment.
class ClassTaxonomy {
 public:
  ClassTaxonomy() = default;
  ClassTaxonomy(std::vector<TherapyClass> classes, std::map<std::string, std::string> assignments);

  // {"classes": [{"name": ..., "provisional": bool}], "assignments": {generic: class}}
  static ClassTaxonomy parse(std::string_view json_text);
  std::string serialize() const;

  const std::vector<TherapyClass>& classes() const noexcept { return classes_; }
  const std::map<std::string, std::string>& assignments() const noexcept { return assignments_; }
  std::size_t size() const noexcept { return classes_.size(); }

  std::optional<std::string> class_of(std::string_view generic_name) const;
  bool has_class(std::string_view name) const;
  // Position of a class in the configured order; throws UnknownClass.
  std::size_t class_index(std::string_view name) const;

 private:
  std::vector<TherapyClass> classes_;
  std::map<std::string, std::string> assignments_;
};

struct MedicationEntity {
  std::string generic_name;
  std::string therapy_class;
  std::vector<std::string> variants;  // canonical, sorted, unique; contains generic_name
  bool is_neuromodulation = false;
};

struct LexiconStats {
  std::size_t entity_count = 0;
  std::size_t variant_count = 0;
  double median_variants = 0.0;
  std::size_t min_variants = 0;
  std::size_t max_variants = 0;
};

// Immutable mapping from every surface form to exactly one generic-name
// entity. Build it with compile(); all accessors are const and safe to
// share between threads.
class Lexicon {
 public:
  using SurfaceIndex = std::map<std::string, std::size_t, std::less<>>;

  // Parses the line-delimited lexicon format and validates it against the
  // taxonomy. Throws AmbiguousSurface, EmptyEntity, MissingClass,
  // ClassMismatch, InvalidSurface, DuplicateEntity or ParseError.
  static Lexicon compile(std::string_view source, ClassTaxonomy taxonomy);
  static Lexicon compile(std::vector<MedicationEntity> entities, ClassTaxonomy taxonomy);

  const std::vector<MedicationEntity>& entities() const noexcept { return entities_; }
  const SurfaceIndex& surface_index() const noexcept { return surface_index_; }
  const PhraseIndex& phrases() const noexcept { return phrases_; }
  const ClassTaxonomy& taxonomy() const noexcept { return taxonomy_; }

  const MedicationEntity* find_entity(std::string_view generic_name) const;
  // Case-insensitive surface lookup; nullptr when the surface is unknown.
  const MedicationEntity* normalize(std::string_view surface) const;

  LexiconStats stats() const;

  // One JSON object per line, entities sorted by generic name.
  std::string serialize() const;

 private:
  Lexicon() = default;

  std::vector<MedicationEntity> entities_;
  SurfaceIndex surface_index_;
  PhraseIndex phrases_;
  ClassTaxonomy taxonomy_;
};

std::vector<MedicationEntity> parse_lexicon_records(std::string_view source);

// Levenshtein distance, or limit + 1 once the distance is known to exceed limit.
std::size_t bounded_edit_distance(std::string_view a, std::string_view b, std::size_t limit);

// Vocabulary tokens within max_edit_distance of generic_name (excluding the
// name itself), in lexicographic order. Throws InvalidArgument when the name
// is empty or max_edit_distance < 1.
std::vector<std::string> generate_misspelling_variants(std::string_view generic_name,
                                                       const std::set<std::string>& corpus_vocabulary,
                                                       int max_edit_distance);

struct DecodingParameters {
  double temperature = 0.2;
  double top_p = 0.9;
  int max_new_tokens = 220;
};

struct GenerationPrompt {
  std::string text;
  DecodingParameters decoding;
};

// Few-shot template for lexicon expansion. {{therapy}} and {{example}} are
// substituted; [variant] stays literal and shows the expected output line.
extern const std::string_view kVariantPromptTemplate;

GenerationPrompt build_variant_prompt(std::string_view generic_name,
                                      const std::vector<std::string>& usage_examples);

enum class ReviewDecision { Accept, Reject };

std::string_view to_string(ReviewDecision decision) noexcept;
ReviewDecision parse_review_decision(std::string_view text);

// candidate<TAB>accept|reject per line; '#' comments allowed.
std::map<std::string, ReviewDecision> parse_review_decisions(std::string_view text);

struct AuditEntry {
  std::string timestamp;
  std::string entity;
  std::string candidate;
  ReviewDecision decision = ReviewDecision::Reject;
};

// timestamp<TAB>entity<TAB>candidate<TAB>decision
std::string format_audit_entry(const AuditEntry& entry);

struct MergeResult {
  Lexicon lexicon;
  std::vector<AuditEntry> audit;
};

// Adds accepted candidates to the entity and logs every decision. Throws
// UnknownEntity, MissingDecision, or AmbiguousSurface when an accepted
// candidate already belongs to a different entity.
MergeResult merge_candidates(const Lexicon& lexicon, std::string_view generic_name,
                             const std::vector<std::string>& candidates,
                             const std::map<std::string, ReviewDecision>& decisions,
                             std::string_view timestamp);

}  // namespace medsent
