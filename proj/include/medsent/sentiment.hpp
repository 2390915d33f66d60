#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/context.hpp"
#include "medsent/mention.hpp"
#include "medsent/phrase_index.hpp"

namespace medsent {

// Canonical order is Negative < Neutral < Positive.
enum class SentimentLabel { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::array<SentimentLabel, 3> kLabels = {SentimentLabel::Negative, SentimentLabel::Neutral,
                                                         SentimentLabel::Positive};

std::string_view to_string(SentimentLabel label) noexcept;
// Case-insensitive; throws InvalidLabel for anything outside the three labels.
SentimentLabel parse_label(std::string_view text);

enum class LabelSource { External, Rule };

std::string_view to_string(LabelSource source) noexcept;

struct LabeledMention {
  std::string mention_id;
  SentimentLabel label = SentimentLabel::Neutral;
  double confidence = 0.0;
  LabelSource source = LabelSource::External;

  friend bool operator==(const LabeledMention&, const LabeledMention&) = default;
};

struct PredictionIngest {
  std::vector<LabeledMention> labeled;  // in mention order
  std::vector<std::string> missing;     // mention ids with no prediction
};

// Predictions file: one {mention_id, label, confidence} object per line.
// Throws UnknownMentionId, DuplicatePrediction, InvalidLabel,
// InvalidConfidence or ParseError with the offending line number.
PredictionIngest ingest_predictions(std::string_view text, std::span<const Mention> mentions,
                                    LabelSource source = LabelSource::External);

// Same, keyed by a bare id list (e.g. the windows file).
PredictionIngest ingest_predictions(std::string_view text, std::span<const std::string> mention_ids,
                                    LabelSource source = LabelSource::External);

std::string write_predictions(std::span<const LabeledMention> labeled);

std::string completeness_report(const PredictionIngest& ingest);

// Positive and negative cue phrases, matched whole-token and
// case-insensitively; overlapping cues resolve longest first, so a longer
// cue such as "no side effects" hides the shorter "side effects".
class CueLexicon {
 public:
  CueLexicon(const std::vector<std::string>& positive, const std::vector<std::string>& negative);
  static CueLexicon parse(std::string_view positive_text, std::string_view negative_text);

  struct Counts {
    std::size_t positive = 0;
    std::size_t negative = 0;
  };
  Counts count(std::string_view text) const;

 private:
  PhraseIndex index_;
  std::vector<bool> positive_;  // by phrase id
};

// Positive when positive cues outnumber negative ones, Negative when fewer,
// Neutral otherwise. Confidence is |pos - neg| / (pos + neg), or 0.5 when
// there are no cues at all.
LabeledMention rule_classify(const ContextWindow& window, const CueLexicon& cues);

struct LabelCounts {
  std::size_t negative = 0;
  std::size_t neutral = 0;
  std::size_t positive = 0;

  std::size_t total() const noexcept { return negative + neutral + positive; }
  std::size_t& operator[](SentimentLabel label) noexcept;
  std::size_t operator[](SentimentLabel label) const noexcept;
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

inline constexpr int kSyntheticPerInstance = 5;

// Expected label counts once every non-neutral instance has gained
// synthetic_per_instance paraphrases. Throws InvalidArgument when negative.
LabelCounts validate_augmentation(const LabelCounts& original, int synthetic_per_instance = kSyntheticPerInstance);

struct AugmentationInstance {
  std::string text;
  Span target;  // byte span of the target therapy inside text
  SentimentLabel label = SentimentLabel::Positive;
};

// [text] marks where the original post goes; [tweet] is a literal output
// marker; {{therapy}}, {{sentiment}} and {{count}} are substituted.
extern const std::string_view kAugmentationPromptTemplate;

// Throws NeutralNotAugmented for neutral instances and SpanOutOfBounds when
// the target span does not fit the text.
std::string build_augmentation_prompt(const AugmentationInstance& instance);

// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seeded generator with a portable unbiased bounded draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound); bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double micro_f1 = 0.0;
  double micro_f1_ci_lower = 0.0;
  double micro_f1_ci_upper = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassScores, 3> per_class{};                      // indexed by label
  std::array<std::array<std::size_t, 3>, 3> confusion{};       // [gold][predicted]
  std::size_t bootstrap_resamples = 0;
  double ci_level = 0.95;
  std::uint64_t seed = 0;
};

// Per-class scores use 0 for any undefined ratio. The micro-F1 interval is
// the percentile interval of micro-F1 over instance-level resamples; each
// resample draws from its own generator seeded with splitmix64(seed + r).
// Throws LengthMismatch, EmptyInput, or InvalidArgument for a bad level.
EvalReport evaluate(std::span<const SentimentLabel> gold, std::span<const SentimentLabel> predicted,
                    std::size_t bootstrap_resamples = 1000, double ci_level = 0.95, std::uint64_t seed = 0);

std::string eval_report_json(const EvalReport& report);

// Type-7 sample quantile of sorted values, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

// First n positions of a seeded forward Fisher-Yates shuffle of
// [0, population). Throws SampleTooLarge when n > population.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

struct ReviewRow {
  std::string mention_id;
  std::string masked_text;
  SentimentLabel label = SentimentLabel::Neutral;
  double confidence = 0.0;
};

// Uniform sample without replacement. The population is ordered by
// mention_id first, so the result depends only on its contents and seed.
std::vector<ReviewRow> sample_for_review(std::span<const LabeledMention> labeled,
                                         std::span<const ContextWindow> windows, std::size_t n,
                                         std::uint64_t seed);

std::string write_review_sheet(std::span<const ReviewRow> rows);

struct AnnotatedMention {
  Mention mention;
  SentimentLabel label = SentimentLabel::Neutral;
  double confidence = 0.0;
};

// Mentions that have a label, in mention order. Throws UnknownMentionId for a
// label whose mention is absent.
std::vector<AnnotatedMention> join_labels(std::span<const Mention> mentions,
                                          std::span<const LabeledMention> labeled);

}  // namespace medsent
