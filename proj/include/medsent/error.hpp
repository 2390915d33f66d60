#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace medsent {

// Base for every error raised by the pipeline. kind() is a stable
// CamelCase identifier that the CLI prints as `error: <kind>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define MEDSENT_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

// Input parsing
MEDSENT_DEFINE_ERROR(ParseError);
MEDSENT_DEFINE_ERROR(InvalidArgument);
MEDSENT_DEFINE_ERROR(IoError);

// lexicon
MEDSENT_DEFINE_ERROR(EmptyEntity);
MEDSENT_DEFINE_ERROR(MissingClass);
MEDSENT_DEFINE_ERROR(UnknownClass);
MEDSENT_DEFINE_ERROR(ClassMismatch);
MEDSENT_DEFINE_ERROR(InvalidSurface);
MEDSENT_DEFINE_ERROR(DuplicateEntity);
MEDSENT_DEFINE_ERROR(UnknownEntity);
MEDSENT_DEFINE_ERROR(MissingDecision);

// Raised when one surface form is claimed by two entities.
class AmbiguousSurface : public Error {
 public:
  AmbiguousSurface(std::string surface, std::string entity_a, std::string entity_b)
      : Error("AmbiguousSurface",
              "surface '" + surface + "' claimed by both '" + entity_a + "' and '" + entity_b + "'"),
        surface_(std::move(surface)),
        entity_a_(std::move(entity_a)),
        entity_b_(std::move(entity_b)) {}

  const std::string& surface() const noexcept { return surface_; }
  const std::string& entity_a() const noexcept { return entity_a_; }
  const std::string& entity_b() const noexcept { return entity_b_; }

 private:
  std::string surface_;
  std::string entity_a_;
  std::string entity_b_;
};

// corpus
MEDSENT_DEFINE_ERROR(DanglingMention);

// context
MEDSENT_DEFINE_ERROR(SpanOutOfBounds);

// sentiment
MEDSENT_DEFINE_ERROR(InvalidLabel);
MEDSENT_DEFINE_ERROR(InvalidConfidence);
MEDSENT_DEFINE_ERROR(UnknownMentionId);
MEDSENT_DEFINE_ERROR(DuplicatePrediction);
MEDSENT_DEFINE_ERROR(NeutralNotAugmented);
MEDSENT_DEFINE_ERROR(LengthMismatch);
MEDSENT_DEFINE_ERROR(EmptyInput);
MEDSENT_DEFINE_ERROR(SampleTooLarge);

// stats
MEDSENT_DEFINE_ERROR(EmptyNonNeutral);
MEDSENT_DEFINE_ERROR(InvalidP);
MEDSENT_DEFINE_ERROR(DegenerateMargin);
MEDSENT_DEFINE_ERROR(EffectSizeOutOfRange);
MEDSENT_DEFINE_ERROR(EmptyGroup);

// report
class ReconciliationError : public Error {
 public:
  ReconciliationError(std::string table, long long expected, long long actual)
      : Error("ReconciliationError", table + ": expected total " + std::to_string(expected) +
                                         ", got " + std::to_string(actual)),
        table_(std::move(table)),
        expected_(expected),
        actual_(actual) {}

  const std::string& table() const noexcept { return table_; }
  long long expected() const noexcept { return expected_; }
  long long actual() const noexcept { return actual_; }

 private:
  std::string table_;
  long long expected_;
  long long actual_;
};

#undef MEDSENT_DEFINE_ERROR

}  // namespace medsent
