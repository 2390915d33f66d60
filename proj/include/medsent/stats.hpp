#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsent/lexicon.hpp"
#include "medsent/sentiment.hpp"

namespace medsent {

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 1.0;
};

// Exact two-sided p-value of x successes in n trials under p = 0.5: the
// total probability of outcomes no more likely than x.
double binomial_two_sided_p(std::size_t x, std::size_t n);

// Exact (Clopper-Pearson) interval for x successes in n trials.
ConfidenceInterval clopper_pearson(std::size_t x, std::size_t n, double level = 0.95);

struct BinomialTestResult {
  std::string entity;
  std::size_t x = 0;  // positive
  std::size_t y = 0;  // negative
  std::size_t n = 0;
  double p_hat = 0.0;
  ConfidenceInterval ci;
  double p_raw = 1.0;
  double p_fdr = 1.0;  // equal to p_raw until a battery adjusts it
};

// Throws EmptyNonNeutral when x + y == 0.
BinomialTestResult binomial_test(std::size_t x, std::size_t y, double level = 0.95);

// Benjamini-Hochberg step-up adjustment, returned in input order.
// Throws InvalidP for values outside [0, 1] or NaN.
std::vector<double> bh_fdr(std::span<const double> p_values);

struct EntityLabelCounts {
  std::string entity;
  LabelCounts counts;
};

struct BatteryResult {
  std::vector<BinomialTestResult> results;  // p_fdr ascending, entity name on ties
  std::vector<std::string> ineligible;      // no non-neutral mentions, sorted
};

BatteryResult run_asymmetry_battery(std::span<const EntityLabelCounts> entities);
BatteryResult run_asymmetry_battery(std::span<const AnnotatedMention> mentions);

using CountTable = std::vector<std::vector<std::size_t>>;
using Matrix = std::vector<std::vector<double>>;

struct ContingencyResult {
  CountTable table;
  std::size_t n = 0;
  double chi2 = 0.0;
  std::size_t df = 0;
  double p = 1.0;
  double cramers_v = 0.0;
  Matrix expected;
  Matrix residuals;  // adjusted standardized
};

// Pearson chi-square test of independence with Cramér's V and adjusted
// residuals. Throws InvalidArgument for ragged or undersized tables and
// DegenerateMargin when a row or column sums to zero.
ContingencyResult chi_square(const CountTable& table);

// sqrt(chi2 / (n (min(r, c) - 1))). Throws InvalidArgument for n == 0 or
// min(r, c) < 2 and EffectSizeOutOfRange when the value would exceed 1.
double cramers_v(double chi2, std::size_t n, std::size_t rows, std::size_t cols);

// (O - E) / sqrt(E (1 - row share) (1 - column share)).
Matrix standardized_residuals(const CountTable& table);

struct PairwiseResult {
  std::size_t row_a = 0;
  std::size_t row_b = 0;
  std::string class_a;
  std::string class_b;
  bool tested = false;
  std::string flag;  // reason when untested
  double chi2 = 0.0;
  std::size_t df = 0;
  double p_raw = 1.0;
  double p_fdr = 1.0;
};

// Every 2 x c subtable of row pairs (a < b), in row order. Pairs with a
// zero column are reported untested and left out of the FDR family.
std::vector<PairwiseResult> pairwise_class_tests(const CountTable& table, std::span<const std::string> row_names);

enum class GroupKey { Entity, Class, Subreddit, Year };

std::string_view to_string(GroupKey key) noexcept;
GroupKey parse_group_key(std::string_view text);

struct ProfileRow {
  std::string group;
  LabelCounts counts;

  // Fraction in [0, 1]. Throws EmptyGroup when the group has no mentions.
  double share(SentimentLabel label) const;
};

// Throws EmptyGroup when counts are all zero.
ProfileRow make_profile(std::string group, const LabelCounts& counts);

// Per-group label counts, groups in key order.
std::vector<ProfileRow> sentiment_profile(std::span<const AnnotatedMention> mentions, GroupKey key);

// Positive share descending, group name ascending on ties.
void order_by_positive_share(std::vector<ProfileRow>& rows);

struct ClassLabelTable {
  std::vector<std::string> classes;  // taxonomy order, classes with mentions only
  CountTable table;                  // rows: classes; columns: negative, neutral, positive
};

ClassLabelTable class_label_table(std::span<const AnnotatedMention> mentions, const ClassTaxonomy& taxonomy);

}  // namespace medsent
