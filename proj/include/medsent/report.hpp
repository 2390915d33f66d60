#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medsent/corpus.hpp"
#include "medsent/lexicon.hpp"
#include "medsent/matcher.hpp"
#include "medsent/sentiment.hpp"
#include "medsent/stats.hpp"

namespace medsent {

struct ClassYearShare {
  int year = 0;
  std::string therapy_class;
  std::size_t mentions = 0;
  double share_percent = 0.0;  // of all mentions that year
};

// Years with no mentions do not appear. Rows are ordered by year, then class.
std::vector<ClassYearShare> class_year_composition(std::span<const Mention> mentions);

struct SubredditVolume {
  std::string subreddit;
  std::size_t posts = 0;
  std::size_t mentions = 0;
};

struct ReportInputs {
  std::span<const Post> posts;
  std::span<const Mention> mentions;
  std::span<const LabeledMention> labels;
  const ClassTaxonomy* taxonomy = nullptr;
  std::optional<std::int64_t> collection_end_utc;
  std::size_t configured_entities = 0;
};

struct ReportBundle {
  CohortStats cohort;
  FrequencyTable frequencies;                // mentions desc
  std::vector<EntityFrequency> reach;        // reach desc
  std::optional<ProfileRow> global_profile;  // absent when nothing is labeled
  std::vector<ProfileRow> entity_profiles;   // positive share desc
  std::vector<ProfileRow> class_profiles;    // positive share desc
  std::vector<ProfileRow> subreddit_profiles;
  std::vector<ProfileRow> year_profiles;
  std::size_t labeled_mentions = 0;
  BatteryResult battery;
  ClassLabelTable class_table;
  std::optional<ContingencyResult> contingency;
  std::string contingency_note;  // why the contingency test was skipped
  std::vector<PairwiseResult> pairwise;
  std::vector<YearShare> annual_all_posts;
  std::vector<YearShare> annual_medication_posts;
  std::vector<ClassYearShare> class_year;
  SubscriberDistribution subscriber_distribution;
  std::vector<SubredditVolume> subreddit_volume;
  std::size_t configured_entities = 0;
};

// Assembles every table and cross-checks their totals against the mention
// and label sets. Throws ReconciliationError on any mismatch, and the join
// errors of join_labels / cohort_stats for inconsistent ids.
ReportBundle build_report(const ReportInputs& inputs);

// File name -> content, in file-name order.
std::vector<std::pair<std::string, std::string>> render_bundle(const ReportBundle& bundle);

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& directory);

// Battery as a delimited table (medication, positive_n, negative_n,
// non_neutral_n, p_hat, ci_lower, ci_upper, p_raw, p_fdr).
std::string render_battery(const BatteryResult& battery);

}  // namespace medsent
