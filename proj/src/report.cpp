#include "medsent/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "medsent/error.hpp"
#include "medsent/tsv.hpp"

namespace medsent {

std::vector<ClassYearShare> class_year_composition(std::span<const Mention> mentions) {
  std::map<int, std::map<std::string, std::size_t>> by_year;
  for (const auto& m : mentions) ++by_year[utc_year(m.created_utc)][m.therapy_class];
  std::vector<ClassYearShare> out;
  for (const auto& [year, classes] : by_year) {
    std::size_t total = 0;
    for (const auto& [name, n] : classes) total += n;
    for (const auto& [name, n] : classes) {
      out.push_back({year, name, n, 100.0 * static_cast<double>(n) / static_cast<double>(total)});
    }
  }
  return out;
}

namespace {

void reconcile(const std::string& table, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw ReconciliationError(table, static_cast<long long>(expected), static_cast<long long>(actual));
  }
}

std::size_t profile_total(const std::vector<ProfileRow>& rows) {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.counts.total();
  return total;
}

}  // namespace

ReportBundle build_report(const ReportInputs& in) {
  if (!in.taxonomy) throw InvalidArgument("report needs a class taxonomy");
  ReportBundle b;
  b.configured_entities = in.configured_entities;
  b.cohort = cohort_stats(in.posts, in.mentions);
  b.frequencies = mention_frequencies(in.mentions);
  b.reach = b.frequencies.entities;
  std::stable_sort(b.reach.begin(), b.reach.end(), [](const auto& x, const auto& y) {
    if (x.subscribers != y.subscribers) return x.subscribers > y.subscribers;
    return x.generic_name < y.generic_name;
  });

  const auto annotated = join_labels(in.mentions, in.labels);
  b.labeled_mentions = annotated.size();
  if (!annotated.empty()) {
    LabelCounts global;
    for (const auto& am : annotated) ++global[am.label];
    b.global_profile = make_profile("all", global);
  }
  b.entity_profiles = sentiment_profile(annotated, GroupKey::Entity);
  order_by_positive_share(b.entity_profiles);
  b.class_profiles = sentiment_profile(annotated, GroupKey::Class);
  order_by_positive_share(b.class_profiles);
  b.subreddit_profiles = sentiment_profile(annotated, GroupKey::Subreddit);
  b.year_profiles = sentiment_profile(annotated, GroupKey::Year);
  b.battery = run_asymmetry_battery(annotated);

  b.class_table = class_label_table(annotated, *in.taxonomy);
  if (b.class_table.table.size() < 2) {
    b.contingency_note = "fewer than two therapeutic classes have labeled mentions";
  } else {
    try {
      b.contingency = chi_square(b.class_table.table);
      b.pairwise = pairwise_class_tests(b.class_table.table, b.class_table.classes);
    } catch (const DegenerateMargin& e) {
      b.contingency_note = e.what();
    }
  }

  b.annual_all_posts = annual_share(in.posts, in.collection_end_utc);
  std::set<std::string_view> with_mentions;
  for (const auto& m : in.mentions) with_mentions.insert(m.post_id);
  std::vector<Post> medication_posts;
  for (const auto& p : in.posts) {
    if (with_mentions.count(p.id)) medication_posts.push_back(p);
  }
  b.annual_medication_posts = annual_share(medication_posts, in.collection_end_utc);
  b.class_year = class_year_composition(in.mentions);
  b.subscriber_distribution = subscriber_medication_distribution(in.mentions);

  std::map<std::string, SubredditVolume> volume;
  for (const auto& p : in.posts) {
    auto& v = volume[p.subreddit];
    v.subreddit = p.subreddit;
    ++v.posts;
  }
  for (const auto& m : in.mentions) ++volume[m.subreddit].mentions;
  for (auto& [name, v] : volume) {
    v.subreddit = name;
    b.subreddit_volume.push_back(v);
  }

  // Every table must account for the same mentions, labels and posts.
  const std::size_t n_mentions = in.mentions.size();
  std::size_t freq_total = 0;
  for (const auto& e : b.frequencies.entities) freq_total += e.mentions;
  reconcile("mention_frequency", n_mentions, freq_total);
  reconcile("cohort_summary", n_mentions, b.cohort.total_mentions);
  std::size_t class_year_total = 0;
  for (const auto& r : b.class_year) class_year_total += r.mentions;
  reconcile("class_year", n_mentions, class_year_total);
  std::size_t volume_mentions = 0, volume_posts = 0;
  for (const auto& v : b.subreddit_volume) {
    volume_mentions += v.mentions;
    volume_posts += v.posts;
  }
  reconcile("subreddit_volume.mentions", n_mentions, volume_mentions);
  reconcile("subreddit_volume.posts", in.posts.size(), volume_posts);
  std::size_t annual_total = 0;
  for (const auto& y : b.annual_all_posts) annual_total += y.posts;
  reconcile("annual_posts", in.posts.size(), annual_total);
  std::size_t annual_med_total = 0;
  for (const auto& y : b.annual_medication_posts) annual_med_total += y.posts;
  reconcile("annual_medication_posts", b.cohort.posts_with_mentions, annual_med_total);

  reconcile("profiles_entity", b.labeled_mentions, profile_total(b.entity_profiles));
  reconcile("profiles_class", b.labeled_mentions, profile_total(b.class_profiles));
  reconcile("profiles_subreddit", b.labeled_mentions, profile_total(b.subreddit_profiles));
  reconcile("profiles_year", b.labeled_mentions, profile_total(b.year_profiles));
  std::size_t table_total = 0;
  for (const auto& row : b.class_table.table) {
    for (auto v : row) table_total += v;
  }
  reconcile("contingency", b.labeled_mentions, table_total);
  std::size_t battery_non_neutral = 0, profile_non_neutral = 0;
  for (const auto& r : b.battery.results) battery_non_neutral += r.n;
  for (const auto& r : b.entity_profiles) profile_non_neutral += r.counts.positive + r.counts.negative;
  reconcile("asymmetry_battery", profile_non_neutral, battery_non_neutral);
  std::size_t distribution_total = 0;
  for (const auto& [k, n] : b.subscriber_distribution.subscribers_by_distinct_count) distribution_total += n;
  reconcile("subscriber_distribution", b.frequencies.mentioning_subscribers, distribution_total);
  return b;
}

namespace {

std::string render_table(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows) {
  Table table;
  table.columns = std::move(columns);
  table.rows = std::move(rows);
  std::ostringstream out;
  write_tsv(out, table);
  return out.str();
}

std::string pct(double share) { return format_percent(share); }

std::string render_profiles(const std::vector<ProfileRow>& rows, const std::string& key) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({r.group, std::to_string(r.counts.negative), std::to_string(r.counts.neutral),
                   std::to_string(r.counts.positive), std::to_string(r.counts.total()),
                   pct(r.share(SentimentLabel::Negative)), pct(r.share(SentimentLabel::Neutral)),
                   pct(r.share(SentimentLabel::Positive))});
  }
  return render_table({key, "negative", "neutral", "positive", "total", "negative_pct", "neutral_pct",
                       "positive_pct"},
                      std::move(out));
}

std::string render_annual(const std::vector<YearShare>& rows) {
  std::vector<double> shares;
  for (const auto& y : rows) shares.push_back(y.share_percent);
  const auto rounded = round_preserving_total(shares, 1);
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& y = rows[i];
    out.push_back({std::to_string(y.year), std::to_string(y.posts), format_fixed(rounded[i], 1),
                   y.partial ? "true" : "false"});
  }
  return render_table({"year", "posts", "share_pct", "partial_year"}, std::move(out));
}

std::string render_cohort(const ReportBundle& b) {
  const auto& c = b.cohort;
  auto summary = [](const CountSummary& s) {
    return format_fixed(s.mean, 1) + " (median " + format_fixed(s.median, 1) + "; range " +
           std::to_string(s.min) + "-" + std::to_string(s.max) + ")";
  };
  std::vector<std::vector<std::string>> rows = {
      {"posts", std::to_string(c.post_count)},
      {"subscribers", std::to_string(c.subscriber_count)},
      {"subreddits", std::to_string(c.subreddit_count)},
      {"first_post_date", c.post_count ? format_utc_date(c.first_post_utc) : ""},
      {"last_post_date", c.post_count ? format_utc_date(c.last_post_utc) : ""},
      {"posts_with_mentions", std::to_string(c.posts_with_mentions)},
      {"total_mentions", std::to_string(c.total_mentions)},
      {"entities_observed", std::to_string(c.entities_observed)},
      {"entities_configured", std::to_string(b.configured_entities)},
      {"mentions_per_post", summary(c.mentions_per_post)},
      {"distinct_medications_per_post", summary(c.distinct_medications_per_post)},
      {"subscribers_with_one_post", std::to_string(c.subscribers_with_one_post)},
      {"subscribers_with_5_plus_posts", std::to_string(c.subscribers_with_5_plus_posts)},
      {"subscribers_with_10_plus_posts", std::to_string(c.subscribers_with_10_plus_posts)},
  };
  return render_table({"metric", "value"}, std::move(rows));
}

nlohmann::ordered_json summary_json(const ReportBundle& b) {
  nlohmann::ordered_json doc;
  const auto& c = b.cohort;
  doc["posts"] = c.post_count;
  doc["subscribers"] = c.subscriber_count;
  doc["subreddits"] = c.subreddit_count;
  doc["total_mentions"] = c.total_mentions;
  doc["posts_with_mentions"] = c.posts_with_mentions;
  doc["entities_observed"] = c.entities_observed;
  doc["entities_configured"] = b.configured_entities;
  doc["mean_mentions_per_post"] = c.mentions_per_post.mean;
  doc["labeled_mentions"] = b.labeled_mentions;
  if (b.global_profile) {
    nlohmann::ordered_json g;
    for (auto label : kLabels) {
      g[std::string(to_string(label))] = {{"count", b.global_profile->counts[label]},
                                          {"share", b.global_profile->share(label)}};
    }
    doc["global_profile"] = g;
  } else {
    doc["global_profile"] = nullptr;
  }
  doc["battery_tested"] = b.battery.results.size();
  doc["battery_ineligible"] = b.battery.ineligible;
  std::size_t significant = 0;
  for (const auto& r : b.battery.results) significant += r.p_fdr < 0.05;
  doc["battery_significant_fdr_0_05"] = significant;
  if (b.contingency) {
    const auto& k = *b.contingency;
    doc["contingency"] = {{"rows", k.table.size()}, {"columns", 3},  {"n", k.n},
                          {"chi2", k.chi2},         {"df", k.df},     {"p", k.p},
                          {"cramers_v", k.cramers_v}};
    std::size_t tested = 0, sig = 0;
    for (const auto& p : b.pairwise) {
      tested += p.tested;
      sig += p.tested && p.p_fdr < 0.05;
    }
    doc["pairwise"] = {{"pairs", b.pairwise.size()}, {"tested", tested}, {"significant_fdr_0_05", sig}};
  } else {
    doc["contingency"] = nullptr;
    doc["contingency_note"] = b.contingency_note;
  }
  return doc;
}

}  // namespace

std::string render_battery(const BatteryResult& battery) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : battery.results) {
    rows.push_back({r.entity, std::to_string(r.x), std::to_string(r.y), std::to_string(r.n),
                    format_fixed(r.p_hat, 3), format_fixed(r.ci.lower, 3), format_fixed(r.ci.upper, 3),
                    format_sci(r.p_raw), format_sci(r.p_fdr)});
  }
  return render_table({"medication", "positive_n", "negative_n", "non_neutral_n", "p_hat", "ci_lower",
                       "ci_upper", "p_raw", "p_fdr"},
                      std::move(rows));
}

std::vector<std::pair<std::string, std::string>> render_bundle(const ReportBundle& b) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("cohort_summary.tsv", render_cohort(b));

  {
    std::vector<std::vector<std::string>> rows;
    std::size_t rank = 0;
    for (const auto& e : b.frequencies.entities) {
      rows.push_back({std::to_string(++rank), e.generic_name, e.therapy_class, std::to_string(e.mentions),
                      pct(static_cast<double>(e.mentions) / static_cast<double>(b.frequencies.total_mentions))});
    }
    files.emplace_back("mention_frequency.tsv",
                       render_table({"rank", "generic_name", "therapy_class", "mentions", "share_pct"}, rows));
  }
  {
    std::vector<std::vector<std::string>> rows;
    std::size_t rank = 0;
    for (const auto& e : b.reach) {
      rows.push_back({std::to_string(++rank), e.generic_name, e.therapy_class, std::to_string(e.subscribers),
                      std::to_string(b.frequencies.mentioning_subscribers), format_fixed(e.reach, 4)});
    }
    files.emplace_back("reach.tsv", render_table({"rank", "generic_name", "therapy_class", "subscribers",
                                                  "mentioning_subscribers", "reach"},
                                                 rows));
  }
  files.emplace_back("profiles_entity.tsv", render_profiles(b.entity_profiles, "generic_name"));
  files.emplace_back("profiles_class.tsv", render_profiles(b.class_profiles, "therapy_class"));
  files.emplace_back("profiles_subreddit.tsv", render_profiles(b.subreddit_profiles, "subreddit"));
  files.emplace_back("profiles_year.tsv", render_profiles(b.year_profiles, "year"));
  files.emplace_back("asymmetry_battery.tsv", render_battery(b.battery));

  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < b.class_table.classes.size(); ++i) {
      std::vector<std::string> row = {b.class_table.classes[i]};
      for (auto v : b.class_table.table[i]) row.push_back(std::to_string(v));
      for (std::size_t j = 0; j < 3; ++j) {
        row.push_back(b.contingency ? format_fixed(b.contingency->residuals[i][j], 3) : "");
      }
      rows.push_back(std::move(row));
    }
    files.emplace_back("contingency.tsv",
                       render_table({"therapy_class", "negative", "neutral", "positive", "residual_negative",
                                     "residual_neutral", "residual_positive"},
                                    rows));
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : b.pairwise) {
      rows.push_back({p.class_a, p.class_b, p.tested ? "true" : "false",
                      p.tested ? format_fixed(p.chi2, 3) : "", p.tested ? std::to_string(p.df) : "",
                      p.tested ? format_sci(p.p_raw) : "", p.tested ? format_sci(p.p_fdr) : "", p.flag});
    }
    files.emplace_back("pairwise.tsv", render_table({"class_a", "class_b", "tested", "chi2", "df", "p_raw",
                                                     "p_fdr", "flag"},
                                                    rows));
  }
  files.emplace_back("annual_posts.tsv", render_annual(b.annual_all_posts));
  files.emplace_back("annual_medication_posts.tsv", render_annual(b.annual_medication_posts));
  {
    // Shares within a year are rounded together.
    std::vector<double> rounded;
    for (std::size_t i = 0; i < b.class_year.size();) {
      std::size_t j = i;
      std::vector<double> year;
      while (j < b.class_year.size() && b.class_year[j].year == b.class_year[i].year) year.push_back(b.class_year[j++].share_percent);
      for (double v : round_preserving_total(year, 1)) rounded.push_back(v);
      i = j;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < b.class_year.size(); ++i) {
      const auto& r = b.class_year[i];
      rows.push_back({std::to_string(r.year), r.therapy_class, std::to_string(r.mentions), format_fixed(rounded[i], 1)});
    }
    files.emplace_back("class_year.tsv", render_table({"year", "therapy_class", "mentions", "share_pct"}, rows));
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, n] : b.subscriber_distribution.subscribers_by_distinct_count) {
      rows.push_back({std::to_string(k), std::to_string(n), pct(b.subscriber_distribution.share(k))});
    }
    files.emplace_back("subscriber_distribution.tsv",
                       render_table({"distinct_medications", "subscribers", "share_pct"}, rows));
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : b.subreddit_volume) {
      rows.push_back({v.subreddit, std::to_string(v.posts), std::to_string(v.mentions)});
    }
    files.emplace_back("subreddit_volume.tsv", render_table({"subreddit", "posts", "mentions"}, rows));
  }
  files.emplace_back("summary.json", summary_json(b).dump(2) + "\n");
  std::sort(files.begin(), files.end());
  return files;
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory.string() + "': " + ec.message());
  for (const auto& [name, content] : render_bundle(bundle)) write_text_file(directory / name, content);
}

}  // namespace medsent
