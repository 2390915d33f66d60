#include "medsent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "medsent/error.hpp"
#include "medsent/special.hpp"

namespace medsent {

double binomial_two_sided_p(std::size_t x, std::size_t n) {
  if (x > n) throw InvalidArgument("x exceeds n");
  // Relative slack so outcomes tied with x in exact arithmetic are not lost
  // to rounding in the log-space pmf.
  constexpr double kTieTolerance = 1.0 + 1e-7;
  const double observed = log_binomial_pmf(x, n, 0.5);
  const double threshold = observed + std::log(kTieTolerance);
  // Add the tails from the outside in, smallest terms first.
  double total = 0.0;
  std::size_t lo = 0;
  std::size_t hi = n;
  while (lo <= hi) {
    const double a = log_binomial_pmf(lo, n, 0.5);
    if (a <= threshold) total += std::exp(a);
    if (hi != lo) {
      const double b = log_binomial_pmf(hi, n, 0.5);
      if (b <= threshold) total += std::exp(b);
    }
    ++lo;
    if (hi == 0) break;
    --hi;
  }
  return std::min(1.0, total);
}

ConfidenceInterval clopper_pearson(std::size_t x, std::size_t n, double level) {
  if (n == 0) throw EmptyNonNeutral("interval needs at least one trial");
  if (x > n) throw InvalidArgument("x exceeds n");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  const double dx = static_cast<double>(x);
  const double dn = static_cast<double>(n);
  ConfidenceInterval ci;
  // The all-success / no-success bounds have closed forms.
  if (x == 0) {
    ci.lower = 0.0;
  } else if (x == n) {
    ci.lower = std::pow(alpha / 2.0, 1.0 / dn);
  } else {
    ci.lower = inverse_regularized_beta(dx, dn - dx + 1.0, alpha / 2.0);
  }
  if (x == n) {
    ci.upper = 1.0;
  } else if (x == 0) {
    ci.upper = 1.0 - std::pow(alpha / 2.0, 1.0 / dn);
  } else {
    ci.upper = inverse_regularized_beta(dx + 1.0, dn - dx, 1.0 - alpha / 2.0);
  }
  return ci;
}

BinomialTestResult binomial_test(std::size_t x, std::size_t y, double level) {
  if (x + y == 0) throw EmptyNonNeutral("no positive or negative mentions");
  BinomialTestResult r;
  r.x = x;
  r.y = y;
  r.n = x + y;
  r.p_hat = static_cast<double>(x) / static_cast<double>(r.n);
  r.ci = clopper_pearson(x, r.n, level);
  r.p_raw = binomial_two_sided_p(x, r.n);
  r.p_fdr = r.p_raw;
  return r;
}

std::vector<double> bh_fdr(std::span<const double> p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidP("p-value " + std::to_string(p) + " outside [0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    const std::size_t i = order[rank - 1];
    // Long double keeps p * m exact, so rank m gives back p and nothing drops below its raw value.
    const long double scaled = static_cast<long double>(p_values[i]) * static_cast<long double>(m) / static_cast<long double>(rank);
    running = std::min(running, static_cast<double>(scaled));
    adjusted[i] = std::min(running, 1.0);
  }
  return adjusted;
}

BatteryResult run_asymmetry_battery(std::span<const EntityLabelCounts> entities) {
  BatteryResult battery;
  for (const auto& e : entities) {
    if (e.counts.positive + e.counts.negative == 0) {
      battery.ineligible.push_back(e.entity);
      continue;
    }
    auto r = binomial_test(e.counts.positive, e.counts.negative);
    r.entity = e.entity;
    battery.results.push_back(std::move(r));
  }
  std::vector<double> raw;
  raw.reserve(battery.results.size());
  for (const auto& r : battery.results) raw.push_back(r.p_raw);
  const auto adjusted = bh_fdr(raw);
  for (std::size_t i = 0; i < adjusted.size(); ++i) battery.results[i].p_fdr = adjusted[i];
  std::sort(battery.results.begin(), battery.results.end(), [](const auto& a, const auto& b) {
    if (a.p_fdr != b.p_fdr) return a.p_fdr < b.p_fdr;
    return a.entity < b.entity;
  });
  std::sort(battery.ineligible.begin(), battery.ineligible.end());
  return battery;
}

BatteryResult run_asymmetry_battery(std::span<const AnnotatedMention> mentions) {
  std::map<std::string, LabelCounts> by_entity;
  for (const auto& am : mentions) ++by_entity[am.mention.generic_name][am.label];
  std::vector<EntityLabelCounts> entities;
  for (auto& [name, counts] : by_entity) entities.push_back({name, counts});
  return run_asymmetry_battery(std::span<const EntityLabelCounts>(entities));
}

namespace {

struct Margins {
  std::vector<double> rows;
  std::vector<double> cols;
  double n = 0.0;
};

Margins margins_of(const CountTable& table) {
  if (table.size() < 2) throw InvalidArgument("contingency table needs at least 2 rows");
  const std::size_t c = table.front().size();
  if (c < 2) throw InvalidArgument("contingency table needs at least 2 columns");
  Margins m;
  m.rows.assign(table.size(), 0.0);
  m.cols.assign(c, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != c) throw InvalidArgument("contingency table rows differ in length");
    for (std::size_t j = 0; j < c; ++j) {
      const auto v = static_cast<double>(table[i][j]);
      m.rows[i] += v;
      m.cols[j] += v;
      m.n += v;
    }
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    if (m.rows[i] == 0.0) throw DegenerateMargin("row " + std::to_string(i) + " sums to zero");
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (m.cols[j] == 0.0) throw DegenerateMargin("column " + std::to_string(j) + " sums to zero");
  }
  return m;
}

}  // namespace

double cramers_v(double chi2, std::size_t n, std::size_t rows, std::size_t cols) {
  if (n == 0) throw InvalidArgument("Cramér's V needs n >= 1");
  const std::size_t k = std::min(rows, cols);
  if (k < 2) throw InvalidArgument("Cramér's V needs at least a 2 x 2 table");
  if (!(chi2 >= 0.0)) throw InvalidArgument("chi2 must be nonnegative");
  const double bound = static_cast<double>(n) * static_cast<double>(k - 1);
  if (chi2 > bound * (1.0 + 1e-12)) {
    throw EffectSizeOutOfRange("chi2 " + std::to_string(chi2) + " exceeds n (min(r, c) - 1) = " +
                               std::to_string(bound));
  }
  return std::min(1.0, std::sqrt(chi2 / bound));
}

Matrix standardized_residuals(const CountTable& table) {
  const Margins m = margins_of(table);
  Matrix out(table.size(), std::vector<double>(m.cols.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      const double e = m.rows[i] * m.cols[j] / m.n;
      const double var = e * (1.0 - m.rows[i] / m.n) * (1.0 - m.cols[j] / m.n);
      const double diff = static_cast<double>(table[i][j]) - e;
      out[i][j] = var > 0.0 ? diff / std::sqrt(var) : 0.0;
    }
  }
  return out;
}

ContingencyResult chi_square(const CountTable& table) {
  const Margins m = margins_of(table);
  ContingencyResult r;
  r.table = table;
  r.n = static_cast<std::size_t>(m.n);
  r.expected.assign(table.size(), std::vector<double>(m.cols.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      const double e = m.rows[i] * m.cols[j] / m.n;
      r.expected[i][j] = e;
      const double diff = static_cast<double>(table[i][j]) - e;
      r.chi2 += diff * diff / e;
    }
  }
  r.df = (table.size() - 1) * (m.cols.size() - 1);
  r.p = chi_square_sf(r.chi2, static_cast<double>(r.df));
  r.cramers_v = cramers_v(r.chi2, r.n, table.size(), m.cols.size());
  r.residuals = standardized_residuals(table);
  return r;
}

std::vector<PairwiseResult> pairwise_class_tests(const CountTable& table, std::span<const std::string> row_names) {
  if (table.size() < 2) throw InvalidArgument("pairwise tests need at least 2 rows");
  if (row_names.size() != table.size()) throw InvalidArgument("one name per table row required");
  std::vector<PairwiseResult> out;
  for (std::size_t a = 0; a < table.size(); ++a) {
    for (std::size_t b = a + 1; b < table.size(); ++b) {
      PairwiseResult r;
      r.row_a = a;
      r.row_b = b;
      r.class_a = row_names[a];
      r.class_b = row_names[b];
      try {
        const auto sub = chi_square({table[a], table[b]});
        r.tested = true;
        r.chi2 = sub.chi2;
        r.df = sub.df;
        r.p_raw = sub.p;
      } catch (const DegenerateMargin& e) {
        r.flag = e.what();
      }
      out.push_back(std::move(r));
    }
  }
  std::vector<double> raw;
  for (const auto& r : out) {
    if (r.tested) raw.push_back(r.p_raw);
  }
  const auto adjusted = bh_fdr(raw);
  std::size_t k = 0;
  for (auto& r : out) {
    if (r.tested) r.p_fdr = adjusted[k++];
  }
  return out;
}

std::string_view to_string(GroupKey key) noexcept {
  switch (key) {
    case GroupKey::Entity: return "entity";
    case GroupKey::Class: return "class";
    case GroupKey::Subreddit: return "subreddit";
    case GroupKey::Year: return "year";
  }
  return "entity";
}

GroupKey parse_group_key(std::string_view text) {
  if (text == "entity") return GroupKey::Entity;
  if (text == "class") return GroupKey::Class;
  if (text == "subreddit") return GroupKey::Subreddit;
  if (text == "year") return GroupKey::Year;
  throw InvalidArgument("group key must be entity, class, subreddit or year");
}

double ProfileRow::share(SentimentLabel label) const {
  const std::size_t total = counts.total();
  if (total == 0) throw EmptyGroup("group '" + group + "' has no mentions");
  return static_cast<double>(counts[label]) / static_cast<double>(total);
}

ProfileRow make_profile(std::string group, const LabelCounts& counts) {
  if (counts.total() == 0) throw EmptyGroup("group '" + group + "' has no mentions");
  return {std::move(group), counts};
}

std::vector<ProfileRow> sentiment_profile(std::span<const AnnotatedMention> mentions, GroupKey key) {
  // Years sort numerically because they share a width.
  std::map<std::string, LabelCounts> groups;
  for (const auto& am : mentions) {
    std::string name;
    switch (key) {
      case GroupKey::Entity: name = am.mention.generic_name; break;
      case GroupKey::Class: name = am.mention.therapy_class; break;
      case GroupKey::Subreddit: name = am.mention.subreddit; break;
      case GroupKey::Year: name = std::to_string(utc_year(am.mention.created_utc)); break;
    }
    ++groups[name][am.label];
  }
  std::vector<ProfileRow> out;
  out.reserve(groups.size());
  for (auto& [name, counts] : groups) out.push_back(make_profile(name, counts));
  return out;
}

void order_by_positive_share(std::vector<ProfileRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ProfileRow& a, const ProfileRow& b) {
    // Compare a.pos / a.total with b.pos / b.total exactly.
    const auto lhs = static_cast<unsigned long long>(a.counts.positive) * b.counts.total();
    const auto rhs = static_cast<unsigned long long>(b.counts.positive) * a.counts.total();
    if (lhs != rhs) return lhs > rhs;
    return a.group < b.group;
  });
}

ClassLabelTable class_label_table(std::span<const AnnotatedMention> mentions, const ClassTaxonomy& taxonomy) {
  std::vector<LabelCounts> per_class(taxonomy.size());
  for (const auto& am : mentions) ++per_class[taxonomy.class_index(am.mention.therapy_class)][am.label];
  ClassLabelTable out;
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    if (per_class[i].total() == 0) continue;
    out.classes.push_back(taxonomy.classes()[i].name);
    out.table.push_back({per_class[i].negative, per_class[i].neutral, per_class[i].positive});
  }
  return out;
}

}  // namespace medsent
