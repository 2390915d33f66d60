#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "medsent/error.hpp"
#include "medsent/special.hpp"
#include "medsent/stats.hpp"
#include "medsent/tsv.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace medsent;

namespace {

AnnotatedMention annotated(std::string entity, std::string cls, SentimentLabel label, std::string subreddit = "s",
                           int year = 2020) {
  AnnotatedMention a;
  a.mention.generic_name = std::move(entity);
  a.mention.therapy_class = std::move(cls);
  a.mention.subreddit = std::move(subreddit);
  a.mention.created_utc = utc_seconds(year, 6, 1);
  a.label = label;
  return a;
}

Table reference_rows() {
  std::istringstream in(testsupport::data_file("fixtures/asymmetry_reference.tsv"));
  return read_tsv(in, "reference");
}

}  // namespace

TEST_CASE("special functions agree with Boost") {
  for (double a : {0.5, 1.0, 2.5, 7.0, 30.0}) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 10.0, 60.0}) {
      CHECK(regularized_gamma_q(a, x) == doctest::Approx(boost::math::gamma_q(a, x)).epsilon(1e-10));
      CHECK(regularized_gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-10));
    }
  }
  for (double a : {0.5, 1.0, 4.0, 45.0, 180.0}) {
    for (double b : {1.0, 2.0, 11.0, 175.0}) {
      for (double x : {0.05, 0.3, 0.5, 0.8, 0.97}) {
        CHECK(regularized_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
      }
      CHECK(inverse_regularized_beta(a, b, 0.025) == doctest::Approx(boost::math::ibeta_inv(a, b, 0.025)).epsilon(1e-10));
    }
  }
  CHECK(std::exp(log_binomial_pmf(3, 10, 0.5)) == doctest::Approx(120.0 / 1024.0).epsilon(1e-13));
  CHECK(chi_square_sf(0.0, 3) == 1.0);
}

TEST_CASE("binomial test examples") {
  auto nef = binomial_test(10, 0);
  CHECK(nef.p_hat == 1.0);
  CHECK(format_fixed(nef.ci.lower, 3) == "0.692");
  CHECK(nef.ci.upper == 1.0);
  CHECK(nef.p_raw == doctest::Approx(2.0 * std::pow(0.5, 10)).epsilon(1e-14));
  CHECK(nef.p_fdr == nef.p_raw);

  auto even = binomial_test(5, 5);
  CHECK(even.p_hat == 0.5);
  CHECK(even.p_raw == 1.0);

  auto lis = binomial_test(179, 44);
  CHECK(format_fixed(lis.p_hat, 3) == "0.803");
  CHECK(format_fixed(lis.ci.lower, 3) == "0.744");
  CHECK(format_fixed(lis.ci.upper, 3) == "0.853");

  CHECK_THROWS_AS(binomial_test(0, 0), EmptyNonNeutral);
}

TEST_CASE("binomial p-value against exact enumeration and Boost") {
  for (unsigned n = 1; n <= 60; ++n) {
    for (unsigned x = 0; x <= n; ++x) {
      if (n <= 25) {
        CHECK(binomial_two_sided_p(x, n) == doctest::Approx(oracle::binomial_min_likelihood_p(x, n)).epsilon(1e-12));
      }
      // For p0 = 0.5 the rule equals doubling the smaller tail.
      boost::math::binomial_distribution<double> d(n, 0.5);
      const unsigned k = std::min(x, n - x);
      const double doubled = std::min(1.0, 2.0 * boost::math::cdf(d, static_cast<double>(k)));
      CHECK(binomial_two_sided_p(x, n) == doctest::Approx(doubled).epsilon(1e-10));
    }
  }
  // Large n stays finite and tiny.
  CHECK(binomial_two_sided_p(179, 223) > 0.0);
  CHECK(binomial_two_sided_p(179, 223) < 1e-18);
}

TEST_CASE("binomial properties: symmetry and interval coverage") {
  for (std::size_t n = 1; n <= 80; n += 3) {
    for (std::size_t x = 0; x <= n; ++x) {
      const auto a = binomial_test(x, n - x);
      const auto b = binomial_test(n - x, x);
      CHECK(a.p_hat + b.p_hat == doctest::Approx(1.0));
      CHECK(a.p_raw == b.p_raw);
      CHECK(a.ci.lower == doctest::Approx(1.0 - b.ci.upper).epsilon(1e-12));
      CHECK(a.ci.lower <= a.p_hat);
      CHECK(a.p_hat <= a.ci.upper);
      CHECK(a.p_raw >= 0.0);
      CHECK(a.p_raw <= 1.0);
      if (x == n) {
        CHECK(a.ci.upper == 1.0);
        CHECK(a.ci.lower == doctest::Approx(std::pow(0.025, 1.0 / static_cast<double>(n))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("reference battery reproduces published estimates and intervals") {
  const auto t = reference_rows();
  REQUIRE(t.rows.size() == 20);
  for (const auto& row : t.rows) {
    const auto x = std::stoul(row[t.column("positive")]);
    const auto y = std::stoul(row[t.column("negative")]);
    const auto r = binomial_test(x, y);
    INFO(row[0]);
    CHECK(std::abs(r.p_hat - std::stod(row[t.column("p_hat")])) <= 0.001);
    CHECK(std::abs(r.ci.lower - std::stod(row[t.column("ci_lower")])) <= 0.001);
    CHECK(std::abs(r.ci.upper - std::stod(row[t.column("ci_upper")])) <= 0.001);
  }
}

TEST_CASE("published FDR column is consistent with a 76-test family") {
  // The 20 significant rows plus 56 non-significant entities.
  const std::map<std::string, std::string> published = {
      {"lisdexamfetamine", "1.25e-18"}, {"sertraline", "5.48e-15"}, {"venlafaxine", "3.59e-14"},
      {"mirtazapine", "2.72e-11"},      {"pregabalin", "6.38e-09"}, {"citalopram", "2.57e-05"},
      {"ketamine", "1.99e-04"},         {"fluoxetine", "2.53e-04"}, {"bupropion", "3.95e-04"},
      {"vilazodone", "1.21e-03"},       {"esketamine", "1.86e-03"}, {"aripiprazole", "5.12e-03"},
      {"nefazodone", "9.28e-03"},       {"phenelzine", "1.57e-02"}, {"fluvoxamine", "2.88e-02"},
      {"quetiapine", "2.88e-02"},       {"paroxetine", "3.63e-02"},
      {"repetitive transcranial magnetic stimulation", "2.83e-05"},
      {"electroconvulsive therapy", "7.01e-04"},
      {"amphetamine-dextroamphetamine", "2.68e-03"}};
  const auto t = reference_rows();
  std::vector<EntityLabelCounts> family;
  for (const auto& row : t.rows) {
    family.push_back({row[0], {std::stoul(row[2]), 0, std::stoul(row[1])}});
  }
  for (int i = 0; i < 56; ++i) family.push_back({"filler" + std::to_string(100 + i), {5, 3, 5}});
  const auto battery = run_asymmetry_battery(family);
  REQUIRE(battery.results.size() == 76);
  std::size_t compared = 0;
  for (const auto& r : battery.results) {
    auto it = published.find(r.entity);
    if (it == published.end()) continue;
    INFO(r.entity);
    CHECK(format_sci(r.p_fdr, 3) == it->second);
    ++compared;
  }
  CHECK(compared == published.size());
}

TEST_CASE("BH adjustment") {
  std::vector<double> one = {0.03};
  CHECK(bh_fdr(one) == std::vector<double>{0.03});
  std::vector<double> three = {0.01, 0.02, 0.03};
  for (double v : bh_fdr(three)) CHECK(v == doctest::Approx(0.03).epsilon(1e-15));
  std::vector<double> two = {0.005, 0.5};
  const auto adj = bh_fdr(two);
  CHECK(adj[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(adj[1] == 0.5);
  CHECK(bh_fdr(std::vector<double>{}).empty());
  CHECK_THROWS_AS(bh_fdr(std::vector<double>{0.1, 1.5}), InvalidP);
  CHECK_THROWS_AS(bh_fdr(std::vector<double>{NAN}), InvalidP);
}

TEST_CASE("BH matches the step-up oracle and never lowers a p-value") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> p(1 + gen() % 30);
    for (auto& v : p) v = gen() % 5 == 0 ? std::pow(u(gen), 6) : u(gen);
    if (gen() % 4 == 0) p.push_back(p[0]);  // ties
    const auto got = bh_fdr(p);
    CHECK(got == oracle::bh_step_up(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(got[i] >= p[i]);
      CHECK(got[i] <= 1.0);
    }
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    const auto adj_sorted = bh_fdr(sorted);
    CHECK(std::is_sorted(adj_sorted.begin(), adj_sorted.end()));
  }
}

TEST_CASE("battery") {
  SUBCASE("all neutral") {
    std::vector<AnnotatedMention> ms = {annotated("a", "c", SentimentLabel::Neutral),
                                        annotated("b", "c", SentimentLabel::Neutral)};
    const auto b = run_asymmetry_battery(ms);
    CHECK(b.results.empty());
    CHECK(b.ineligible == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("two entities") {
    std::vector<EntityLabelCounts> es = {{"even", {5, 0, 5}}, {"nef", {0, 3, 10}}};
    const auto b = run_asymmetry_battery(es);
    REQUIRE(b.results.size() == 2);
    CHECK(b.results[0].entity == "nef");
    CHECK(b.results[1].p_raw == 1.0);
    CHECK(b.results[0].p_fdr == doctest::Approx(2.0 * 2.0 * std::pow(0.5, 10)));
    for (const auto& r : b.results) CHECK(r.p_fdr >= r.p_raw);
  }
}

TEST_CASE("chi-square examples") {
  auto indep = chi_square({{10, 10}, {10, 10}});
  CHECK(indep.chi2 == 0.0);
  CHECK(indep.p == 1.0);
  for (const auto& row : indep.residuals) {
    for (double r : row) CHECK(r == doctest::Approx(0.0));
  }

  auto t = chi_square({{20, 5}, {5, 20}});
  CHECK(t.chi2 == doctest::Approx(18.0).epsilon(1e-13));
  CHECK(t.df == 1);
  CHECK(t.cramers_v == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(t.residuals[0][0] == doctest::Approx(std::sqrt(18.0)));
  CHECK(t.residuals[0][1] == doctest::Approx(-std::sqrt(18.0)));
  CHECK(t.residuals[1][0] == doctest::Approx(-std::sqrt(18.0)));
  CHECK(t.residuals[1][1] == doctest::Approx(std::sqrt(18.0)));

  CHECK_THROWS_AS(chi_square({{1, 2}, {3}}), InvalidArgument);
  CHECK_THROWS_AS(chi_square({{1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(chi_square({{0, 0}, {3, 4}}), DegenerateMargin);
  CHECK_THROWS_AS(chi_square({{0, 1}, {0, 4}}), DegenerateMargin);
}

TEST_CASE("Cramer's V") {
  CHECK(std::abs(cramers_v(686.07, 23399, 16, 3) - 0.121) <= 0.0005);
  CHECK(cramers_v(0.0, 10, 4, 3) == 0.0);
  CHECK(cramers_v(18, 50, 2, 2) == doctest::Approx(0.6));
  CHECK_THROWS_AS(cramers_v(1.0, 0, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(cramers_v(1.0, 10, 1, 3), InvalidArgument);
  CHECK_THROWS_AS(cramers_v(11.0, 10, 2, 2), EffectSizeOutOfRange);
}

TEST_CASE("chi-square matches the textbook oracle on random tables") {
  std::mt19937_64 gen(23);
  int tested = 0;
  while (tested < 300) {
    const std::size_t k = 2 + gen() % 5;
    CountTable t(k, std::vector<std::size_t>(3));
    for (auto& row : t) {
      for (auto& c : row) c = gen() % 51;
    }
    bool degenerate = false;
    for (const auto& row : t) degenerate = degenerate || (row[0] + row[1] + row[2] == 0);
    for (std::size_t j = 0; j < 3; ++j) {
      std::size_t s = 0;
      for (const auto& row : t) s += row[j];
      degenerate = degenerate || s == 0;
    }
    if (degenerate) {
      CHECK_THROWS_AS(chi_square(t), DegenerateMargin);
      continue;
    }
    const auto got = chi_square(t);
    const auto want = oracle::textbook_chi_square(t);
    CHECK(got.chi2 == doctest::Approx(want.chi2).epsilon(1e-10));
    CHECK(static_cast<double>(got.df) == want.df);
    CHECK(std::abs(got.p - want.p) <= 1e-8);
    CHECK(got.cramers_v >= 0.0);
    CHECK(got.cramers_v <= 1.0);
    CHECK(got.residuals.size() == k);
    ++tested;
  }
}

TEST_CASE("2x2 adjusted residual squared equals chi-square") {
  std::mt19937_64 gen(29);
  for (int i = 0; i < 100; ++i) {
    CountTable t = {{1 + gen() % 40, 1 + gen() % 40}, {1 + gen() % 40, 1 + gen() % 40}};
    const auto r = chi_square(t);
    for (const auto& row : r.residuals) {
      for (double z : row) CHECK(z * z == doctest::Approx(r.chi2).epsilon(1e-9));
    }
  }
}

TEST_CASE("pairwise class tests") {
  SUBCASE("sixteen classes give 120 pairs") {
    CountTable t;
    std::vector<std::string> names;
    for (int i = 0; i < 16; ++i) {
      t.push_back({static_cast<std::size_t>(10 + i), static_cast<std::size_t>(50 + 2 * i), static_cast<std::size_t>(30 - i)});
      names.push_back("c" + std::to_string(i));
    }
    const auto pairs = pairwise_class_tests(t, names);
    CHECK(pairs.size() == 120);
    for (const auto& p : pairs) {
      CHECK(p.tested);
      CHECK(p.df == 2);
      CHECK(p.p_fdr >= p.p_raw);
    }
  }
  SUBCASE("identical rows") {
    std::vector<std::string> names = {"a", "b"};
    const auto pairs = pairwise_class_tests({{4, 5, 6}, {4, 5, 6}}, names);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].chi2 == doctest::Approx(0.0));
    CHECK(pairs[0].p_raw == doctest::Approx(1.0));
  }
  SUBCASE("three-class toy table against the oracle") {
    CountTable t = {{12, 40, 8}, {30, 35, 20}, {5, 60, 3}};
    std::vector<std::string> names = {"x", "y", "z"};
    const auto pairs = pairwise_class_tests(t, names);
    REQUIRE(pairs.size() == 3);
    std::vector<double> raws;
    for (const auto& p : pairs) {
      const auto want = oracle::textbook_chi_square({t[p.row_a], t[p.row_b]});
      CHECK(p.chi2 == doctest::Approx(want.chi2).epsilon(1e-12));
      CHECK(std::abs(p.p_raw - want.p) <= 1e-10);
      raws.push_back(p.p_raw);
    }
    const auto adj = oracle::bh_step_up(raws);
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i].p_fdr == adj[i]);
  }
  SUBCASE("pairs with an empty column stay untested") {
    std::vector<std::string> names = {"a", "b", "c"};
    const auto pairs = pairwise_class_tests({{0, 5, 1}, {0, 7, 2}, {3, 1, 1}}, names);
    REQUIRE(pairs.size() == 3);
    CHECK_FALSE(pairs[0].tested);
    CHECK_FALSE(pairs[0].flag.empty());
    CHECK(pairs[1].tested);
    CHECK(pairs[2].tested);
  }
}

TEST_CASE("profiles") {
  const auto global = make_profile("all", {3460, 16865, 3074});
  CHECK(format_percent(global.share(SentimentLabel::Negative)) == "14.8");
  CHECK(format_percent(global.share(SentimentLabel::Neutral)) == "72.1");
  CHECK(format_percent(global.share(SentimentLabel::Positive)) == "13.1");

  const auto one = make_profile("g", {0, 0, 1});
  CHECK(one.share(SentimentLabel::Positive) == 1.0);
  CHECK(one.share(SentimentLabel::Negative) == 0.0);

  const auto nmda = make_profile("NMDA", {515, 5381 - 515 - 1000, 1000});
  CHECK(format_percent(nmda.share(SentimentLabel::Negative)) == "9.6");
  CHECK_THROWS_AS(make_profile("empty", {0, 0, 0}), EmptyGroup);
}

TEST_CASE("profile ordering and convexity") {
  std::vector<AnnotatedMention> ms;
  std::mt19937_64 gen(31);
  const char* entities[] = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 400; ++i) {
    ms.push_back(annotated(entities[gen() % 5], gen() % 2 ? "c1" : "c2", kLabels[gen() % 3],
                           gen() % 2 ? "r1" : "r2", 2015 + static_cast<int>(gen() % 4)));
  }
  auto rows = sentiment_profile(ms, GroupKey::Entity);
  order_by_positive_share(rows);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = rows[i - 1].share(SentimentLabel::Positive), b = rows[i].share(SentimentLabel::Positive);
    CHECK(a >= b);
    if (a == b) CHECK(rows[i - 1].group < rows[i].group);
  }
  // Ties on share fall back to the name.
  std::vector<ProfileRow> tied = {make_profile("z", {1, 0, 1}), make_profile("a", {2, 0, 2})};
  order_by_positive_share(tied);
  CHECK(tied[0].group == "a");

  for (GroupKey key : {GroupKey::Entity, GroupKey::Class, GroupKey::Subreddit, GroupKey::Year}) {
    const auto parts = sentiment_profile(ms, key);
    std::size_t total = 0;
    LabelCounts pooled{};
    for (const auto& p : parts) {
      total += p.counts.total();
      for (auto l : kLabels) pooled[l] += p.counts[l];
    }
    CHECK(total == ms.size());
    const auto whole = make_profile("all", pooled);
    for (auto l : kLabels) {
      double mix = 0.0;
      for (const auto& p : parts) mix += p.share(l) * static_cast<double>(p.counts.total()) / static_cast<double>(total);
      CHECK(mix == doctest::Approx(whole.share(l)).epsilon(1e-12));
    }
  }
  CHECK(parse_group_key(to_string(GroupKey::Subreddit)) == GroupKey::Subreddit);
}

TEST_CASE("class by label table keeps taxonomy order and drops empty classes") {
  ClassTaxonomy tax({{"first", false}, {"second", false}, {"third", false}}, {{"a", "first"}, {"b", "third"}});
  std::vector<AnnotatedMention> ms = {annotated("b", "third", SentimentLabel::Positive),
                                      annotated("a", "first", SentimentLabel::Negative),
                                      annotated("a", "first", SentimentLabel::Neutral)};
  const auto t = class_label_table(ms, tax);
  CHECK(t.classes == std::vector<std::string>{"first", "third"});
  CHECK(t.table == CountTable{{1, 1, 0}, {0, 0, 1}});
}
