#include "medsent/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "medsent/error.hpp"
#include "medsent/tsv.hpp"

namespace medsent {

std::string_view to_string(SentimentLabel label) noexcept {
  switch (label) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "neutral";
}

SentimentLabel parse_label(std::string_view text) {
  const std::string folded = normalize_phrase(text);
  if (folded == "negative") return SentimentLabel::Negative;
  if (folded == "neutral") return SentimentLabel::Neutral;
  if (folded == "positive") return SentimentLabel::Positive;
  throw InvalidLabel("label must be negative, neutral or positive, got '" + std::string(text) + "'");
}

std::string_view to_string(LabelSource source) noexcept {
  return source == LabelSource::Rule ? "rule" : "external";
}

// ---------------------------------------------------------------------------
// Predictions

PredictionIngest ingest_predictions(std::string_view text, std::span<const std::string> mention_ids,
                                    LabelSource source) {
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < mention_ids.size(); ++i) slot.emplace(mention_ids[i], i);
  std::vector<std::optional<LabeledMention>> by_slot(mention_ids.size());

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "predictions:" + std::to_string(line_no) + ": ";

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what());
    }
    if (!record.is_object()) throw ParseError(where + "record is not an object");
    auto id_it = record.find("mention_id");
    auto label_it = record.find("label");
    auto conf_it = record.find("confidence");
    if (id_it == record.end() || !id_it->is_string()) throw ParseError(where + "missing mention_id");
    if (label_it == record.end() || !label_it->is_string()) throw InvalidLabel(where + "missing label");
    if (conf_it == record.end() || !conf_it->is_number()) throw InvalidConfidence(where + "missing confidence");

    LabeledMention lm;
    lm.mention_id = id_it->get<std::string>();
    try {
      lm.label = parse_label(label_it->get<std::string>());
    } catch (const InvalidLabel& e) {
      throw InvalidLabel(where + e.what());
    }
    lm.confidence = conf_it->get<double>();
    lm.source = source;
    if (!(lm.confidence >= 0.0 && lm.confidence <= 1.0)) {
      throw InvalidConfidence(where + "confidence " + conf_it->dump() + " outside [0, 1]");
    }
    auto it = slot.find(lm.mention_id);
    if (it == slot.end()) throw UnknownMentionId(where + "no mention '" + lm.mention_id + "'");
    if (by_slot[it->second]) throw DuplicatePrediction(where + "second prediction for '" + lm.mention_id + "'");
    by_slot[it->second] = std::move(lm);
  }

  PredictionIngest result;
  for (std::size_t i = 0; i < by_slot.size(); ++i) {
    if (by_slot[i]) {
      result.labeled.push_back(std::move(*by_slot[i]));
    } else {
      result.missing.push_back(mention_ids[i]);
    }
  }
  return result;
}

PredictionIngest ingest_predictions(std::string_view text, std::span<const Mention> mentions,
                                    LabelSource source) {
  std::vector<std::string> ids;
  ids.reserve(mentions.size());
  for (const auto& m : mentions) ids.push_back(m.mention_id);
  return ingest_predictions(text, std::span<const std::string>(ids), source);
}

std::string write_predictions(std::span<const LabeledMention> labeled) {
  std::string out;
  for (const auto& lm : labeled) {
    nlohmann::ordered_json record;
    record["mention_id"] = lm.mention_id;
    record["label"] = to_string(lm.label);
    record["confidence"] = lm.confidence;
    record["source"] = to_string(lm.source);
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::string completeness_report(const PredictionIngest& ingest) {
  nlohmann::ordered_json doc;
  doc["labeled"] = ingest.labeled.size();
  doc["missing"] = ingest.missing.size();
  doc["missing_mention_ids"] = ingest.missing;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Rule classifier

CueLexicon::CueLexicon(const std::vector<std::string>& positive, const std::vector<std::string>& negative) {
  auto add = [this](const std::string& phrase, bool is_positive) {
    if (canonical_phrase(phrase).empty()) throw InvalidArgument("cue '" + phrase + "' has no tokens");
    const auto existing = index_.insert(phrase, positive_.size());
    if (existing) {
      if (positive_[*existing] != is_positive) {
        throw InvalidArgument("cue '" + phrase + "' is listed as both positive and negative");
      }
      return;
    }
    positive_.push_back(is_positive);
  };
  for (const auto& p : positive) add(p, true);
  for (const auto& n : negative) add(n, false);
}

CueLexicon CueLexicon::parse(std::string_view positive_text, std::string_view negative_text) {
  return CueLexicon(config_lines(positive_text), config_lines(negative_text));
}

CueLexicon::Counts CueLexicon::count(std::string_view text) const {
  Counts counts;
  for (const auto& hit : index_.matches(text)) {
    if (positive_[hit.id]) {
      ++counts.positive;
    } else {
      ++counts.negative;
    }
  }
  return counts;
}

LabeledMention rule_classify(const ContextWindow& window, const CueLexicon& cues) {
  const auto counts = cues.count(window.masked_text);
  LabeledMention lm;
  lm.mention_id = window.mention_id;
  lm.source = LabelSource::Rule;
  const std::size_t total = counts.positive + counts.negative;
  if (total == 0) {
    lm.label = SentimentLabel::Neutral;
    lm.confidence = 0.5;
    return lm;
  }
  if (counts.positive > counts.negative) {
    lm.label = SentimentLabel::Positive;
  } else if (counts.positive < counts.negative) {
    lm.label = SentimentLabel::Negative;
  } else {
    lm.label = SentimentLabel::Neutral;
  }
  const std::size_t margin =
      counts.positive > counts.negative ? counts.positive - counts.negative : counts.negative - counts.positive;
  lm.confidence = static_cast<double>(margin) / static_cast<double>(total);
  return lm;
}

// ---------------------------------------------------------------------------
// Augmentation

std::size_t& LabelCounts::operator[](SentimentLabel label) noexcept {
  return label == SentimentLabel::Negative ? negative : label == SentimentLabel::Neutral ? neutral : positive;
}

std::size_t LabelCounts::operator[](SentimentLabel label) const noexcept {
  return label == SentimentLabel::Negative ? negative : label == SentimentLabel::Neutral ? neutral : positive;
}

LabelCounts validate_augmentation(const LabelCounts& original, int synthetic_per_instance) {
  if (synthetic_per_instance < 0) throw InvalidArgument("synthetic_per_instance must be >= 0");
  const auto factor = static_cast<std::size_t>(synthetic_per_instance) + 1;
  return {original.negative * factor, original.neutral, original.positive * factor};
}

const std::string_view kAugmentationPromptTemplate =
    "You will rewrite a social media post about depression treatment.\n"
    "\n"
    "Original post:\n"
    "[text]\n"
    "\n"
    "Target therapy: {{therapy}}\n"
    "Sentiment toward the target therapy: {{sentiment}}\n"
    "\n"
    "Write exactly {{count}} new posts in the style of a short social media post. Each new post must:\n"
    "- mention the same target therapy, {{therapy}};\n"
    "- express the same {{sentiment}} sentiment toward {{therapy}};\n"
    "- keep any other therapies it mentions neutral;\n"
    "- read as a plausible post by a different person, without copying the original wording.\n"
    "\n"
    "Output exactly {{count}} lines, one post per line, with no numbering or commentary:\n"
    "[tweet]\n";

namespace {

// Single pass over the template so substituted text is never re-expanded.
std::string render(std::string_view tmpl, const std::vector<std::pair<std::string_view, std::string>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (tmpl.compare(i, key.size(), key) == 0) {
        out += value;
        i += key.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace

std::string build_augmentation_prompt(const AugmentationInstance& instance) {
  if (instance.label == SentimentLabel::Neutral) {
    throw NeutralNotAugmented("neutral instances are not augmented");
  }
  if (instance.target.begin >= instance.target.end || instance.target.end > instance.text.size()) {
    throw SpanOutOfBounds("target span [" + std::to_string(instance.target.begin) + ", " +
                          std::to_string(instance.target.end) + ") outside text of " +
                          std::to_string(instance.text.size()) + " bytes");
  }
  const std::string therapy = instance.text.substr(instance.target.begin, instance.target.size());
  return render(kAugmentationPromptTemplate, {{"[text]", instance.text},
                                              {"{{therapy}}", therapy},
                                              {"{{sentiment}}", std::string(to_string(instance.label))},
                                              {"{{count}}", std::to_string(kSyntheticPerInstance)}});
}

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_index bound must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::size_t idx(SentimentLabel label) { return static_cast<std::size_t>(label); }

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInput("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EvalReport evaluate(std::span<const SentimentLabel> gold, std::span<const SentimentLabel> predicted,
                    std::size_t bootstrap_resamples, double ci_level, std::uint64_t seed) {
  if (gold.size() != predicted.size()) {
    throw LengthMismatch("gold has " + std::to_string(gold.size()) + " labels, predictions have " +
                         std::to_string(predicted.size()));
  }
  if (gold.empty()) throw EmptyInput("nothing to evaluate");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw InvalidArgument("ci_level must lie in (0, 1)");

  EvalReport report;
  report.n = gold.size();
  report.bootstrap_resamples = bootstrap_resamples;
  report.ci_level = ci_level;
  report.seed = seed;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++report.confusion[idx(gold[i])][idx(predicted[i])];
    if (gold[i] == predicted[i]) ++correct;
  }
  const double n = static_cast<double>(report.n);
  report.accuracy = static_cast<double>(correct) / n;

  double macro = 0.0;
  double tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    double tp = static_cast<double>(report.confusion[c][c]);
    double pred_c = 0.0, gold_c = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      pred_c += static_cast<double>(report.confusion[k][c]);
      gold_c += static_cast<double>(report.confusion[c][k]);
    }
    auto& s = report.per_class[c];
    s.support = static_cast<std::size_t>(gold_c);
    s.precision = safe_ratio(tp, pred_c);
    s.recall = safe_ratio(tp, gold_c);
    s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    macro += s.f1;
    tp_all += tp;
    fp_all += pred_c - tp;
    fn_all += gold_c - tp;
  }
  report.macro_f1 = macro / 3.0;
  report.micro_f1 = safe_ratio(2.0 * tp_all, 2.0 * tp_all + fp_all + fn_all);

  if (bootstrap_resamples == 0) {
    report.micro_f1_ci_lower = report.micro_f1_ci_upper = report.micro_f1;
    return report;
  }
  std::vector<double> stats(bootstrap_resamples);
  for (std::size_t r = 0; r < bootstrap_resamples; ++r) {
    Rng rng(splitmix64(seed + r));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < report.n; ++i) {
      const auto j = rng.uniform_index(report.n);
      if (gold[j] == predicted[j]) ++hits;
    }
    // Micro-F1 of a resample is its accuracy.
    stats[r] = static_cast<double>(hits) / n;
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - ci_level;
  report.micro_f1_ci_lower = quantile_sorted(stats, alpha / 2.0);
  report.micro_f1_ci_upper = quantile_sorted(stats, 1.0 - alpha / 2.0);
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["n"] = report.n;
  doc["accuracy"] = report.accuracy;
  doc["micro_f1"] = report.micro_f1;
  doc["micro_f1_ci"] = {report.micro_f1_ci_lower, report.micro_f1_ci_upper};
  doc["macro_f1"] = report.macro_f1;
  nlohmann::ordered_json classes;
  for (auto label : kLabels) {
    const auto& s = report.per_class[idx(label)];
    nlohmann::ordered_json entry;
    entry["precision"] = s.precision;
    entry["recall"] = s.recall;
    entry["f1"] = s.f1;
    entry["support"] = s.support;
    classes[std::string(to_string(label))] = entry;
  }
  doc["per_class"] = classes;
  nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  doc["confusion_gold_by_predicted"] = confusion;
  doc["bootstrap_resamples"] = report.bootstrap_resamples;
  doc["ci_level"] = report.ci_level;
  doc["seed"] = report.seed;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Review sampling

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  if (n > population) {
    throw SampleTooLarge("cannot sample " + std::to_string(n) + " of " + std::to_string(population));
  }
  std::vector<std::size_t> order(population);
  for (std::size_t i = 0; i < population; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(population - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  return order;
}

std::vector<ReviewRow> sample_for_review(std::span<const LabeledMention> labeled,
                                         std::span<const ContextWindow> windows, std::size_t n,
                                         std::uint64_t seed) {
  std::vector<const LabeledMention*> population;
  population.reserve(labeled.size());
  for (const auto& lm : labeled) population.push_back(&lm);
  std::sort(population.begin(), population.end(),
            [](const auto* a, const auto* b) { return a->mention_id < b->mention_id; });
  std::unordered_map<std::string_view, const ContextWindow*> by_id;
  for (const auto& w : windows) by_id.emplace(w.mention_id, &w);

  std::vector<ReviewRow> rows;
  for (std::size_t i : sample_indices(population.size(), n, seed)) {
    const auto* lm = population[i];
    ReviewRow row;
    row.mention_id = lm->mention_id;
    if (auto it = by_id.find(lm->mention_id); it != by_id.end()) row.masked_text = it->second->masked_text;
    row.label = lm->label;
    row.confidence = lm->confidence;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_review_sheet(std::span<const ReviewRow> rows) {
  Table table;
  table.columns = {"mention_id", "masked_text", "label", "confidence", "reviewer_label", "notes"};
  for (const auto& r : rows) {
    table.rows.push_back({r.mention_id, r.masked_text, std::string(to_string(r.label)),
                          format_fixed(r.confidence, 4), "", ""});
  }
  std::ostringstream out;
  write_tsv(out, table);
  return out.str();
}

std::vector<AnnotatedMention> join_labels(std::span<const Mention> mentions,
                                          std::span<const LabeledMention> labeled) {
  std::unordered_map<std::string_view, const LabeledMention*> by_id;
  for (const auto& lm : labeled) {
    if (!by_id.emplace(lm.mention_id, &lm).second) {
      throw DuplicatePrediction("second label for '" + lm.mention_id + "'");
    }
  }
  std::unordered_set<std::string_view> known;
  std::vector<AnnotatedMention> out;
  for (const auto& m : mentions) {
    known.insert(m.mention_id);
    if (auto it = by_id.find(m.mention_id); it != by_id.end()) {
      out.push_back({m, it->second->label, it->second->confidence});
    }
  }
  for (const auto& lm : labeled) {
    if (!known.count(lm.mention_id)) throw UnknownMentionId("label for unknown mention '" + lm.mention_id + "'");
  }
  return out;
}

}  // namespace medsent
