// medsent: command-line driver for the mention/sentiment pipeline.
//
// Every subcommand reads and writes the file formats documented in
// docs/formats.md. Errors are reported as a single line
//   error: <Kind>: <message>
// on stderr with a nonzero exit status.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medsent/context.hpp"
#include "medsent/corpus.hpp"
#include "medsent/error.hpp"
#include "medsent/lexicon.hpp"
#include "medsent/matcher.hpp"
#include "medsent/report.hpp"
#include "medsent/sentiment.hpp"
#include "medsent/stats.hpp"
#include "medsent/tsv.hpp"

#ifndef MEDSENT_DATA_DIR
#define MEDSENT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace medsent;

namespace {

const std::string kDataDir = MEDSENT_DATA_DIR;

// Writes to the named file, or stdout for "-".
void emit(const std::string& path, std::string_view content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  write_text_file(path, content);
}

std::int64_t parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3 || m < 1 || m > 12 || d < 1 || d > 31) {
    throw InvalidArgument("expected a YYYY-MM-DD date, got '" + text + "'");
  }
  return utc_seconds(y, m, d);
}

Lexicon load_lexicon(const std::string& lexicon_path, const std::string& taxonomy_path) {
  return Lexicon::compile(read_text_file(lexicon_path), ClassTaxonomy::parse(read_text_file(taxonomy_path)));
}

std::vector<Post> load_posts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  auto corpus = ingest(in, IngestOptions{std::numeric_limits<std::int64_t>::min(),
                                         std::numeric_limits<std::int64_t>::max()});
  if (!corpus.report.issues.empty()) {
    const auto& issue = corpus.report.issues.front();
    throw ParseError(path + ":" + std::to_string(issue.line) + ": " + issue.kind + ": " + issue.reason +
                     " (run 'ingest' to clean the file)");
  }
  return std::move(corpus.posts);
}

std::vector<LabeledMention> load_labels(const std::string& path, std::span<const Mention> mentions) {
  return ingest_predictions(read_text_file(path), mentions).labeled;
}

// Reads a predictions-format file into id -> label, keeping file order.
std::vector<std::pair<std::string, SentimentLabel>> read_label_file(const std::string& path) {
  std::vector<std::pair<std::string, SentimentLabel>> out;
  std::set<std::string> seen;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what());
    }
    if (!record.contains("mention_id") || !record["mention_id"].is_string()) {
      throw ParseError(where + "missing mention_id");
    }
    if (!record.contains("label") || !record["label"].is_string()) throw InvalidLabel(where + "missing label");
    auto id = record["mention_id"].get<std::string>();
    if (!seen.insert(id).second) throw DuplicatePrediction(where + "second label for '" + id + "'");
    out.emplace_back(std::move(id), parse_label(record["label"].get<std::string>()));
  }
  return out;
}

std::string lines_of(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += s + "\n";
  return out;
}

std::string default_path(const char* relative) { return (fs::path(kDataDir) / relative).string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Medication mention normalization, aspect sentiment bookkeeping, and statistics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // ingest ------------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a raw posts file and write the clean corpus");
  std::string ingest_in, ingest_out = "-", ingest_report;
  std::string ingest_earliest = "2010-01-01", ingest_end = "2025-07-31";
  ingest_cmd->add_option("--input", ingest_in, "Raw posts, one JSON object per line")->required();
  ingest_cmd->add_option("--output", ingest_out, "Clean posts file ('-' for stdout)")->capture_default_str();
  ingest_cmd->add_option("--report", ingest_report, "Ingest report (JSON) destination");
  ingest_cmd->add_option("--earliest", ingest_earliest, "Earliest accepted post date (UTC)")->capture_default_str();
  ingest_cmd->add_option("--collection-end", ingest_end, "Last day of data collection (UTC, inclusive)")
      ->capture_default_str();

  // filter ------------------------------------------------------------------
  auto* filter_cmd = app.add_subcommand("filter", "Keep posts matching the TRD keyword list");
  std::string filter_in, filter_out = "-", filter_matches;
  std::string filter_keywords = default_path("keywords/trd_keywords.tsv");
  filter_cmd->add_option("--input", filter_in, "Clean posts file")->required();
  filter_cmd->add_option("--keywords", filter_keywords, "Keyword file (category<TAB>phrase)")->capture_default_str();
  filter_cmd->add_option("--output", filter_out, "Retained posts file")->capture_default_str();
  filter_cmd->add_option("--matches", filter_matches, "Per-post matched keywords (TSV)");

  // match -------------------------------------------------------------------
  auto* match_cmd = app.add_subcommand("match", "Detect and normalize medication mentions");
  std::string match_posts, match_out = "-";
  std::string lexicon_path = default_path("lexicon/reference_lexicon.jsonl");
  std::string taxonomy_path = default_path("lexicon/taxonomy.json");
  match_cmd->add_option("--posts", match_posts, "Posts file")->required();
  match_cmd->add_option("--lexicon", lexicon_path, "Lexicon file")->capture_default_str();
  match_cmd->add_option("--taxonomy", taxonomy_path, "Class taxonomy file")->capture_default_str();
  match_cmd->add_option("--output", match_out, "Mentions table (TSV)")->capture_default_str();

  // window ------------------------------------------------------------------
  auto* window_cmd = app.add_subcommand("window", "Build masked classifier windows for each mention");
  std::string window_posts, window_mentions, window_out = "-";
  std::size_t window_chars = 1000;
  window_cmd->add_option("--posts", window_posts, "Posts file")->required();
  window_cmd->add_option("--mentions", window_mentions, "Mentions table")->required();
  window_cmd->add_option("--max-chars", window_chars, "Source characters per window")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  window_cmd->add_option("--output", window_out, "Windows file")->capture_default_str();

  // classify-rule -----------------------------------------------------------
  auto* rule_cmd = app.add_subcommand("classify-rule", "Label windows with the cue-count reference classifier");
  std::string rule_windows, rule_out = "-";
  std::string rule_pos = default_path("cues/positive.txt");
  std::string rule_neg = default_path("cues/negative.txt");
  rule_cmd->add_option("--windows", rule_windows, "Windows file")->required();
  rule_cmd->add_option("--positive", rule_pos, "Positive cue list")->capture_default_str();
  rule_cmd->add_option("--negative", rule_neg, "Negative cue list")->capture_default_str();
  rule_cmd->add_option("--output", rule_out, "Predictions file")->capture_default_str();

  // ingest-predictions ------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("ingest-predictions", "Validate classifier output against the mention set");
  std::string pred_in, pred_mentions, pred_out = "-", pred_report;
  pred_cmd->add_option("--predictions", pred_in, "Predictions file")->required();
  pred_cmd->add_option("--mentions", pred_mentions, "Mentions table")->required();
  pred_cmd->add_option("--output", pred_out, "Validated predictions, in mention order")->capture_default_str();
  pred_cmd->add_option("--report", pred_report, "Completeness report (JSON)");

  // evaluate ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold labels");
  std::string eval_gold, eval_pred, eval_out = "-";
  std::size_t eval_resamples = 1000;
  double eval_level = 0.95;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("--gold", eval_gold, "Gold labels (predictions format)")->required();
  eval_cmd->add_option("--predicted", eval_pred, "Predicted labels")->required();
  eval_cmd->add_option("--resamples", eval_resamples, "Bootstrap resamples")->capture_default_str();
  eval_cmd->add_option("--ci-level", eval_level, "Confidence level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--seed", eval_seed, "Bootstrap seed")->capture_default_str();
  eval_cmd->add_option("--output", eval_out, "Evaluation report (JSON)")->capture_default_str();

  // stats -------------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Run the asymmetry battery (and class contingency analysis)");
  std::string stats_counts, stats_mentions, stats_preds, stats_out = "-", stats_contingency;
  std::string stats_taxonomy = taxonomy_path;
  auto* counts_opt = stats_cmd->add_option("--counts", stats_counts, "TSV with medication, positive, negative columns");
  auto* mentions_opt = stats_cmd->add_option("--mentions", stats_mentions, "Mentions table");
  stats_cmd->add_option("--predictions", stats_preds, "Predictions file (with --mentions)")->needs(mentions_opt);
  stats_cmd->add_option("--taxonomy", stats_taxonomy, "Class taxonomy (with --mentions)")->capture_default_str();
  stats_cmd->add_option("--output", stats_out, "Battery table")->capture_default_str();
  stats_cmd->add_option("--contingency", stats_contingency, "Class contingency report (JSON, with --mentions)");
  counts_opt->excludes(mentions_opt);

  // report ------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Assemble the full report bundle");
  std::string report_posts, report_mentions, report_preds, report_dir;
  std::string report_lexicon = lexicon_path, report_taxonomy = taxonomy_path;
  std::string report_end = "2025-07-31";
  report_cmd->add_option("--posts", report_posts, "Posts file")->required();
  report_cmd->add_option("--mentions", report_mentions, "Mentions table")->required();
  report_cmd->add_option("--predictions", report_preds, "Predictions file (omit for an unlabeled report)");
  report_cmd->add_option("--lexicon", report_lexicon, "Lexicon file (configured entity count)")->capture_default_str();
  report_cmd->add_option("--taxonomy", report_taxonomy, "Class taxonomy file")->capture_default_str();
  report_cmd->add_option("--collection-end", report_end, "Last day of data collection (UTC)")->capture_default_str();
  report_cmd->add_option("--out-dir", report_dir, "Bundle directory")->required();

  // sample-review -----------------------------------------------------------
  auto* review_cmd = app.add_subcommand("sample-review", "Draw a seeded spot-check sample of predictions");
  std::string review_preds, review_windows, review_out = "-";
  std::size_t review_n = 0;
  std::uint64_t review_seed = 0;
  review_cmd->add_option("--predictions", review_preds, "Predictions file")->required();
  review_cmd->add_option("--windows", review_windows, "Windows file (masked text for reviewers)");
  review_cmd->add_option("-n,--n", review_n, "Sample size")->required();
  review_cmd->add_option("--seed", review_seed, "Sampling seed")->capture_default_str();
  review_cmd->add_option("--output", review_out, "Review sheet (TSV)")->capture_default_str();

  // lexicon-compile ---------------------------------------------------------
  auto* lexc_cmd = app.add_subcommand("lexicon-compile", "Validate and normalize a lexicon file");
  std::string lexc_lexicon = lexicon_path, lexc_taxonomy = taxonomy_path, lexc_out, lexc_stats = "-";
  lexc_cmd->add_option("--lexicon", lexc_lexicon, "Lexicon file")->capture_default_str();
  lexc_cmd->add_option("--taxonomy", lexc_taxonomy, "Class taxonomy file")->capture_default_str();
  lexc_cmd->add_option("--output", lexc_out, "Normalized lexicon destination");
  lexc_cmd->add_option("--stats", lexc_stats, "Lexicon statistics (JSON)")->capture_default_str();

  // lexicon-variants --------------------------------------------------------
  auto* lexv_cmd = app.add_subcommand("lexicon-variants", "Propose misspelling variants and merge reviewed ones");
  std::string lexv_lexicon = lexicon_path, lexv_taxonomy = taxonomy_path, lexv_posts, lexv_entity;
  std::string lexv_decisions, lexv_audit, lexv_out = "-", lexv_timestamp = "1970-01-01T00:00:00Z";
  int lexv_distance = 2;
  lexv_cmd->add_option("--lexicon", lexv_lexicon, "Lexicon file")->capture_default_str();
  lexv_cmd->add_option("--taxonomy", lexv_taxonomy, "Class taxonomy file")->capture_default_str();
  lexv_cmd->add_option("--posts", lexv_posts, "Posts file supplying the corpus vocabulary")->required();
  lexv_cmd->add_option("--entity", lexv_entity, "Generic name to expand")->required();
  lexv_cmd->add_option("--max-distance", lexv_distance, "Edit-distance budget")->capture_default_str();
  lexv_cmd->add_option("--decisions", lexv_decisions, "Review decisions (candidate<TAB>accept|reject)");
  lexv_cmd->add_option("--audit", lexv_audit, "Audit log to append to (with --decisions)");
  lexv_cmd->add_option("--timestamp", lexv_timestamp, "Timestamp written to the audit log")->capture_default_str();
  lexv_cmd->add_option("--output", lexv_out, "Candidates, or the merged lexicon with --decisions")
      ->capture_default_str();

  // prompts -----------------------------------------------------------------
  auto* prompt_cmd = app.add_subcommand("prompts", "Render generation prompts for the external model bridge");
  std::string prompt_kind, prompt_entity, prompt_examples, prompt_instances, prompt_out = "-";
  prompt_cmd->add_option("--kind", prompt_kind, "variant | augmentation")
      ->required()
      ->check(CLI::IsMember({"variant", "augmentation"}));
  prompt_cmd->add_option("--entity", prompt_entity, "Generic name (variant prompts)");
  prompt_cmd->add_option("--examples", prompt_examples, "Usage examples, one per line (variant prompts)");
  prompt_cmd->add_option("--instances", prompt_instances,
                         "Instances JSONL {id, text, start, end, label} (augmentation prompts)");
  prompt_cmd->add_option("--output", prompt_out, "Prompts JSONL")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest_cmd) {
      std::ifstream in(ingest_in, std::ios::binary);
      if (!in) throw IoError("cannot open '" + ingest_in + "' for reading");
      IngestOptions options;
      options.earliest_utc = parse_date(ingest_earliest);
      options.collection_end_utc = parse_date(ingest_end) + 86399;
      const auto corpus = ingest(in, options);
      emit(ingest_out, serialize_posts(corpus.posts));
      if (!ingest_report.empty()) write_text_file(ingest_report, corpus.report.to_json());
    } else if (*filter_cmd) {
      const auto posts = load_posts(filter_in);
      const auto keywords = KeywordLexicon::parse(read_text_file(filter_keywords));
      const auto result = filter_trd(posts, keywords);
      emit(filter_out, serialize_posts(result.retained));
      if (!filter_matches.empty()) {
        Table table;
        table.columns = {"post_id", "keywords"};
        for (std::size_t i = 0; i < result.retained.size(); ++i) {
          std::string joined;
          for (const auto& k : result.matched_keywords[i]) joined += (joined.empty() ? "" : "|") + k;
          table.rows.push_back({result.retained[i].id, joined});
        }
        std::ostringstream out;
        write_tsv(out, table);
        write_text_file(filter_matches, out.str());
      }
    } else if (*match_cmd) {
      const auto lexicon = load_lexicon(lexicon_path, taxonomy_path);
      const auto posts = load_posts(match_posts);
      emit(match_out, write_mentions(match_corpus(posts, lexicon)));
    } else if (*window_cmd) {
      const auto posts = load_posts(window_posts);
      const auto mentions = read_mentions(read_text_file(window_mentions));
      std::map<std::string_view, const Post*> by_id;
      for (const auto& p : posts) by_id.emplace(p.id, &p);
      std::vector<ContextWindow> windows;
      for (const auto& m : mentions) {
        auto it = by_id.find(m.post_id);
        if (it == by_id.end()) throw DanglingMention("mention '" + m.mention_id + "' references unknown post");
        windows.push_back(extract_window(*it->second, m, window_chars));
      }
      emit(window_out, write_windows(windows));
    } else if (*rule_cmd) {
      const auto cues = CueLexicon::parse(read_text_file(rule_pos), read_text_file(rule_neg));
      std::vector<LabeledMention> labeled;
      for (const auto& w : read_windows(read_text_file(rule_windows))) labeled.push_back(rule_classify(w, cues));
      emit(rule_out, write_predictions(labeled));
    } else if (*pred_cmd) {
      const auto mentions = read_mentions(read_text_file(pred_mentions));
      const auto result = ingest_predictions(read_text_file(pred_in), mentions);
      emit(pred_out, write_predictions(result.labeled));
      if (!pred_report.empty()) write_text_file(pred_report, completeness_report(result));
    } else if (*eval_cmd) {
      const auto gold = read_label_file(eval_gold);
      const auto predicted = read_label_file(eval_pred);
      std::map<std::string, SentimentLabel> pred_by_id(predicted.begin(), predicted.end());
      if (pred_by_id.size() != gold.size()) {
        throw LengthMismatch("gold has " + std::to_string(gold.size()) + " labels, predictions have " +
                             std::to_string(pred_by_id.size()));
      }
      std::vector<SentimentLabel> g, p;
      for (const auto& [id, label] : gold) {
        auto it = pred_by_id.find(id);
        if (it == pred_by_id.end()) throw UnknownMentionId("no prediction for gold item '" + id + "'");
        g.push_back(label);
        p.push_back(it->second);
      }
      emit(eval_out, eval_report_json(evaluate(g, p, eval_resamples, eval_level, eval_seed)));
    } else if (*stats_cmd) {
      if (!stats_counts.empty()) {
        std::istringstream in(read_text_file(stats_counts));
        const Table table = read_tsv(in, stats_counts);
        const auto name_col = table.column("medication");
        const auto pos_col = table.column("positive");
        const auto neg_col = table.column("negative");
        std::vector<EntityLabelCounts> entities;
        for (const auto& row : table.rows) {
          EntityLabelCounts e;
          e.entity = row[name_col];
          try {
            e.counts.positive = std::stoull(row[pos_col]);
            e.counts.negative = std::stoull(row[neg_col]);
          } catch (const std::exception&) {
            throw ParseError(stats_counts + ": bad count for '" + e.entity + "'");
          }
          entities.push_back(std::move(e));
        }
        emit(stats_out, render_battery(run_asymmetry_battery(std::span<const EntityLabelCounts>(entities))));
      } else if (!stats_mentions.empty()) {
        if (stats_preds.empty()) throw InvalidArgument("--mentions needs --predictions");
        const auto mentions = read_mentions(read_text_file(stats_mentions));
        const auto labels = load_labels(stats_preds, mentions);
        const auto annotated = join_labels(mentions, labels);
        emit(stats_out, render_battery(run_asymmetry_battery(annotated)));
        if (!stats_contingency.empty()) {
          const auto taxonomy = ClassTaxonomy::parse(read_text_file(stats_taxonomy));
          const auto table = class_label_table(annotated, taxonomy);
          const auto result = chi_square(table.table);
          nlohmann::ordered_json doc;
          doc["classes"] = table.classes;
          doc["table"] = result.table;
          doc["chi2"] = result.chi2;
          doc["df"] = result.df;
          doc["p"] = result.p;
          doc["n"] = result.n;
          doc["cramers_v"] = result.cramers_v;
          doc["residuals"] = result.residuals;
          write_text_file(stats_contingency, doc.dump(2) + "\n");
        }
      } else {
        throw InvalidArgument("stats needs --counts or --mentions with --predictions");
      }
    } else if (*report_cmd) {
      const auto posts = load_posts(report_posts);
      const auto mentions = read_mentions(read_text_file(report_mentions));
      const auto lexicon = load_lexicon(report_lexicon, report_taxonomy);
      std::vector<LabeledMention> labels;
      if (!report_preds.empty()) labels = load_labels(report_preds, mentions);
      ReportInputs inputs;
      inputs.posts = posts;
      inputs.mentions = mentions;
      inputs.labels = labels;
      inputs.taxonomy = &lexicon.taxonomy();
      inputs.collection_end_utc = parse_date(report_end) + 86399;
      inputs.configured_entities = lexicon.taxonomy().assignments().size();
      write_bundle(build_report(inputs), report_dir);
    } else if (*review_cmd) {
      const auto text = read_text_file(review_preds);
      // The population is whatever the predictions file holds.
      std::vector<std::string> ids;
      for (const auto& [id, label] : read_label_file(review_preds)) ids.push_back(id);
      const auto labeled = ingest_predictions(text, std::span<const std::string>(ids)).labeled;
      std::vector<ContextWindow> windows;
      if (!review_windows.empty()) windows = read_windows(read_text_file(review_windows));
      emit(review_out, write_review_sheet(sample_for_review(labeled, windows, review_n, review_seed)));
    } else if (*lexc_cmd) {
      const auto lexicon = load_lexicon(lexc_lexicon, lexc_taxonomy);
      if (!lexc_out.empty()) write_text_file(lexc_out, lexicon.serialize());
      const auto s = lexicon.stats();
      nlohmann::ordered_json doc;
      doc["entity_count"] = s.entity_count;
      doc["variant_count"] = s.variant_count;
      doc["median_variants"] = s.median_variants;
      doc["min_variants"] = s.min_variants;
      doc["max_variants"] = s.max_variants;
      doc["taxonomy_classes"] = lexicon.taxonomy().size();
      doc["taxonomy_assignments"] = lexicon.taxonomy().assignments().size();
      emit(lexc_stats, doc.dump(2) + "\n");
    } else if (*lexv_cmd) {
      const auto lexicon = load_lexicon(lexv_lexicon, lexv_taxonomy);
      if (!lexicon.find_entity(lexv_entity)) throw UnknownEntity("no entity '" + lexv_entity + "'");
      const auto posts = load_posts(lexv_posts);
      auto candidates = generate_misspelling_variants(lexv_entity, corpus_vocabulary(posts), lexv_distance);
      // Surfaces the lexicon already knows are not new candidates.
      std::erase_if(candidates, [&](const std::string& c) { return lexicon.normalize(c) != nullptr; });
      if (lexv_decisions.empty()) {
        emit(lexv_out, lines_of(candidates));
      } else {
        const auto decisions = parse_review_decisions(read_text_file(lexv_decisions));
        const auto merged = merge_candidates(lexicon, lexv_entity, candidates, decisions, lexv_timestamp);
        emit(lexv_out, merged.lexicon.serialize());
        if (!lexv_audit.empty()) {
          std::ofstream audit(lexv_audit, std::ios::app | std::ios::binary);
          if (!audit) throw IoError("cannot open '" + lexv_audit + "' for appending");
          for (const auto& entry : merged.audit) audit << format_audit_entry(entry) << '\n';
        }
      }
    } else if (*prompt_cmd) {
      std::string out;
      if (prompt_kind == "variant") {
        if (prompt_entity.empty()) throw InvalidArgument("variant prompts need --entity");
        std::vector<std::string> examples;
        if (!prompt_examples.empty()) examples = config_lines(read_text_file(prompt_examples));
        const auto prompt = build_variant_prompt(prompt_entity, examples);
        nlohmann::ordered_json record;
        record["entity"] = prompt_entity;
        record["prompt"] = prompt.text;
        record["decoding"] = {{"temperature", prompt.decoding.temperature},
                              {"top_p", prompt.decoding.top_p},
                              {"max_new_tokens", prompt.decoding.max_new_tokens}};
        out = record.dump() + "\n";
      } else {
        if (prompt_instances.empty()) throw InvalidArgument("augmentation prompts need --instances");
        std::istringstream in(read_text_file(prompt_instances));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
          ++line_no;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          nlohmann::json rec;
          AugmentationInstance instance;
          std::string id;
          try {
            rec = nlohmann::json::parse(line);
            id = rec.at("id").get<std::string>();
            instance.text = rec.at("text").get<std::string>();
            instance.target = {rec.at("start").get<std::size_t>(), rec.at("end").get<std::size_t>()};
            instance.label = parse_label(rec.at("label").get<std::string>());
          } catch (const nlohmann::json::exception& e) {
            throw ParseError(prompt_instances + ":" + std::to_string(line_no) + ": " + e.what());
          }
          nlohmann::ordered_json record;
          record["id"] = id;
          record["label"] = to_string(instance.label);
          record["variants_requested"] = kSyntheticPerInstance;
          record["prompt"] = build_augmentation_prompt(instance);
          out += record.dump() + "\n";
        }
      }
      emit(prompt_out, out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
