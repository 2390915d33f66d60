#pragma once

// Shared fixtures and fuzz generators for the unit and acceptance suites.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "medsent/lexicon.hpp"
#include "medsent/sentiment.hpp"
#include "medsent/tsv.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return MEDSENT_DATA_DIR; }
inline std::string data_file(const std::string& relative) { return medsent::read_text_file(data_dir() / relative); }

inline medsent::ClassTaxonomy reference_taxonomy() {
  return medsent::ClassTaxonomy::parse(data_file("lexicon/taxonomy.json"));
}
inline medsent::Lexicon reference_lexicon() {
  return medsent::Lexicon::compile(data_file("lexicon/reference_lexicon.jsonl"), reference_taxonomy());
}

// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 gen(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("medsent-" + tag + "-" + std::to_string(gen() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with args (already shell-quoted as needed); returns the exit
// status and stores combined output.
inline int run_cli(const std::string& args, std::string* output = nullptr) {
  const auto log = std::filesystem::temp_directory_path() / ("medsent-cli-" + std::to_string(::getpid()) + ".log");
  const std::string cmd = quote(MEDSENT_CLI) + " " + args + " > " + quote(log.string()) + " 2>&1";
  const int raw = std::system(cmd.c_str());
  if (output) *output = std::filesystem::exists(log) ? medsent::read_text_file(log) : std::string{};
  std::filesystem::remove(log);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// ---------------------------------------------------------------------------
// Fuzzed lexicon: 50 entities over a small syllable alphabet so surfaces
// collide with filler words, nest inside multiword forms, and share prefixes.

struct FuzzLexicon {
  medsent::Lexicon lexicon;
  std::vector<std::vector<std::string>> surfaces;  // parallel to lexicon.entities()
  std::vector<std::string> all_surfaces;
};

inline std::string fuzz_word(std::mt19937_64& gen) {
  static const char* syllables[] = {"ke", "ta", "min", "pro", "zac", "ser", "tra", "li", "ne", "vy", "van", "se"};
  std::uniform_int_distribution<int> len(1, 3), pick(0, 11);
  std::string w;
  const int n = len(gen);
  for (int i = 0; i < n; ++i) w += syllables[pick(gen)];
  return w;
}

inline FuzzLexicon make_fuzz_lexicon(std::uint64_t seed, std::size_t entity_count = 50) {
  std::mt19937_64 gen(seed);
  std::set<std::string> taken;
  std::vector<medsent::MedicationEntity> entities;
  std::vector<medsent::TherapyClass> classes = {{"alpha", false}, {"beta", false}, {"gamma", true}};
  std::map<std::string, std::string> assignments;
  std::uniform_int_distribution<int> variants(1, 4), coin(0, 3);

  auto fresh = [&](bool allow_multi) {
    for (;;) {
      std::string s = fuzz_word(gen);
      const int shape = coin(gen);
      if (allow_multi && shape == 0) s += " " + fuzz_word(gen);
      if (allow_multi && shape == 1) s += "-" + fuzz_word(gen);
      if (allow_multi && shape == 2 && coin(gen) == 0) s += " " + fuzz_word(gen) + " " + fuzz_word(gen);
      if (taken.insert(s).second) return s;
    }
  };
  // Multiword forms sometimes reuse an existing single surface as a prefix.
  std::vector<std::string> singles;
  for (std::size_t e = 0; e < entity_count; ++e) {
    medsent::MedicationEntity entity;
    entity.generic_name = fresh(false);
    singles.push_back(entity.generic_name);
    const int v = variants(gen);
    for (int i = 0; i < v; ++i) {
      if (!singles.empty() && coin(gen) == 0) {
        std::string s = singles[gen() % singles.size()] + " " + fuzz_word(gen);
        if (taken.insert(s).second) {
          entity.variants.push_back(s);
          continue;
        }
      }
      entity.variants.push_back(fresh(true));
    }
    assignments[entity.generic_name] = classes[e % classes.size()].name;
    entities.push_back(std::move(entity));
  }
  FuzzLexicon out{medsent::Lexicon::compile(entities, medsent::ClassTaxonomy(classes, assignments)), {}, {}};
  for (const auto& entity : out.lexicon.entities()) {
    out.surfaces.push_back(entity.variants);
    for (const auto& s : entity.variants) out.all_surfaces.push_back(s);
  }
  return out;
}

inline std::string random_case(std::mt19937_64& gen, std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z' && gen() % 3 == 0) c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

// Text up to max_bytes mixing surfaces, glued surfaces, filler, punctuation,
// connectors, line breaks and non-ASCII code points.
inline std::string fuzz_post(std::mt19937_64& gen, const FuzzLexicon& lex, std::size_t max_bytes = 1000) {
  static const char* seps[] = {" ", " ", " ", "  ", "\t", "\n", ", ", ". ", "-", "'", "\xE2\x80\x99", "/", "(", ") ",
                               "\xC2\xA0", " \xF0\x9F\x98\x8A ", "!", "?\n", "_", ":"};
  static const char* fillers[] = {"i", "took", "it", "and", "caf\xC3\xA9", "x", "2mg", "na\xC3\xAFve", "\xD0\xB4\xD0\xB0"};
  std::string text;
  std::uniform_int_distribution<int> kind(0, 9);
  const std::size_t target = gen() % (max_bytes + 1);
  while (text.size() < target) {
    const int k = kind(gen);
    std::string piece;
    if (k <= 3) {
      piece = lex.all_surfaces[gen() % lex.all_surfaces.size()];
      if (gen() % 4 == 0) {
        // stretch inner spaces into runs, tabs, or line breaks
        std::string stretched;
        for (char c : piece) {
          if (c == ' ') stretched += (gen() % 5 == 0) ? "\n" : (gen() % 2 ? "  " : " \t");
          else stretched += c;
        }
        piece = stretched;
      }
    } else if (k == 4) {
      piece = lex.all_surfaces[gen() % lex.all_surfaces.size()] + fuzz_word(gen);  // glued suffix
    } else if (k == 5) {
      piece = fuzz_word(gen) + lex.all_surfaces[gen() % lex.all_surfaces.size()];  // glued prefix
    } else if (k <= 7) {
      piece = fuzz_word(gen);
    } else {
      piece = fillers[gen() % 9];
    }
    text += random_case(gen, piece);
    text += seps[gen() % 20];
  }
  // Trim to the budget without splitting a code point.
  std::size_t cut = std::min(text.size(), max_bytes);
  while (cut > 0 && cut < text.size() && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  text.resize(cut);
  return text;
}

inline std::vector<medsent::SentimentLabel> fuzz_labels(std::mt19937_64& gen, std::size_t n) {
  std::vector<medsent::SentimentLabel> out(n);
  for (auto& l : out) l = medsent::kLabels[gen() % 3];
  return out;
}

}  // namespace testsupport

namespace testsupport {

// Full CLI pipeline into dir: raw ingest through report, once with the rule
// classifier and once with the fixture predictions. Returns the first failing
// step, or an empty string.
inline std::string run_pipeline(const std::filesystem::path& dir) {
  auto p = [&](const char* name) { return quote((dir / name).string()); };
  auto fx = [](const char* name) { return quote((data_dir() / "fixtures" / name).string()); };
  const std::vector<std::pair<std::string, std::string>> steps = {
      {"ingest", "ingest --input " + fx("posts_raw.jsonl") + " --output " + p("clean.jsonl") + " --report " + p("ingest.json")},
      {"filter", "filter --input " + p("clean.jsonl") + " --output " + p("trd.jsonl") + " --matches " + p("keywords.tsv")},
      {"match", "match --posts " + p("trd.jsonl") + " --output " + p("mentions.tsv")},
      {"window", "window --posts " + p("trd.jsonl") + " --mentions " + p("mentions.tsv") + " --output " + p("windows.jsonl")},
      {"classify-rule", "classify-rule --windows " + p("windows.jsonl") + " --output " + p("rule.jsonl")},
      {"report", "report --posts " + p("trd.jsonl") + " --mentions " + p("mentions.tsv") + " --predictions " +
                     p("rule.jsonl") + " --out-dir " + p("bundle_rule")},
      {"filter-fixture", "filter --input " + fx("posts.jsonl") + " --output " + p("fx_trd.jsonl")},
      {"match-fixture", "match --posts " + p("fx_trd.jsonl") + " --output " + p("fx_mentions.tsv")},
      {"ingest-predictions", "ingest-predictions --predictions " + fx("predictions.jsonl") + " --mentions " +
                                 p("fx_mentions.tsv") + " --output " + p("fx_preds.jsonl") + " --report " +
                                 p("fx_completeness.json")},
      {"report-fixture", "report --posts " + p("fx_trd.jsonl") + " --mentions " + p("fx_mentions.tsv") +
                             " --predictions " + p("fx_preds.jsonl") + " --out-dir " + p("bundle_fixture")},
  };
  for (const auto& [name, args] : steps) {
    if (run_cli(args) != 0) return name;
  }
  return {};
}

// Relative path -> bytes for every regular file under dir.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = medsent::read_text_file(e.path());
  }
  return out;
}

}  // namespace testsupport
