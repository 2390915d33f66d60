#include "medsent/lexicon.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "medsent/error.hpp"
#include "medsent/tsv.hpp"

namespace medsent {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ClassTaxonomy

ClassTaxonomy::ClassTaxonomy(std::vector<TherapyClass> classes,
                             std::map<std::string, std::string> assignments)
    : classes_(std::move(classes)), assignments_(std::move(assignments)) {
  std::set<std::string> names;
  for (const auto& cls : classes_) {
    if (cls.name.empty()) throw ParseError("taxonomy: empty class name");
    if (!names.insert(cls.name).second) {
      throw ParseError("taxonomy: duplicate class '" + cls.name + "'");
    }
  }
  for (const auto& [generic, cls] : assignments_) {
    if (!names.count(cls)) {
      throw UnknownClass("taxonomy assigns '" + generic + "' to unconfigured class '" + cls + "'");
    }
  }
}

ClassTaxonomy ClassTaxonomy::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("taxonomy: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("classes") || !doc["classes"].is_array()) {
    throw ParseError("taxonomy: expected an object with a 'classes' array");
  }
  std::vector<TherapyClass> classes;
  for (const auto& item : doc["classes"]) {
    TherapyClass cls;
    if (item.is_string()) {
      cls.name = item.get<std::string>();
    } else if (item.is_object() && item.contains("name") && item["name"].is_string()) {
      cls.name = item["name"].get<std::string>();
      cls.provisional = item.value("provisional", false);
    } else {
      throw ParseError("taxonomy: class entries must be strings or {name, provisional}");
    }
    classes.push_back(std::move(cls));
  }
  std::map<std::string, std::string> assignments;
  if (doc.contains("assignments")) {
    if (!doc["assignments"].is_object()) throw ParseError("taxonomy: 'assignments' must be an object");
    for (const auto& [generic, cls] : doc["assignments"].items()) {
      if (!cls.is_string()) throw ParseError("taxonomy: class of '" + generic + "' is not a string");
      assignments[normalize_phrase(generic)] = cls.get<std::string>();
    }
  }
  return ClassTaxonomy(std::move(classes), std::move(assignments));
}

std::string ClassTaxonomy::serialize() const {
  ordered_json doc;
  doc["classes"] = ordered_json::array();
  for (const auto& cls : classes_) {
    doc["classes"].push_back({{"name", cls.name}, {"provisional", cls.provisional}});
  }
  doc["assignments"] = ordered_json::object();
  for (const auto& [generic, cls] : assignments_) doc["assignments"][generic] = cls;
  return doc.dump(2) + "\n";
}

std::optional<std::string> ClassTaxonomy::class_of(std::string_view generic_name) const {
  auto it = assignments_.find(std::string(generic_name));
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

bool ClassTaxonomy::has_class(std::string_view name) const {
  return std::any_of(classes_.begin(), classes_.end(),
                     [&](const TherapyClass& cls) { return cls.name == name; });
}

std::size_t ClassTaxonomy::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].name == name) return i;
  }
  throw UnknownClass("class '" + std::string(name) + "' is not configured");
}

// ---------------------------------------------------------------------------
// Lexicon

std::vector<MedicationEntity> parse_lexicon_records(std::string_view source) {
  std::vector<MedicationEntity> entities;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "lexicon line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!record.is_object()) throw ParseError(where + ": expected a JSON object");
    if (!record.contains("generic_name") || !record["generic_name"].is_string()) {
      throw ParseError(where + ": missing string field 'generic_name'");
    }
    if (!record.contains("variants") || !record["variants"].is_array()) {
      throw ParseError(where + ": missing array field 'variants'");
    }
    MedicationEntity entity;
    entity.generic_name = record["generic_name"].get<std::string>();
    if (record.contains("therapy_class")) {
      if (!record["therapy_class"].is_string()) throw ParseError(where + ": 'therapy_class' must be a string");
      entity.therapy_class = record["therapy_class"].get<std::string>();
    }
    if (record.contains("neuromodulation")) {
      if (!record["neuromodulation"].is_boolean()) throw ParseError(where + ": 'neuromodulation' must be a boolean");
      entity.is_neuromodulation = record["neuromodulation"].get<bool>();
    }
    for (const auto& variant : record["variants"]) {
      if (!variant.is_string()) throw ParseError(where + ": variants must be strings");
      entity.variants.push_back(variant.get<std::string>());
    }
    entities.push_back(std::move(entity));
  }
  return entities;
}

Lexicon Lexicon::compile(std::string_view source, ClassTaxonomy taxonomy) {
  return compile(parse_lexicon_records(source), std::move(taxonomy));
}

Lexicon Lexicon::compile(std::vector<MedicationEntity> entities, ClassTaxonomy taxonomy) {
  if (entities.empty()) throw InvalidArgument("lexicon contains no entities");

  Lexicon lexicon;
  lexicon.taxonomy_ = std::move(taxonomy);

  std::set<std::string> generics;
  for (auto& entity : entities) {
    entity.generic_name = normalize_phrase(entity.generic_name);
    if (entity.generic_name.empty()) throw ParseError("entity with empty generic_name");
    if (canonical_phrase(entity.generic_name) != entity.generic_name) {
      throw InvalidSurface("generic name '" + entity.generic_name + "' is not a clean token sequence");
    }
    if (!generics.insert(entity.generic_name).second) {
      throw DuplicateEntity("entity '" + entity.generic_name + "' appears more than once");
    }

    std::vector<std::string> cleaned;
    for (const auto& variant : entity.variants) {
      std::string surface = normalize_phrase(variant);
      if (surface.empty()) continue;
      if (canonical_phrase(surface) != surface) {
        throw InvalidSurface("variant '" + surface + "' of '" + entity.generic_name +
                             "' contains separator characters");
      }
      cleaned.push_back(std::move(surface));
    }
    if (cleaned.empty()) throw EmptyEntity(entity.generic_name);
    cleaned.push_back(entity.generic_name);
    std::sort(cleaned.begin(), cleaned.end());
    cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());
    entity.variants = std::move(cleaned);

    auto assigned = lexicon.taxonomy_.class_of(entity.generic_name);
    if (!assigned) throw MissingClass(entity.generic_name);
    if (!entity.therapy_class.empty() && entity.therapy_class != *assigned) {
      throw ClassMismatch("'" + entity.generic_name + "' is listed as '" + entity.therapy_class +
                          "' but the taxonomy assigns '" + *assigned + "'");
    }
    entity.therapy_class = *assigned;
  }

  std::sort(entities.begin(), entities.end(),
            [](const auto& a, const auto& b) { return a.generic_name < b.generic_name; });
  lexicon.entities_ = std::move(entities);

  for (std::size_t i = 0; i < lexicon.entities_.size(); ++i) {
    const auto& entity = lexicon.entities_[i];
    for (const auto& surface : entity.variants) {
      auto [it, inserted] = lexicon.surface_index_.emplace(surface, i);
      if (!inserted) {
        throw AmbiguousSurface(surface, lexicon.entities_[it->second].generic_name,
                               entity.generic_name);
      }
      lexicon.phrases_.insert(surface, i);
    }
  }
  return lexicon;
}

const MedicationEntity* Lexicon::find_entity(std::string_view generic_name) const {
  auto it = std::lower_bound(entities_.begin(), entities_.end(), generic_name,
                             [](const MedicationEntity& e, std::string_view name) {
                               return e.generic_name < name;
                             });
  if (it == entities_.end() || it->generic_name != generic_name) return nullptr;
  return &*it;
}

const MedicationEntity* Lexicon::normalize(std::string_view surface) const {
  auto it = surface_index_.find(canonical_phrase(surface));
  if (it == surface_index_.end()) return nullptr;
  return &entities_[it->second];
}

LexiconStats Lexicon::stats() const {
  LexiconStats stats;
  stats.entity_count = entities_.size();
  stats.variant_count = surface_index_.size();
  std::vector<std::size_t> sizes;
  for (const auto& entity : entities_) sizes.push_back(entity.variants.size());
  std::sort(sizes.begin(), sizes.end());
  stats.min_variants = sizes.front();
  stats.max_variants = sizes.back();
  const std::size_t mid = sizes.size() / 2;
  stats.median_variants = sizes.size() % 2
                              ? static_cast<double>(sizes[mid])
                              : (static_cast<double>(sizes[mid - 1]) + static_cast<double>(sizes[mid])) / 2.0;
  return stats;
}

std::string Lexicon::serialize() const {
  std::string out;
  for (const auto& entity : entities_) {
    ordered_json record;
    record["generic_name"] = entity.generic_name;
    record["therapy_class"] = entity.therapy_class;
    record["neuromodulation"] = entity.is_neuromodulation;
    record["variants"] = entity.variants;
    out += record.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variant generation

std::size_t bounded_edit_distance(std::string_view a, std::string_view b, std::size_t limit) {
  const std::size_t length_gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (length_gap > limit) return limit + 1;
  std::vector<std::size_t> previous(b.size() + 1);
  std::vector<std::size_t> current(b.size() + 1);
  std::iota(previous.begin(), previous.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    current[0] = i;
    std::size_t row_min = current[0];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
      row_min = std::min(row_min, current[j]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(previous, current);
  }
  return std::min(previous[b.size()], limit + 1);
}

std::vector<std::string> generate_misspelling_variants(std::string_view generic_name,
                                                       const std::set<std::string>& corpus_vocabulary,
                                                       int max_edit_distance) {
  const std::string target = normalize_phrase(generic_name);
  if (target.empty()) throw InvalidArgument("generic name must be nonempty");
  if (max_edit_distance < 1) throw InvalidArgument("max edit distance must be at least 1");
  const auto limit = static_cast<std::size_t>(max_edit_distance);

  std::vector<std::string> out;
  for (const auto& token : corpus_vocabulary) {
    if (token == target) continue;
    if (bounded_edit_distance(target, token, limit) <= limit) out.push_back(token);
  }
  return out;  // std::set iteration is already lexicographic
}

const std::string_view kVariantPromptTemplate =
    "You are helping build a lexicon of medication names as people actually write them "
    "in online health communities.\n"
    "\n"
    "Target therapy: {{therapy}}\n"
    "\n"
    "Examples of how people refer to medications in informal posts:\n"
    "{{example}}\n"
    "\n"
    "List other ways people write \"{{therapy}}\" in informal posts: brand names, "
    "abbreviations, common misspellings, and colloquial or slang names. Only include "
    "strings that refer to {{therapy}} and to no other medication.\n"
    "Output a plain list with one candidate per line and no numbering, bullets, or "
    "explanations:\n"
    "[variant]\n"
    "[variant]\n";

namespace {

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

}  // namespace

GenerationPrompt build_variant_prompt(std::string_view generic_name,
                                      const std::vector<std::string>& usage_examples) {
  if (generic_name.empty()) throw InvalidArgument("generic name must be nonempty");
  std::string examples;
  for (std::size_t i = 0; i < usage_examples.size(); ++i) {
    if (i) examples += '\n';
    examples += "- ";
    examples += usage_examples[i];
  }
  // Examples are substituted last so example text containing "{{therapy}}"
  // is never rewritten.
  std::string text = replace_all(std::string(kVariantPromptTemplate), "{{therapy}}", generic_name);
  text = replace_all(std::move(text), "{{example}}", examples);
  return {std::move(text), DecodingParameters{}};
}

// ---------------------------------------------------------------------------
// Review and merge

std::string_view to_string(ReviewDecision decision) noexcept {
  return decision == ReviewDecision::Accept ? "accept" : "reject";
}

ReviewDecision parse_review_decision(std::string_view text) {
  const std::string folded = normalize_phrase(text);
  if (folded == "accept") return ReviewDecision::Accept;
  if (folded == "reject") return ReviewDecision::Reject;
  throw ParseError("review decision must be 'accept' or 'reject', got '" + std::string(text) + "'");
}

std::map<std::string, ReviewDecision> parse_review_decisions(std::string_view text) {
  std::map<std::string, ReviewDecision> decisions;
  for (const auto& line : config_lines(text)) {
    const auto fields = split_tsv_line(line);
    if (fields.size() != 2) throw ParseError("review decisions: expected candidate<TAB>decision: '" + line + "'");
    decisions[normalize_phrase(fields[0])] = parse_review_decision(fields[1]);
  }
  return decisions;
}

std::string format_audit_entry(const AuditEntry& entry) {
  return tsv_escape(entry.timestamp) + '\t' + tsv_escape(entry.entity) + '\t' +
         tsv_escape(entry.candidate) + '\t' + std::string(to_string(entry.decision));
}

MergeResult merge_candidates(const Lexicon& lexicon, std::string_view generic_name,
                             const std::vector<std::string>& candidates,
                             const std::map<std::string, ReviewDecision>& decisions,
                             std::string_view timestamp) {
  const std::string target = normalize_phrase(generic_name);
  if (!lexicon.find_entity(target)) throw UnknownEntity("no entity named '" + target + "'");

  std::vector<MedicationEntity> entities = lexicon.entities();
  auto entity = std::find_if(entities.begin(), entities.end(),
                             [&](const MedicationEntity& e) { return e.generic_name == target; });

  std::vector<AuditEntry> audit;
  for (const auto& raw : candidates) {
    const std::string candidate = normalize_phrase(raw);
    auto decision = decisions.find(candidate);
    if (decision == decisions.end()) {
      throw MissingDecision("no review decision for candidate '" + candidate + "'");
    }
    if (decision->second == ReviewDecision::Accept) {
      if (const MedicationEntity* owner = lexicon.normalize(candidate);
          owner && owner->generic_name != target) {
        throw AmbiguousSurface(candidate, owner->generic_name, target);
      }
      entity->variants.push_back(candidate);
    }
    audit.push_back({std::string(timestamp), target, candidate, decision->second});
  }
  return {Lexicon::compile(std::move(entities), lexicon.taxonomy()), std::move(audit)};
}

}  // namespace medsent
