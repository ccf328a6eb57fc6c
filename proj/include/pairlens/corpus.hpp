#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pairlens/jsonl.hpp"

namespace pairlens {

enum class TreatmentKind { gender, intent, language };
enum class InsertionMode { inline_token, audience_suffix, reason_suffix, language_directive };
enum class Domain { message, argument };
enum class AnnotationField { topic, recipient };

std::string to_string(TreatmentKind k);
std::string to_string(InsertionMode m);
std::string to_string(Domain d);
TreatmentKind treatment_kind_from_string(const std::string& s);
InsertionMode insertion_mode_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);

// Literal slot marker in template bodies; every body carries exactly one.
inline constexpr const char* kSlotMarker = "{SLOT}";

struct TreatmentSpec {
  TreatmentKind kind = TreatmentKind::gender;
  std::string arm1_label;  // arm1 is the positive sign convention downstream
  std::string arm2_label;
  InsertionMode insertion_mode = InsertionMode::inline_token;

  // Labels must differ and the insertion mode must fit the kind:
  // gender -> inline_token | audience_suffix, intent -> reason_suffix,
  // language -> language_directive.
  void validate() const;
};

struct PromptTemplate {
  std::string id;
  Domain domain = Domain::message;
  std::string body;
  std::optional<std::string> topic;
  std::optional<std::string> recipient;
  // (noble, ignoble) reason texts for the intent treatment.
  std::optional<std::pair<std::string, std::string>> reason_pair;
  std::optional<std::string> source;  // fixture provenance
};

struct PromptPair {
  std::string template_id;
  std::string arm1_prompt;
  std::string arm2_prompt;
  TreatmentSpec treatment;
  // Both prompts share the prefix [0, slot_offset) and the suffix after their
  // respective insertions, so the character-level diff is confined to the slot.
  std::size_t slot_offset = 0;
  std::size_t arm1_insert_len = 0;
  std::size_t arm2_insert_len = 0;
};

// Loads a JSON-lines corpus. Malformed records and duplicate ids raise with
// the offending line number; every record must match the requested domain.
std::vector<PromptTemplate> load_corpus(const std::string& path, Domain domain);

// Produces both treatment arms from one template. Deterministic; the arms
// differ only at the slot. Suffix insertion modes require the slot to be the
// final content of the body, and reason_suffix requires a reason pair.
PromptPair instantiate_pair(const PromptTemplate& tmpl, const TreatmentSpec& treatment);

// Counts topic or recipient labels across templates; errors if the field is
// absent everywhere.
std::map<std::string, int> tally_annotations(std::span<const PromptTemplate> templates,
                                             AnnotationField field);

Json to_json(const TreatmentSpec& t);
TreatmentSpec treatment_spec_from_json(const Json& j);
Json to_json(const PromptPair& p);
PromptPair prompt_pair_from_json(const Json& j);

}  // namespace pairlens
