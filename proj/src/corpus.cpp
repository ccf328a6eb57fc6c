#include "pairlens/corpus.hpp"

#include <stdexcept>
#include <unordered_set>

namespace pairlens {

std::string to_string(TreatmentKind k) {
  switch (k) {
    case TreatmentKind::gender: return "gender";
    case TreatmentKind::intent: return "intent";
    case TreatmentKind::language: return "language";
  }
  return "?";
}

std::string to_string(InsertionMode m) {
  switch (m) {
    case InsertionMode::inline_token: return "inline_token";
    case InsertionMode::audience_suffix: return "audience_suffix";
    case InsertionMode::reason_suffix: return "reason_suffix";
    case InsertionMode::language_directive: return "language_directive";
  }
  return "?";
}

std::string to_string(Domain d) {
  return d == Domain::message ? "message" : "argument";
}

TreatmentKind treatment_kind_from_string(const std::string& s) {
  if (s == "gender") return TreatmentKind::gender;
  if (s == "intent") return TreatmentKind::intent;
  if (s == "language") return TreatmentKind::language;
  throw std::runtime_error("unknown treatment kind: " + s);
}

InsertionMode insertion_mode_from_string(const std::string& s) {
  if (s == "inline_token") return InsertionMode::inline_token;
  if (s == "audience_suffix") return InsertionMode::audience_suffix;
  if (s == "reason_suffix") return InsertionMode::reason_suffix;
  if (s == "language_directive") return InsertionMode::language_directive;
  throw std::runtime_error("unknown insertion mode: " + s);
}

Domain domain_from_string(const std::string& s) {
  if (s == "message") return Domain::message;
  if (s == "argument") return Domain::argument;
  throw std::runtime_error("unknown domain: " + s);
}

void TreatmentSpec::validate() const {
  if (arm1_label == arm2_label)
    throw std::runtime_error("treatment arms must carry distinct labels");
  if (arm1_label.empty() || arm2_label.empty())
    throw std::runtime_error("treatment arm labels must be nonempty");
  bool compatible = false;
  switch (kind) {
    case TreatmentKind::gender:
      compatible = insertion_mode == InsertionMode::inline_token ||
                   insertion_mode == InsertionMode::audience_suffix;
      break;
    case TreatmentKind::intent:
      compatible = insertion_mode == InsertionMode::reason_suffix;
      break;
    case TreatmentKind::language:
      compatible = insertion_mode == InsertionMode::language_directive;
      break;
  }
  if (!compatible) {
    throw std::runtime_error("insertion mode " + to_string(insertion_mode) +
                             " is not compatible with treatment kind " + to_string(kind));
  }
}

namespace {

std::size_t count_slots(const std::string& body) {
  std::size_t count = 0;
  for (std::size_t pos = body.find(kSlotMarker); pos != std::string::npos;
       pos = body.find(kSlotMarker, pos + 1)) {
    ++count;
  }
  return count;
}

bool slot_is_final(const std::string& body) {
  const std::size_t pos = body.rfind(kSlotMarker);
  if (pos == std::string::npos) return false;
  return body.find_last_not_of(" \t") + 1 == pos + std::string(kSlotMarker).size();
}

}  // namespace

std::vector<PromptTemplate> load_corpus(const std::string& path, Domain domain) {
  std::vector<PromptTemplate> templates;
  std::unordered_set<std::string> ids;

  for_each_jsonl(path, [&](std::size_t lineno, const Json& record) {
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!record.is_object()) fail("record is not a JSON object");
    if (!record.contains("id") || !record.at("id").is_string()) fail("missing string 'id'");
    if (!record.contains("body") || !record.at("body").is_string()) fail("missing string 'body'");
    if (!record.contains("domain") || !record.at("domain").is_string())
      fail("missing string 'domain'");

    PromptTemplate t;
    t.id = record.at("id").get<std::string>();
    t.body = record.at("body").get<std::string>();
    t.domain = domain_from_string(record.at("domain").get<std::string>());
    if (t.domain != domain)
      fail("record domain '" + to_string(t.domain) + "' does not match requested '" +
           to_string(domain) + "'");
    if (!ids.insert(t.id).second) fail("duplicate template id '" + t.id + "'");
    if (count_slots(t.body) != 1)
      fail("body must contain exactly one " + std::string(kSlotMarker) + " marker");

    if (record.contains("topic")) t.topic = record.at("topic").get<std::string>();
    if (record.contains("recipient")) t.recipient = record.at("recipient").get<std::string>();
    if (t.domain == Domain::argument && t.recipient)
      fail("argument templates never carry a recipient");
    const bool has_noble = record.contains("reason_noble");
    const bool has_ignoble = record.contains("reason_ignoble");
    if (has_noble != has_ignoble) fail("reason_noble and reason_ignoble must come together");
    if (has_noble)
      t.reason_pair = {record.at("reason_noble").get<std::string>(),
                       record.at("reason_ignoble").get<std::string>()};
    if (record.contains("source")) t.source = record.at("source").get<std::string>();
    templates.push_back(std::move(t));
  });
  return templates;
}

PromptPair instantiate_pair(const PromptTemplate& tmpl, const TreatmentSpec& treatment) {
  treatment.validate();
  const std::size_t slot = tmpl.body.find(kSlotMarker);
  if (slot == std::string::npos)
    throw std::runtime_error("template " + tmpl.id + ": slot marker missing");
  if (count_slots(tmpl.body) != 1)
    throw std::runtime_error("template " + tmpl.id + ": body must contain exactly one slot");

  std::string arm1_insert, arm2_insert;
  switch (treatment.insertion_mode) {
    case InsertionMode::inline_token:
      arm1_insert = treatment.arm1_label;
      arm2_insert = treatment.arm2_label;
      break;
    case InsertionMode::audience_suffix:
      if (!slot_is_final(tmpl.body))
        throw std::runtime_error("template " + tmpl.id +
                                 ": audience_suffix needs the slot at the end of the body");
      arm1_insert = ", targeting a " + treatment.arm1_label + " audience.";
      arm2_insert = ", targeting a " + treatment.arm2_label + " audience.";
      break;
    case InsertionMode::reason_suffix:
      if (!slot_is_final(tmpl.body))
        throw std::runtime_error("template " + tmpl.id +
                                 ": reason_suffix needs the slot at the end of the body");
      if (!tmpl.reason_pair)
        throw std::runtime_error("template " + tmpl.id +
                                 ": reason_suffix requested but reason pair absent");
      arm1_insert = ", because " + tmpl.reason_pair->first + ".";
      arm2_insert = ", pretending that " + tmpl.reason_pair->second + ".";
      break;
    case InsertionMode::language_directive:
      if (!slot_is_final(tmpl.body))
        throw std::runtime_error("template " + tmpl.id +
                                 ": language_directive needs the slot at the end of the body");
      arm1_insert = ". Respond in " + treatment.arm1_label + ".";
      arm2_insert = ". Respond in " + treatment.arm2_label + ".";
      break;
  }

  const std::string prefix = tmpl.body.substr(0, slot);
  const std::string suffix = tmpl.body.substr(slot + std::string(kSlotMarker).size());

  PromptPair pair;
  pair.template_id = tmpl.id;
  pair.treatment = treatment;
  pair.arm1_prompt = prefix + arm1_insert + suffix;
  pair.arm2_prompt = prefix + arm2_insert + suffix;
  pair.slot_offset = slot;
  pair.arm1_insert_len = arm1_insert.size();
  pair.arm2_insert_len = arm2_insert.size();
  return pair;
}

std::map<std::string, int> tally_annotations(std::span<const PromptTemplate> templates,
                                             AnnotationField field) {
  std::map<std::string, int> counts;
  for (const PromptTemplate& t : templates) {
    const std::optional<std::string>& label =
        field == AnnotationField::topic ? t.topic : t.recipient;
    if (label) ++counts[*label];
  }
  if (counts.empty())
    throw std::runtime_error(std::string("tally_annotations: field '") +
                             (field == AnnotationField::topic ? "topic" : "recipient") +
                             "' absent from every template");
  return counts;
}

Json to_json(const TreatmentSpec& t) {
  return Json{{"kind", to_string(t.kind)},
              {"arm1_label", t.arm1_label},
              {"arm2_label", t.arm2_label},
              {"insertion_mode", to_string(t.insertion_mode)}};
}

TreatmentSpec treatment_spec_from_json(const Json& j) {
  TreatmentSpec t;
  t.kind = treatment_kind_from_string(j.at("kind").get<std::string>());
  t.arm1_label = j.at("arm1_label").get<std::string>();
  t.arm2_label = j.at("arm2_label").get<std::string>();
  t.insertion_mode = insertion_mode_from_string(j.at("insertion_mode").get<std::string>());
  t.validate();
  return t;
}

Json to_json(const PromptPair& p) {
  return Json{{"template_id", p.template_id},
              {"arm1_prompt", p.arm1_prompt},
              {"arm2_prompt", p.arm2_prompt},
              {"treatment", to_json(p.treatment)},
              {"slot_offset", p.slot_offset},
              {"arm1_insert_len", p.arm1_insert_len},
              {"arm2_insert_len", p.arm2_insert_len}};
}

PromptPair prompt_pair_from_json(const Json& j) {
  PromptPair p;
  p.template_id = j.at("template_id").get<std::string>();
  p.arm1_prompt = j.at("arm1_prompt").get<std::string>();
  p.arm2_prompt = j.at("arm2_prompt").get<std::string>();
  p.treatment = treatment_spec_from_json(j.at("treatment"));
  p.slot_offset = j.at("slot_offset").get<std::size_t>();
  p.arm1_insert_len = j.at("arm1_insert_len").get<std::size_t>();
  p.arm2_insert_len = j.at("arm2_insert_len").get<std::size_t>();
  return p;
}

}  // namespace pairlens
