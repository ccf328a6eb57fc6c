#include "pairlens/categories.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pairlens {

std::string to_string(Dimension d) {
  switch (d) {
    case Dimension::rhetorical: return "rhetorical";
    case Dimension::cialdini: return "cialdini";
    case Dimension::orientation: return "orientation";
    case Dimension::interaction_goals: return "interaction_goals";
    case Dimension::tone: return "tone";
  }
  return "?";
}

void CategorySchema::validate() const {
  if (categories.size() != kNumCategories) {
    throw std::runtime_error("category schema must have exactly " +
                             std::to_string(kNumCategories) + " categories, got " +
                             std::to_string(categories.size()));
  }
  std::unordered_set<std::string> seen;
  for (const Category& c : categories) {
    if (c.id.empty() || c.description.empty())
      throw std::runtime_error("category id and description must be nonempty");
    if (!seen.insert(c.id).second)
      throw std::runtime_error("duplicate category id: " + c.id);
  }
}

std::size_t CategorySchema::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i].id == id) return i;
  throw std::runtime_error("unknown category id: " + id);
}

const CategorySchema& default_schema() {
  static const CategorySchema schema{{
      {"logos", Dimension::rhetorical,
       "Logical appeal (logos): reasoning, facts, evidence, practical benefits."},
      {"ethos", Dimension::rhetorical,
       "Credibility/ethical appeal (ethos): authority, expertise, trustworthiness."},
      {"pathos", Dimension::rhetorical,
       "Emotional appeal (pathos): excitement, bonding, guilt, joy, fear."},
      {"reciprocity", Dimension::cialdini,
       "Reciprocity: repaying, returning a favor."},
      {"commitment", Dimension::cialdini,
       "Commitment/consistency: sticking to prior behaviour, values, or promises."},
      {"liking", Dimension::cialdini,
       "Liking: friendliness, compliments, similarity, warmth."},
      {"authority", Dimension::cialdini,
       "Authority: appeals to experts, rules, leaders, or recognized institutions."},
      {"scarcity", Dimension::cialdini,
       "Scarcity: urgency, uniqueness, limited-time opportunities."},
      {"social_proof", Dimension::cialdini,
       "Social proof: showing that others are doing it too, peer influence."},
      {"agentic", Dimension::orientation,
       "Agentic orientation: goal-achievement and task functioning (independence, "
       "competence, self-assertion, decisiveness)"},
      {"communal", Dimension::orientation,
       "Communal orientation: maintenance of relationships and social functioning "
       "(benevolence, trustworthiness, morality)"},
      {"instrumental", Dimension::interaction_goals,
       "Instrumental goals: task-oriented goals, such as obtaining information or "
       "goods or solving a problem"},
      {"relational", Dimension::interaction_goals,
       "Relational goals: focus on relationship dynamics, such as gaining power or "
       "strengthening affiliation"},
      {"identity", Dimension::interaction_goals,
       "Identity goals: involve self-focused or other-focused identity concerns, "
       "such as saving face or maintaining pride"},
      {"direct", Dimension::tone,
       "Direct tone: straightforward, explicit, unambiguous requests or statements."},
      {"polite", Dimension::tone,
       "Polite tone: deferential, hedged, respectful, face-saving."},
      {"formal", Dimension::tone,
       "Formal tone: structured, professional, proper, serious."},
      {"playful", Dimension::tone,
       "Playful tone: humor, lightness, casual enthusiasm."},
      {"affectionate", Dimension::tone,
       "Affectionate tone: warmth, care, validation, emotional support."},
  }};
  return schema;
}

bool on_epsilon_grid(double v) {
  if (v < kScaleMin || v > kScaleMax) return false;
  double doubled = v * 2.0;
  return doubled == std::nearbyint(doubled);
}

}  // namespace pairlens
