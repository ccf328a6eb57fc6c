#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace pairlens {

// The five dimensions of persuasive language the judge scores.
enum class Dimension { rhetorical, cialdini, orientation, interaction_goals, tone };

std::string to_string(Dimension d);

struct Category {
  std::string id;
  Dimension dimension;
  std::string description;  // judge-facing wording for the tool schema
};

inline constexpr std::size_t kNumCategories = 19;
inline constexpr int kScaleMin = -3;
inline constexpr int kScaleMax = 3;

// Raw judge scores for one input order, schema index order.
using ScoreArray = std::array<int, kNumCategories>;
// Symmetric per-category scores; values on the half-integer grid [-3, 3].
using EpsilonArray = std::array<double, kNumCategories>;

struct CategorySchema {
  std::vector<Category> categories;

  // Throws unless there are exactly 19 categories with unique ids and
  // nonempty descriptions.
  void validate() const;

  // Index of a category id; throws if unknown.
  std::size_t index_of(const std::string& id) const;
};

// The canonical schema: rhetorical appeals (logos, ethos, pathos), the six
// Cialdini principles, agentic/communal orientation, the three interaction
// goals, and five tones.
const CategorySchema& default_schema();

bool on_epsilon_grid(double v);

}  // namespace pairlens
