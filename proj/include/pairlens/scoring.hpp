#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairlens/categories.hpp"
#include "pairlens/gateway.hpp"

namespace pairlens {

enum class JudgeOrder { ab, ba };

struct OrderedScores {
  std::string pair_id;
  JudgeOrder order = JudgeOrder::ab;
  ScoreArray scores{};  // schema index order, values in [-3, 3]
};

// Per-pair symmetric scores. epsilon[j] = (ab[j] - ba[j]) / 2: the swapped
// order's sign is flipped and the two readings averaged, cancelling
// positional bias. Values land on the half-integer grid.
struct ScoreSheet {
  std::string pair_id;
  ScoreArray order_ab{};
  ScoreArray order_ba{};
  EpsilonArray epsilon{};
  std::array<bool, kNumCategories> consistent{};  // ba[j] == -ab[j]
  bool all_zero = true;
};

// Raised when the judge's tool call cannot be turned into a full score
// vector even after the single retry; the pair is flagged, never dropped
// silently.
struct ScoringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The judge function schema: one required integer field per category with
// enum {-3..3}, plus the comparison/tie-avoidance instructions.
ToolSchema judge_tool_schema(const CategorySchema& schema);

// Builds the pairwise comparison request with both texts embedded and the
// tool schema attached. Texts must be nonempty; the schema must validate.
ChatRequest build_judge_request(const CategorySchema& schema, const std::string& text_a,
                                const std::string& text_b);

// Validates and extracts the 19 scores from a judge tool call.
ScoreArray parse_judge_arguments(const CategorySchema& schema, const Json& tool_arguments);

ScoreSheet combine_orders(const std::string& pair_id, const ScoreArray& order_ab,
                          const ScoreArray& order_ba);

// Scores one response pair in both input orders (text_1 as A first, then
// text_2 as A) and derives the symmetric sheet. A malformed tool call gets
// one retry with identical input at temperature 0; a second failure raises
// ScoringError.
ScoreSheet score_pair(const BackendConfig& judge, const CategorySchema& schema,
                      const std::string& pair_id, const std::string& text_1,
                      const std::string& text_2);

// Fraction of (pair, category) cells whose swapped-order score is the exact
// negation of the original.
double positional_consistency(std::span<const ScoreSheet> sheets);

// Share of sheets whose symmetric scores are zero in every category.
double zero_difference_share(std::span<const ScoreSheet> sheets);

std::vector<EpsilonArray> epsilons_of(std::span<const ScoreSheet> sheets);

Json to_json(const ScoreSheet& sheet);
ScoreSheet score_sheet_from_json(const Json& j);

}  // namespace pairlens
