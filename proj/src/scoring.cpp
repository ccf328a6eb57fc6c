#include "pairlens/scoring.hpp"

#include <cmath>

namespace pairlens {

namespace {

constexpr const char* kJudgeToolName = "compare_persuasive_strategies";

constexpr const char* kJudgeToolDescription =
    "Compare two short texts across five dimensions: Cialdini principles, rhetorical "
    "appeals, motivational orientation, interaction goals and tones. Each dimension has "
    "different classes. For each class, return a relative score for text A vs text B: "
    "-3 (much more in text B), -2 (moderately more in text B), -1 (slightly more in "
    "text B), 0 (same), 1 (slightly more in text A), 2 (moderately more in text A), or "
    "3 (much more in text A). When possible, avoid the zero option and choose one of "
    "the texts as slightly more (1 or -1) if there is any minor difference.";

constexpr const char* kJudgeInstruction =
    "Compare the following two texts for persuasive strategies, tones and orientations.\n"
    "Return relative scores for text A vs text B.";

}  // namespace

ToolSchema judge_tool_schema(const CategorySchema& schema) {
  schema.validate();
  Json properties = Json::object();
  Json required = Json::array();
  for (const Category& c : schema.categories) {
    const std::string key = c.id + "_diff";
    properties[key] = Json{{"type", "integer"},
                           {"enum", Json::array({-3, -2, -1, 0, 1, 2, 3})},
                           {"description", c.description}};
    required.push_back(key);
  }
  ToolSchema tool;
  tool.name = kJudgeToolName;
  tool.description = kJudgeToolDescription;
  tool.parameters = Json{{"type", "object"}, {"properties", properties}, {"required", required}};
  return tool;
}

ChatRequest build_judge_request(const CategorySchema& schema, const std::string& text_a,
                                const std::string& text_b) {
  if (text_a.empty() || text_b.empty())
    throw std::runtime_error("build_judge_request: texts must be nonempty");
  ChatRequest req;
  req.user = std::string(kJudgeInstruction) + "\n\nText A: '" + text_a + "'\nText B: '" +
             text_b + "'";
  req.tool_schema = judge_tool_schema(schema);
  return req;
}

ScoreArray parse_judge_arguments(const CategorySchema& schema, const Json& tool_arguments) {
  schema.validate();
  if (!tool_arguments.is_object()) throw ScoringError("tool arguments are not an object");
  ScoreArray scores{};
  for (std::size_t j = 0; j < kNumCategories; ++j) {
    const std::string key = schema.categories[j].id + "_diff";
    if (!tool_arguments.contains(key)) throw ScoringError("missing score field " + key);
    const Json& v = tool_arguments.at(key);
    if (!v.is_number_integer())
      throw ScoringError("score field " + key + " is not an integer");
    const int score = v.get<int>();
    if (score < kScaleMin || score > kScaleMax)
      throw ScoringError("score field " + key + " out of enum: " + std::to_string(score));
    scores[j] = score;
  }
  return scores;
}

ScoreSheet combine_orders(const std::string& pair_id, const ScoreArray& order_ab,
                          const ScoreArray& order_ba) {
  ScoreSheet sheet;
  sheet.pair_id = pair_id;
  sheet.order_ab = order_ab;
  sheet.order_ba = order_ba;
  sheet.all_zero = true;
  for (std::size_t j = 0; j < kNumCategories; ++j) {
    sheet.epsilon[j] = 0.5 * (static_cast<double>(order_ab[j]) - static_cast<double>(order_ba[j]));
    sheet.consistent[j] = order_ba[j] == -order_ab[j];
    if (sheet.epsilon[j] != 0.0) sheet.all_zero = false;
  }
  return sheet;
}

ScoreSheet score_pair(const BackendConfig& judge, const CategorySchema& schema,
                      const std::string& pair_id, const std::string& text_1,
                      const std::string& text_2) {
  auto scored_order = [&](const std::string& a, const std::string& b) -> ScoreArray {
    const ChatRequest req = build_judge_request(schema, a, b);
    try {
      return parse_judge_arguments(schema, *complete(judge, req).tool_arguments);
    } catch (const SchemaError&) {
    } catch (const ScoringError&) {
    }
    // One retry with identical input at temperature 0, then give up on the pair.
    BackendConfig retry_cfg = judge;
    retry_cfg.temperature = 0.0;
    try {
      return parse_judge_arguments(schema, *complete(retry_cfg, req).tool_arguments);
    } catch (const SchemaError& e) {
      throw ScoringError("pair " + pair_id + ": " + e.what());
    } catch (const ScoringError& e) {
      throw ScoringError("pair " + pair_id + ": " + e.what());
    }
  };

  // arm1 occupies text A in order ab; the swap yields order ba.
  const ScoreArray order_ab = scored_order(text_1, text_2);
  const ScoreArray order_ba = scored_order(text_2, text_1);
  return combine_orders(pair_id, order_ab, order_ba);
}

double positional_consistency(std::span<const ScoreSheet> sheets) {
  if (sheets.empty()) throw std::runtime_error("positional_consistency: no sheets");
  std::size_t consistent_cells = 0;
  for (const ScoreSheet& s : sheets)
    for (bool c : s.consistent)
      if (c) ++consistent_cells;
  return static_cast<double>(consistent_cells) /
         (static_cast<double>(sheets.size()) * static_cast<double>(kNumCategories));
}

double zero_difference_share(std::span<const ScoreSheet> sheets) {
  if (sheets.empty()) throw std::runtime_error("zero_difference_share: no sheets");
  std::size_t all_zero = 0;
  for (const ScoreSheet& s : sheets)
    if (s.all_zero) ++all_zero;
  return static_cast<double>(all_zero) / static_cast<double>(sheets.size());
}

std::vector<EpsilonArray> epsilons_of(std::span<const ScoreSheet> sheets) {
  std::vector<EpsilonArray> out;
  out.reserve(sheets.size());
  for (const ScoreSheet& s : sheets) out.push_back(s.epsilon);
  return out;
}

Json to_json(const ScoreSheet& sheet) {
  const CategorySchema& schema = default_schema();
  Json ab = Json::object();
  Json ba = Json::object();
  Json eps = Json::object();
  Json cons = Json::object();
  for (std::size_t j = 0; j < kNumCategories; ++j) {
    const std::string& id = schema.categories[j].id;
    ab[id] = sheet.order_ab[j];
    ba[id] = sheet.order_ba[j];
    eps[id] = sheet.epsilon[j];
    cons[id] = static_cast<bool>(sheet.consistent[j]);
  }
  return Json{{"pair_id", sheet.pair_id},
              {"order_ab", ab},
              {"order_ba", ba},
              {"epsilon", eps},
              {"consistent", cons},
              {"all_zero", sheet.all_zero},
              {"slot_convention", "arm1=textA in order_ab"}};
}

ScoreSheet score_sheet_from_json(const Json& j) {
  const CategorySchema& schema = default_schema();
  ScoreArray ab{}, ba{};
  for (std::size_t k = 0; k < kNumCategories; ++k) {
    const std::string& id = schema.categories[k].id;
    ab[k] = j.at("order_ab").at(id).get<int>();
    ba[k] = j.at("order_ba").at(id).get<int>();
  }
  return combine_orders(j.at("pair_id").get<std::string>(), ab, ba);
}

}  // namespace pairlens
