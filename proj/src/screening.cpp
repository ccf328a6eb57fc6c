#include "pairlens/screening.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace pairlens {

std::string to_string(Arm a) { return a == Arm::arm1 ? "arm1" : "arm2"; }

Arm arm_from_string(const std::string& s) {
  if (s == "arm1") return Arm::arm1;
  if (s == "arm2") return Arm::arm2;
  throw std::runtime_error("unknown arm: " + s);
}

std::pair<std::string, bool> parse_answer(const std::string& raw) {
  const Json parsed = Json::parse(raw, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("answer") &&
      parsed.at("answer").is_string()) {
    return {parsed.at("answer").get<std::string>(), true};
  }
  return {raw, false};
}

RefusalPatterns RefusalPatterns::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pattern file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  try {
    return from_lines(lines);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

RefusalPatterns RefusalPatterns::from_lines(const std::vector<std::string>& lines) {
  RefusalPatterns p;
  std::size_t lineno = 0;
  for (const std::string& raw_line : lines) {
    ++lineno;
    std::string line = raw_line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    try {
      p.compiled_.emplace_back(line, std::regex::icase | std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw std::runtime_error("invalid refusal pattern on line " + std::to_string(lineno) +
                               ": " + e.what());
    }
    p.sources_.push_back(line);
  }
  return p;
}

bool RefusalPatterns::matches(const std::string& answer) const {
  if (answer.find_first_not_of(" \t\r\n") == std::string::npos) return true;
  for (const std::regex& re : compiled_)
    if (std::regex_search(answer, re)) return true;
  return false;
}

std::optional<std::string> RefusalPatterns::matching_pattern(const std::string& answer) const {
  if (answer.find_first_not_of(" \t\r\n") == std::string::npos) return "<empty answer>";
  for (std::size_t i = 0; i < compiled_.size(); ++i)
    if (std::regex_search(answer, compiled_[i])) return sources_[i];
  return std::nullopt;
}

bool detect_refusal(const std::string& answer, const RefusalPatterns& patterns) {
  return patterns.matches(answer);
}

std::pair<ResponseSets, AlignmentReport> align(const ResponseSets& sets,
                                               const AlignOptions& options) {
  if (sets.empty()) throw std::runtime_error("align: no response sets");

  AlignmentReport report;
  report.threshold = options.exclusion_threshold;

  std::set<std::string> universe;
  for (const auto& [model, records] : sets)
    for (const ResponseRecord& r : records) universe.insert(r.pair_id);
  report.corpus_size = static_cast<int>(universe.size());

  // Per-model refusal accounting and the threshold flag.
  struct Index {
    std::map<std::pair<std::string, Arm>, const ResponseRecord*> by_key;
  };
  std::map<std::string, Index> indexes;
  std::vector<std::string> retained_models;
  for (const auto& [model, records] : sets) {
    int counts[2] = {0, 0};
    int refusals[2] = {0, 0};
    Index index;
    for (const ResponseRecord& r : records) {
      const int a = r.arm == Arm::arm1 ? 0 : 1;
      ++counts[a];
      if (r.refused) ++refusals[a];
      if (!index.by_key.emplace(std::make_pair(r.pair_id, r.arm), &r).second)
        throw std::runtime_error("align: duplicate record for model " + model + ", pair " +
                                 r.pair_id + ", " + to_string(r.arm));
    }
    auto rate = [](int refused, int total) {
      return total == 0 ? 0.0 : static_cast<double>(refused) / static_cast<double>(total);
    };
    const double rate1 = rate(refusals[0], counts[0]);
    const double rate2 = rate(refusals[1], counts[1]);
    const double overall = rate(refusals[0] + refusals[1], counts[0] + counts[1]);
    report.refusal_rate_by_arm[model] = {
        {"arm1", rate1}, {"arm2", rate2}, {"overall", overall}};
    if (rate1 > options.exclusion_threshold || rate2 > options.exclusion_threshold) {
      report.flagged_models.push_back(model);
    } else {
      retained_models.push_back(model);
    }
    indexes.emplace(model, std::move(index));
  }

  if (retained_models.empty())
    throw std::runtime_error("align: every model exceeds the refusal threshold");

  std::set<std::string> omitted;
  for (const std::string& pair_id : universe) {
    for (const std::string& model : retained_models) {
      const Index& index = indexes.at(model);
      auto rec1 = index.by_key.find({pair_id, Arm::arm1});
      auto rec2 = index.by_key.find({pair_id, Arm::arm2});
      const bool complete = rec1 != index.by_key.end() && rec2 != index.by_key.end() &&
                            !rec1->second->refused && !rec2->second->refused;
      if (!complete) {
        omitted.insert(pair_id);
        break;
      }
    }
  }

  report.omitted_pair_ids.assign(omitted.begin(), omitted.end());
  report.retained_count = static_cast<int>(universe.size() - omitted.size());
  if (report.retained_count == 0) throw std::runtime_error("align: no common answered prompts");

  ResponseSets aligned;
  for (const std::string& model : retained_models) {
    std::vector<ResponseRecord> kept;
    for (const ResponseRecord& r : sets.at(model))
      if (!omitted.count(r.pair_id)) kept.push_back(r);
    std::sort(kept.begin(), kept.end(), [](const ResponseRecord& a, const ResponseRecord& b) {
      return std::tie(a.pair_id, a.arm) < std::tie(b.pair_id, b.arm);
    });
    aligned.emplace(model, std::move(kept));
  }
  return {std::move(aligned), std::move(report)};
}

Json to_json(const ResponseRecord& r) {
  return Json{{"pair_id", r.pair_id},
              {"arm", to_string(r.arm)},
              {"model", r.model},
              {"raw", r.raw},
              {"answer", r.answer},
              {"refused", r.refused},
              {"length_chars", r.length_chars},
              {"language", r.language}};
}

ResponseRecord response_record_from_json(const Json& j) {
  ResponseRecord r;
  r.pair_id = j.at("pair_id").get<std::string>();
  r.arm = arm_from_string(j.at("arm").get<std::string>());
  r.model = j.at("model").get<std::string>();
  r.raw = j.at("raw").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  r.refused = j.at("refused").get<bool>();
  r.length_chars = j.at("length_chars").get<std::size_t>();
  r.language = j.value("language", std::string{"English"});
  return r;
}

Json to_json(const AlignmentReport& r) {
  return Json{{"omitted_pair_ids", r.omitted_pair_ids},
              {"refusal_rate_by_arm", r.refusal_rate_by_arm},
              {"retained_count", r.retained_count},
              {"corpus_size", r.corpus_size},
              {"flagged_models", r.flagged_models},
              {"threshold", r.threshold}};
}

}  // namespace pairlens
