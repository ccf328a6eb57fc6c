#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "pairlens/jsonl.hpp"

namespace pairlens {

enum class Arm { arm1, arm2 };

std::string to_string(Arm a);
Arm arm_from_string(const std::string& s);

struct ResponseRecord {
  std::string pair_id;
  Arm arm = Arm::arm1;
  std::string model;
  std::string raw;
  std::string answer;
  bool refused = false;
  std::size_t length_chars = 0;
  std::string language = "English";
};

// Extracts the 'answer' field when raw is a JSON object carrying it;
// otherwise falls back to the whole text with ok = false. Never throws.
std::pair<std::string, bool> parse_answer(const std::string& raw);

// Refusal patterns: one case-insensitive expression per line, '#' comments.
// Invalid expressions fail at load time.
class RefusalPatterns {
 public:
  static RefusalPatterns load(const std::string& path);
  static RefusalPatterns from_lines(const std::vector<std::string>& lines);

  const std::vector<std::string>& sources() const { return sources_; }

  // True iff the answer is empty/whitespace-only or any pattern matches.
  bool matches(const std::string& answer) const;
  // The first matching pattern source, for review output.
  std::optional<std::string> matching_pattern(const std::string& answer) const;

 private:
  std::vector<std::regex> compiled_;
  std::vector<std::string> sources_;
};

bool detect_refusal(const std::string& answer, const RefusalPatterns& patterns);

struct AlignmentReport {
  std::vector<std::string> omitted_pair_ids;
  // model -> {"arm1": rate, "arm2": rate, "overall": rate}
  std::map<std::string, std::map<std::string, double>> refusal_rate_by_arm;
  int retained_count = 0;
  int corpus_size = 0;
  std::vector<std::string> flagged_models;  // over the exclusion threshold
  double threshold = 0.30;
};

struct AlignOptions {
  // A model whose refusal rate exceeds this on either arm is flagged and
  // withheld from the aligned output (reported, never silently dropped).
  double exclusion_threshold = 0.30;
};

using ResponseSets = std::map<std::string, std::vector<ResponseRecord>>;

// Drops every pair id for which any retained model refused (or lacks) either
// arm, so downstream statistics compare identical prompt sets. Errors when no
// model survives the threshold or no pair id survives alignment.
std::pair<ResponseSets, AlignmentReport> align(const ResponseSets& sets,
                                               const AlignOptions& options = {});

Json to_json(const ResponseRecord& r);
ResponseRecord response_record_from_json(const Json& j);
Json to_json(const AlignmentReport& r);

}  // namespace pairlens
