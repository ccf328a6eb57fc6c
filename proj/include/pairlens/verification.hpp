#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pairlens/gateway.hpp"
#include "pairlens/stats.hpp"

namespace pairlens {

struct KeywordDiff {
  std::string word;
  int freq_arm1 = 0;
  int freq_arm2 = 0;
  int diff = 0;  // freq_arm1 - freq_arm2
};

// Token normalizer applied after lowercasing. "identity" keeps tokens as-is,
// "stem" strips common English suffixes. The keyword check is a face-validity
// aid, not a statistic, so a lightweight stemmer stands in for lemmatization.
using Normalizer = std::function<std::string(const std::string&)>;
Normalizer make_normalizer(const std::string& name);  // identity | lowercase | stem

std::map<std::string, int> keyword_counts(std::span<const std::string> texts,
                                          const Normalizer& normalizer);

// Most characteristic words per arm, ranked by signed count difference;
// first element favours arm1, second favours arm2.
std::pair<std::vector<KeywordDiff>, std::vector<KeywordDiff>> keyword_diff(
    std::span<const std::string> arm1_texts, std::span<const std::string> arm2_texts,
    const Normalizer& normalizer, int top_k);

// Gendered-term substitution table. Keys match whole words case-insensitively;
// replacement casing follows the matched token. An empty replacement deletes
// the word together with one adjacent space.
struct SubstitutionTable {
  std::map<std::string, std::string> entries;  // lowercase key -> replacement

  static SubstitutionTable load(const std::string& path);
  static SubstitutionTable from_json(const Json& j);

  // No self-mappings and no replacement may contain a key, so rewriting
  // cannot cycle and neutralize is idempotent.
  void validate() const;
};

std::string neutralize(const std::string& text, const SubstitutionTable& table);
std::vector<std::string> neutralize(std::span<const std::string> texts,
                                    const SubstitutionTable& table);

struct RobustnessReport {
  CorrelationResult rho;       // Spearman over the paired [D_1..D_19] vectors
  double gap_delta_pct = 0.0;  // (G_T(A) - G_T(B)) / G_T(B), B = baseline
  std::string label_a;
  std::string label_b;
  bool unreliable = false;    // more than 10% of pairs unscored
  bool gap_collapsed = false; // G_T(A) hit zero while G_T(B) was not
  int unscored_pairs = 0;
  int total_pairs = 0;
  double g_t_a = 0.0;
  double g_t_b = 0.0;
};

// Compares two analyses over the same 19 categories (e.g. original judge vs
// substitute judge, or original vs neutralized responses).
RobustnessReport compare_conditions(const AnalysisResult& condition_a,
                                    const AnalysisResult& condition_b);

struct ResponsePair {
  std::string pair_id;
  std::string arm1_text;
  std::string arm2_text;
};

// Translates both texts of every pair, re-scores and re-analyzes, and compares
// against the same pairs scored untranslated. Pairs that fail scoring on
// either side are excluded from both conditions and counted; the report is
// flagged unreliable past 10% unscored.
RobustnessReport translation_robustness(std::span<const ResponsePair> pairs,
                                        const BackendConfig& translator,
                                        const std::string& target_language,
                                        const BackendConfig& judge,
                                        const CategorySchema& schema,
                                        const AnalysisConfig& cfg);

Json to_json(const RobustnessReport& r);
Json to_json(const KeywordDiff& k);

}  // namespace pairlens
