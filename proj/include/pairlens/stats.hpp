#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairlens/categories.hpp"
#include "pairlens/jsonl.hpp"

namespace pairlens {

enum class WilcoxonMode { automatic, exact, normal };
enum class Direction { arm1, arm2, none };
enum class AgreementMetric { nominal, ordinal };

std::string to_string(Direction d);
std::string to_string(WilcoxonMode m);
WilcoxonMode wilcoxon_mode_from_string(const std::string& s);

struct AnalysisConfig {
  double alpha = 0.05;
  int bootstrap_resamples = 1000;
  std::uint64_t rng_seed = 0;
  WilcoxonMode wilcoxon_mode = WilcoxonMode::automatic;
  bool holm_correction = false;

  void validate() const;  // 0 < alpha < 1, resamples >= 100
};

struct WilcoxonResult {
  double w_plus = 0.0;   // sum of ranks of positive differences
  double p_value = 1.0;  // two-sided
  int n_effective = 0;   // nonzero differences
  bool degenerate = false;
  bool used_exact = false;
};

struct CategoryStats {
  std::string category;
  double d_j = 0.0;
  int n = 0;
  double w_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
  Direction direction = Direction::none;
};

struct GapResult {
  double g_t = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

struct GapTestResult {
  double p_value = 1.0;
  GapResult x;
  GapResult y;
};

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  bool defined = true;  // false when a rank vector is constant
};

/// Arithmetic mean of the per-pair symmetric scores for one category.
double mean_directional_difference(std::span<const double> epsilons);

// Two-sided Wilcoxon signed-rank test of symmetry around zero. Zero
// differences are dropped; tied absolute values get average ranks. Exact mode
// computes the full permutation distribution of W+ (valid with ties);
// automatic picks exact for n_effective <= 25 with no ties and the
// tie-corrected, continuity-corrected normal approximation otherwise. All
// differences zero yields a degenerate result with p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs,
                                    WilcoxonMode mode = WilcoxonMode::automatic);

// Per-category D_j, Wilcoxon p, significance at cfg.alpha and direction by
// sign of D_j, over the column of each category in the sheets.
std::vector<CategoryStats> per_category_stats(std::span<const EpsilonArray> sheets,
                                              const CategorySchema& schema,
                                              const AnalysisConfig& cfg);

/// Treatment gap: sum of |D_j| over all 19 categories.
double treatment_gap(std::span<const CategoryStats> stats);
double treatment_gap(std::span<const EpsilonArray> sheets);

// Percentile bootstrap CI for the treatment gap of one score set. Resample b
// draws from Rng::derive(cfg.rng_seed, stream_label, b), so results are
// independent of evaluation order.
GapResult bootstrap_gap_ci(std::span<const EpsilonArray> sheets,
                           const AnalysisConfig& cfg,
                           std::string_view stream_label = "gap");

// Pairwise bootstrap test of G_T equality between two score sets: pairs are
// resampled with replacement within each set, gaps recomputed per resample,
// and the two-sided p-value taken from the sign split of the resampled gap
// differences (add-one smoothing). Degenerate all-zero inputs give p = 1.
GapTestResult bootstrap_gap_test(std::span<const EpsilonArray> sheets_x,
                                 std::span<const EpsilonArray> sheets_y,
                                 const AnalysisConfig& cfg);

// Spearman rank correlation with average ranks for ties; p-value from the
// t-approximation. A constant input vector yields defined = false.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// Krippendorff's alpha over items with >= 2 ratings, coincidence-matrix
// formulation. Returns 1 under unanimity (both disagreements vanish).
double krippendorff_alpha(const std::map<std::string, std::vector<int>>& units,
                          AgreementMetric metric);

/// Spearman of per-model mean response length against treatment gap.
CorrelationResult length_gap_correlation(std::span<const double> mean_lengths,
                                         std::span<const double> gaps);

struct IndexCorrelation {
  CorrelationResult corr;
  std::vector<std::string> used_labels;
  std::vector<std::string> dropped_labels;
};

// One condition's full analysis: per-category stats, gap with CI, and the
// config that produced it. This is the analyze stage's output document.
struct AnalysisResult {
  std::string label;
  std::vector<CategoryStats> per_category;
  GapResult gap;
  AnalysisConfig config;
};

AnalysisResult analyze_sheets(const std::string& label, std::span<const EpsilonArray> sheets,
                              const CategorySchema& schema, const AnalysisConfig& cfg);

Json to_json(const AnalysisResult& a);
AnalysisResult analysis_result_from_json(const Json& j);

// Spearman between per-label gaps and an external numeric index over the
// label intersection; needs >= 3 overlapping labels.
IndexCorrelation external_index_correlation(const std::map<std::string, double>& gaps,
                                            const std::map<std::string, double>& index);

// Average ranks (1-based, fractional on ties).
std::vector<double> average_ranks(std::span<const double> values);

Json to_json(const CategoryStats& s);
Json to_json(const GapResult& g);
Json to_json(const AnalysisConfig& c);
AnalysisConfig analysis_config_from_json(const Json& j);
CategoryStats category_stats_from_json(const Json& j);
GapResult gap_result_from_json(const Json& j);

}  // namespace pairlens
