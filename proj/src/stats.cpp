#include "pairlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pairlens/rng.hpp"
#include "pairlens/special.hpp"

namespace pairlens {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::arm1: return "arm1";
    case Direction::arm2: return "arm2";
    case Direction::none: return "none";
  }
  return "?";
}

std::string to_string(WilcoxonMode m) {
  switch (m) {
    case WilcoxonMode::automatic: return "auto";
    case WilcoxonMode::exact: return "exact";
    case WilcoxonMode::normal: return "normal";
  }
  return "?";
}

WilcoxonMode wilcoxon_mode_from_string(const std::string& s) {
  if (s == "auto") return WilcoxonMode::automatic;
  if (s == "exact") return WilcoxonMode::exact;
  if (s == "normal") return WilcoxonMode::normal;
  throw std::runtime_error("unknown wilcoxon mode: " + s);
}

void AnalysisConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::runtime_error("analysis.alpha must lie in (0, 1)");
  if (bootstrap_resamples < 100)
    throw std::runtime_error("analysis.bootstrap_resamples must be >= 100");
}

double mean_directional_difference(std::span<const double> epsilons) {
  if (epsilons.empty())
    throw std::runtime_error("mean_directional_difference: empty input");
  double sum = std::accumulate(epsilons.begin(), epsilons.end(), 0.0);
  return sum / static_cast<double>(epsilons.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Exact two-sided p for W+ given doubled ranks (integers, ties allowed):
// counts sign assignments whose W+ deviates from the mean at least as much as
// the observed one, via subset-sum convolution. All comparisons are integral.
double exact_wilcoxon_p(const std::vector<long long>& doubled_ranks,
                        long long w2_observed) {
  const std::size_t n = doubled_ranks.size();
  long long total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0LL);
  std::vector<std::uint64_t> dist(static_cast<std::size_t>(total) + 1, 0);
  dist[0] = 1;
  long long reach = 0;
  for (long long r : doubled_ranks) {
    for (long long s = reach; s >= 0; --s) {
      if (dist[static_cast<std::size_t>(s)])
        dist[static_cast<std::size_t>(s + r)] += dist[static_cast<std::size_t>(s)];
    }
    reach += r;
  }
  // Deviation measured as |2*W2 - total| so half-integer means stay integral.
  const long long dev_obs = std::llabs(2 * w2_observed - total);
  std::uint64_t extreme = 0;
  for (long long s = 0; s <= total; ++s) {
    if (std::llabs(2 * s - total) >= dev_obs) extreme += dist[static_cast<std::size_t>(s)];
  }
  return static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
}

double normal_wilcoxon_p(double w_plus, const std::vector<double>& ranks) {
  const double n = static_cast<double>(ranks.size());
  const double mu = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted(ranks);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += (t * t * t - t);
      i = j + 1;
    }
  }
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double sigma = std::sqrt(var);
  const double d = w_plus - mu;
  double z = 0.0;
  if (std::fabs(d) > 0.5) z = (d - 0.5 * (d > 0 ? 1.0 : -1.0)) / sigma;
  const double p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs, WilcoxonMode mode) {
  if (diffs.empty()) throw std::runtime_error("wilcoxon_signed_rank: empty input");

  std::vector<double> abs_nonzero;
  std::vector<bool> positive;
  abs_nonzero.reserve(diffs.size());
  for (double d : diffs) {
    if (d == 0.0) continue;
    abs_nonzero.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }

  WilcoxonResult result;
  result.n_effective = static_cast<int>(abs_nonzero.size());
  if (abs_nonzero.empty()) {
    result.degenerate = true;
    return result;
  }

  const std::vector<double> ranks = average_ranks(abs_nonzero);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (positive[i]) w_plus += ranks[i];
  result.w_plus = w_plus;

  const bool has_ties =
      std::set<double>(abs_nonzero.begin(), abs_nonzero.end()).size() != abs_nonzero.size();

  bool use_exact = false;
  switch (mode) {
    case WilcoxonMode::exact: use_exact = true; break;
    case WilcoxonMode::normal: use_exact = false; break;
    case WilcoxonMode::automatic:
      use_exact = result.n_effective <= 25 && !has_ties;
      break;
  }

  if (use_exact) {
    if (result.n_effective > 62)
      throw std::runtime_error("wilcoxon exact mode limited to n <= 62");
    std::vector<long long> doubled(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i)
      doubled[i] = static_cast<long long>(std::llround(2.0 * ranks[i]));
    const long long w2 = static_cast<long long>(std::llround(2.0 * w_plus));
    result.p_value = exact_wilcoxon_p(doubled, w2);
    result.used_exact = true;
  } else {
    result.p_value = normal_wilcoxon_p(w_plus, ranks);
  }
  return result;
}

std::vector<CategoryStats> per_category_stats(std::span<const EpsilonArray> sheets,
                                              const CategorySchema& schema,
                                              const AnalysisConfig& cfg) {
  schema.validate();
  cfg.validate();
  if (sheets.empty()) throw std::runtime_error("per_category_stats: no score sheets");

  std::vector<CategoryStats> out(kNumCategories);
  std::vector<double> column(sheets.size());
  for (std::size_t j = 0; j < kNumCategories; ++j) {
    for (std::size_t i = 0; i < sheets.size(); ++i) column[i] = sheets[i][j];
    CategoryStats& s = out[j];
    s.category = schema.categories[j].id;
    s.n = static_cast<int>(column.size());
    s.d_j = mean_directional_difference(column);
    const WilcoxonResult w = wilcoxon_signed_rank(column, cfg.wilcoxon_mode);
    s.w_statistic = w.w_plus;
    s.p_value = w.p_value;
    s.significant = !w.degenerate && w.p_value < cfg.alpha;
    s.direction = s.d_j > 0.0   ? Direction::arm1
                  : s.d_j < 0.0 ? Direction::arm2
                                : Direction::none;
  }

  if (cfg.holm_correction) {
    // Holm step-down: order p ascending, reject while p_(k) <= alpha/(m-k).
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return out[a].p_value < out[b].p_value;
    });
    const std::size_t m = out.size();
    bool rejecting = true;
    for (std::size_t k = 0; k < m; ++k) {
      CategoryStats& s = out[order[k]];
      rejecting = rejecting && s.p_value <= cfg.alpha / static_cast<double>(m - k);
      s.significant = rejecting && s.significant;
    }
  }
  return out;
}

double treatment_gap(std::span<const CategoryStats> stats) {
  if (stats.size() != kNumCategories)
    throw std::runtime_error("treatment_gap: expected " + std::to_string(kNumCategories) +
                             " categories, got " + std::to_string(stats.size()));
  double gap = 0.0;
  for (const CategoryStats& s : stats) gap += std::fabs(s.d_j);
  return gap;
}

double treatment_gap(std::span<const EpsilonArray> sheets) {
  if (sheets.empty()) throw std::runtime_error("treatment_gap: no score sheets");
  double gap = 0.0;
  for (std::size_t j = 0; j < kNumCategories; ++j) {
    double sum = 0.0;
    for (const EpsilonArray& e : sheets) sum += e[j];
    gap += std::fabs(sum / static_cast<double>(sheets.size()));
  }
  return gap;
}

namespace {

double resampled_gap(std::span<const EpsilonArray> sheets, Rng& rng) {
  const std::size_t n = sheets.size();
  std::array<double, kNumCategories> sums{};
  for (std::size_t i = 0; i < n; ++i) {
    const EpsilonArray& e = sheets[rng.bounded(n)];
    for (std::size_t j = 0; j < kNumCategories; ++j) sums[j] += e[j];
  }
  double gap = 0.0;
  for (double s : sums) gap += std::fabs(s / static_cast<double>(n));
  return gap;
}

// Type-7 quantile (linear interpolation between order statistics).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> bootstrap_gaps(std::span<const EpsilonArray> sheets,
                                   const AnalysisConfig& cfg,
                                   std::string_view stream_label) {
  std::vector<double> gaps(static_cast<std::size_t>(cfg.bootstrap_resamples));
  for (int b = 0; b < cfg.bootstrap_resamples; ++b) {
    Rng rng = Rng::derive(cfg.rng_seed, stream_label, static_cast<std::uint64_t>(b));
    gaps[static_cast<std::size_t>(b)] = resampled_gap(sheets, rng);
  }
  return gaps;
}

GapResult gap_result_from(std::span<const EpsilonArray> sheets, std::vector<double> gaps,
                          const AnalysisConfig& cfg) {
  GapResult r;
  r.g_t = treatment_gap(sheets);
  r.resamples = cfg.bootstrap_resamples;
  r.seed = cfg.rng_seed;
  std::sort(gaps.begin(), gaps.end());
  r.ci_low = quantile_sorted(gaps, 0.025);
  r.ci_high = quantile_sorted(gaps, 0.975);
  return r;
}

}  // namespace

GapResult bootstrap_gap_ci(std::span<const EpsilonArray> sheets, const AnalysisConfig& cfg,
                           std::string_view stream_label) {
  cfg.validate();
  if (sheets.empty()) throw std::runtime_error("bootstrap_gap_ci: no score sheets");
  return gap_result_from(sheets, bootstrap_gaps(sheets, cfg, stream_label), cfg);
}

GapTestResult bootstrap_gap_test(std::span<const EpsilonArray> sheets_x,
                                 std::span<const EpsilonArray> sheets_y,
                                 const AnalysisConfig& cfg) {
  cfg.validate();
  if (sheets_x.empty() || sheets_y.empty())
    throw std::runtime_error("bootstrap_gap_test: empty score set");

  const std::vector<double> gaps_x = bootstrap_gaps(sheets_x, cfg, "gap_x");
  const std::vector<double> gaps_y = bootstrap_gaps(sheets_y, cfg, "gap_y");

  const int b_count = cfg.bootstrap_resamples;
  int non_positive = 0, non_negative = 0;
  for (int b = 0; b < b_count; ++b) {
    const double delta = gaps_x[static_cast<std::size_t>(b)] - gaps_y[static_cast<std::size_t>(b)];
    if (delta <= 0.0) ++non_positive;
    if (delta >= 0.0) ++non_negative;
  }

  GapTestResult result;
  result.p_value = std::min(
      1.0, 2.0 * static_cast<double>(std::min(non_positive, non_negative) + 1) /
               static_cast<double>(b_count + 1));
  result.x = gap_result_from(sheets_x, gaps_x, cfg);
  result.y = gap_result_from(sheets_y, gaps_y, cfg);
  return result;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::runtime_error("spearman: length mismatch");
  if (x.size() < 3) throw std::runtime_error("spearman: need at least 3 points");

  CorrelationResult r;
  r.n = static_cast<int>(x.size());

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean_rank = (n + 1.0) / 2.0;

  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean_rank;
    const double dy = ry[i] - mean_rank;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0) {
    r.defined = false;
    r.rho = std::numeric_limits<double>::quiet_NaN();
    r.p_value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.rho = std::clamp(cov / std::sqrt(var_x * var_y), -1.0, 1.0);

  const double df = n - 2.0;
  if (std::fabs(r.rho) >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.rho * std::sqrt(df / (1.0 - r.rho * r.rho));
    r.p_value = student_t_two_sided_p(t, df);
  }
  return r;
}

double krippendorff_alpha(const std::map<std::string, std::vector<int>>& units,
                          AgreementMetric metric) {
  // Discover the value domain and count pairable units.
  std::set<int> domain;
  int pairable = 0;
  for (const auto& [item, ratings] : units) {
    if (ratings.size() >= 2) {
      ++pairable;
      for (int v : ratings) domain.insert(v);
    }
  }
  if (pairable < 2)
    throw std::runtime_error("krippendorff_alpha: need >= 2 items with >= 2 ratings");

  std::vector<int> values(domain.begin(), domain.end());
  const std::size_t v = values.size();
  auto value_index = [&](int raw) {
    return static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), raw) - values.begin());
  };

  // Coincidence matrix: each ordered pair within a unit contributes 1/(m_u-1).
  std::vector<std::vector<double>> o(v, std::vector<double>(v, 0.0));
  for (const auto& [item, ratings] : units) {
    const std::size_t m = ratings.size();
    if (m < 2) continue;
    const double weight = 1.0 / static_cast<double>(m - 1);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) o[value_index(ratings[a])][value_index(ratings[b])] += weight;
  }

  std::vector<double> marginal(v, 0.0);
  double n_total = 0.0;
  for (std::size_t c = 0; c < v; ++c)
    for (std::size_t k = 0; k < v; ++k) {
      marginal[c] += o[c][k];
      n_total += o[c][k];
    }

  auto delta_sq = [&](std::size_t c, std::size_t k) -> double {
    if (c == k) return 0.0;
    if (metric == AgreementMetric::nominal) return 1.0;
    const std::size_t lo = std::min(c, k), hi = std::max(c, k);
    double span = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) span += marginal[g];
    span -= 0.5 * (marginal[c] + marginal[k]);
    return span * span;
  };

  double d_observed = 0.0, d_expected = 0.0;
  for (std::size_t c = 0; c < v; ++c)
    for (std::size_t k = 0; k < v; ++k) {
      d_observed += o[c][k] * delta_sq(c, k);
      d_expected += marginal[c] * marginal[k] * delta_sq(c, k);
    }
  d_observed /= n_total;
  d_expected /= n_total * (n_total - 1.0);

  if (d_expected == 0.0) return 1.0;  // single value everywhere: unanimity
  return 1.0 - d_observed / d_expected;
}

CorrelationResult length_gap_correlation(std::span<const double> mean_lengths,
                                         std::span<const double> gaps) {
  if (mean_lengths.size() != gaps.size())
    throw std::runtime_error("length_gap_correlation: length mismatch");
  if (mean_lengths.size() < 3)
    throw std::runtime_error("length_gap_correlation: need at least 3 models");
  return spearman(mean_lengths, gaps);
}

IndexCorrelation external_index_correlation(const std::map<std::string, double>& gaps,
                                            const std::map<std::string, double>& index) {
  IndexCorrelation out;
  std::vector<double> x, y;
  for (const auto& [label, gap] : gaps) {
    auto it = index.find(label);
    if (it == index.end()) {
      out.dropped_labels.push_back(label);
      continue;
    }
    out.used_labels.push_back(label);
    x.push_back(gap);
    y.push_back(it->second);
  }
  for (const auto& [label, value] : index)
    if (!gaps.count(label)) out.dropped_labels.push_back(label);
  if (x.size() < 3)
    throw std::runtime_error("external_index_correlation: need >= 3 overlapping labels, got " +
                             std::to_string(x.size()));
  out.corr = spearman(x, y);
  return out;
}

AnalysisResult analyze_sheets(const std::string& label, std::span<const EpsilonArray> sheets,
                              const CategorySchema& schema, const AnalysisConfig& cfg) {
  AnalysisResult result;
  result.label = label;
  result.per_category = per_category_stats(sheets, schema, cfg);
  result.gap = bootstrap_gap_ci(sheets, cfg);
  result.config = cfg;
  return result;
}

Json to_json(const CategoryStats& s) {
  return Json{{"category", s.category}, {"d_j", s.d_j},
              {"n", s.n},               {"w_statistic", s.w_statistic},
              {"p_value", s.p_value},   {"significant", s.significant},
              {"direction", to_string(s.direction)}};
}

Json to_json(const GapResult& g) {
  return Json{{"g_t", g.g_t},
              {"ci_low", g.ci_low},
              {"ci_high", g.ci_high},
              {"resamples", g.resamples},
              {"seed", g.seed}};
}

Json to_json(const AnalysisConfig& c) {
  return Json{{"alpha", c.alpha},
              {"bootstrap_resamples", c.bootstrap_resamples},
              {"rng_seed", c.rng_seed},
              {"wilcoxon_mode", to_string(c.wilcoxon_mode)},
              {"holm_correction", c.holm_correction}};
}

AnalysisConfig analysis_config_from_json(const Json& j) {
  AnalysisConfig c;
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("bootstrap_resamples"))
    c.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
  if (j.contains("rng_seed")) c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (j.contains("wilcoxon_mode"))
    c.wilcoxon_mode = wilcoxon_mode_from_string(j.at("wilcoxon_mode").get<std::string>());
  if (j.contains("holm_correction")) c.holm_correction = j.at("holm_correction").get<bool>();
  return c;
}

CategoryStats category_stats_from_json(const Json& j) {
  CategoryStats s;
  s.category = j.at("category").get<std::string>();
  s.d_j = j.at("d_j").get<double>();
  s.n = j.at("n").get<int>();
  s.w_statistic = j.at("w_statistic").get<double>();
  s.p_value = j.at("p_value").get<double>();
  s.significant = j.at("significant").get<bool>();
  const std::string dir = j.at("direction").get<std::string>();
  s.direction = dir == "arm1" ? Direction::arm1
                : dir == "arm2" ? Direction::arm2
                                : Direction::none;
  return s;
}

GapResult gap_result_from_json(const Json& j) {
  GapResult g;
  g.g_t = j.at("g_t").get<double>();
  g.ci_low = j.at("ci_low").get<double>();
  g.ci_high = j.at("ci_high").get<double>();
  g.resamples = j.at("resamples").get<int>();
  g.seed = j.at("seed").get<std::uint64_t>();
  return g;
}

Json to_json(const AnalysisResult& a) {
  Json per_category = Json::array();
  for (const CategoryStats& s : a.per_category) per_category.push_back(to_json(s));
  return Json{{"label", a.label},
              {"per_category", per_category},
              {"gap", to_json(a.gap)},
              {"config", to_json(a.config)},
              {"sign_convention", "positive d_j = arm1"}};
}

AnalysisResult analysis_result_from_json(const Json& j) {
  AnalysisResult a;
  a.label = j.value("label", std::string{});
  for (const Json& s : j.at("per_category")) a.per_category.push_back(category_stats_from_json(s));
  a.gap = gap_result_from_json(j.at("gap"));
  a.config = analysis_config_from_json(j.at("config"));
  return a;
}

}  // namespace pairlens
