#pragma once
// Leaderboards, breakdown tables and plot-data emission over scored results.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solbound/audit.hpp"
#include "solbound/json_util.hpp"
#include "solbound/scoring.hpp"
#include "solbound/specs_io.hpp"

namespace solbound {

// Sample Pearson correlation. Throws kInvalidValue on mismatched or short
// series and kDegenerate when either series is constant.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct ContourPoint {
  double t_ref = 0;
  double speedup = 0;       // t_ref / t_k
  double sol_distance = 0;  // t_k / t_sol
};

// Inverse of the score: t_k = t_sol + (1/s - 1)(t_b - t_sol).
double runtime_for_score(double t_sol, double t_b, double s);

// n_samples points with t_ref log-spaced over [t_ref_lo, t_ref_hi]. When the
// range is omitted it spans [t_sol, 1000 t_sol].
std::vector<ContourPoint> iso_score_contour(double t_sol, double t_b, double s,
                                            std::size_t n_samples,
                                            std::optional<double> t_ref_lo = std::nullopt,
                                            std::optional<double> t_ref_hi = std::nullopt);

// One workload's result tagged with its problem metadata. This is also the
// JSON Lines record the score subcommand emits.
struct ScoredRecord {
  std::string problem;
  Category category = Category::kL1;
  std::string op_type;
  std::string precision;
  std::string domain;
  std::uint64_t workload_index = 0;
  std::string candidate_id;
  ScoredResult result;
};

jsonu::OrderedJson record_to_json(const ScoredRecord& r);
ScoredRecord record_from_json(const jsonu::Json& j);
std::vector<ScoredRecord> parse_records(std::string_view jsonl);

struct LeaderboardRow {
  std::string problem;
  Category category = Category::kL1;
  std::string op_type;
  std::string precision;
  std::string domain;
  std::vector<double> gated_scores;  // by workload index
  double problem_score = 0;
};

struct Summary {
  std::size_t count = 0;
  double median = 0;  // lower median
  double mean = 0;
};

struct LabelShare {
  std::string label;
  std::size_t count = 0;
  double percent = 0;  // one decimal; shares of a table sum to exactly 100
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;  // sorted by problem
  std::map<Category, Summary> by_category;
  Summary overall;
  std::vector<LabelShare> op_types;
  std::vector<LabelShare> precisions;
  std::vector<LabelShare> domains;
  std::optional<double> headroom_median;
  std::map<Category, double> sol_distance_reduction_median;
  std::optional<double> overall_sol_distance_reduction_median;
};

// Lower median: element (n-1)/2 of the sorted values. Throws kEmpty.
double lower_median(std::vector<double> values);

// Shares rounded to one decimal by largest remainder, so they sum to 100.0.
std::vector<LabelShare> label_shares(const std::map<std::string, std::size_t>& counts);

// Throws kEmpty on empty input and kInconsistentBinding when one problem
// carries conflicting metadata.
Leaderboard aggregate_leaderboard(std::span<const ScoredRecord> records);

std::string leaderboard_csv(const Leaderboard& lb);
jsonu::OrderedJson leaderboard_json(const Leaderboard& lb);
// Human-readable medians and breakdowns, three decimals.
std::string leaderboard_text(const Leaderboard& lb);

enum class PlotKind { kSpeedupVsSolDist, kScoreLandscape, kScoreVsHeadroom, kExploitDistribution };
std::string_view plot_kind_name(PlotKind k);
std::optional<PlotKind> parse_plot_kind(std::string_view s);

// Quadrants of the speedup/sol-distance plane split at speedup 1 and this
// sol distance.
inline constexpr double kQuadrantSolDistance = 10.0;

// CSV with '#' metadata lines. Throws kMissingField naming the field a row
// lacks. kExploitDistribution is not record-based; use the overload below.
std::string emit_plot_data(std::span<const ScoredRecord> records, PlotKind kind);
std::string emit_plot_data(const std::map<ExploitFamily, FamilyShare>& shares);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace solbound
