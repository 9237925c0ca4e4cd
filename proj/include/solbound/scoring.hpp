#pragma once
// SOL score and the metrics derived from it.
//
//   S = 1 / (1 + (t_k - t_sol) / (t_b - t_sol))
//
// S is 1 at the SOL bound, 0.5 at baseline parity and decays to 0 as the
// candidate slows down. Triples outside t_b > t_sol, t_k >= t_sol carry no
// score; they surface as audit signals instead.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace solbound {

struct RuntimeTriple {
  double t_k = 0;    // candidate
  double t_b = 0;    // scoring baseline
  double t_sol = 0;  // SOL bound
  std::optional<double> t_ref;
};

enum class SignalKind { kSolViolation, kBaselineAtSol };
std::string_view signal_name(SignalKind k);

struct AuditSignal {
  SignalKind kind;
  std::string detail;
};

enum class ScoreBand { kBelow04, kBelow05, kBelow07, kBelow09, kTop };
std::string_view band_label(ScoreBand b);

struct ScoredResult {
  RuntimeTriple triple;
  bool correctness = false;
  std::optional<double> score;  // nullopt when the triple is unscoreable
  std::optional<double> headroom_fraction;
  std::optional<double> speedup_vs_ref;
  std::optional<ScoreBand> band;
  std::vector<AuditSignal> signals;

  // C * S, with an unscoreable triple contributing 0.
  double gated_score() const { return correctness && score ? *score : 0.0; }
};

std::vector<AuditSignal> audit_signals(const RuntimeTriple& triple);

// nullopt when the triple violates t_b > t_sol or t_k >= t_sol.
std::optional<double> sol_score(const RuntimeTriple& triple);

// Builds a full ScoredResult: score, band, signals and, when t_ref is known
// and exceeds t_sol, headroom and speedup.
ScoredResult score_result(const RuntimeTriple& triple, bool correct);

// (1/N) sum C_j S_j. Throws kEmpty on an empty list.
double suite_score(std::span<const ScoredResult> results);

// Mean of per-workload gated scores; the per-problem score fed to the suite.
double problem_score(std::span<const ScoredResult> workloads);

// argmax C*S; ties go to the smaller t_k, then to the earlier entry.
const ScoredResult& best_of_k(std::span<const ScoredResult> candidates);

// (t_ref - t_k) / (t_ref - t_sol). Throws kDegenerate when t_ref <= t_sol.
double headroom_fraction(double t_ref, double t_k, double t_sol);

// t_ref / t_k. Throws kInvalidValue on non-positive input.
double speedup(double t_ref, double t_k);

// Bands are left-closed: [0,.4) [.4,.5) [.5,.7) [.7,.9) [.9,1].
ScoreBand score_band(double s);

}  // namespace solbound
