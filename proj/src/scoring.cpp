#include "solbound/scoring.hpp"

#include <cmath>
#include <sstream>

#include "solbound/error.hpp"

namespace solbound {

std::string_view signal_name(SignalKind k) {
  switch (k) {
    case SignalKind::kSolViolation: return "SOL_VIOLATION";
    case SignalKind::kBaselineAtSol: return "BASELINE_AT_SOL";
  }
  return "SOL_VIOLATION";
}

std::string_view band_label(ScoreBand b) {
  switch (b) {
    case ScoreBand::kBelow04: return "S<0.4";
    case ScoreBand::kBelow05: return "0.4<=S<0.5";
    case ScoreBand::kBelow07: return "0.5<=S<0.7";
    case ScoreBand::kBelow09: return "0.7<=S<0.9";
    case ScoreBand::kTop: return "S>=0.9";
  }
  return "S<0.4";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<AuditSignal> audit_signals(const RuntimeTriple& t) {
  std::vector<AuditSignal> out;
  if (t.t_k < t.t_sol) {
    out.push_back({SignalKind::kSolViolation,
                   "candidate runtime " + fmt(t.t_k) + " is below the SOL bound " +
                       fmt(t.t_sol) + "; review the bound and the submission"});
  }
  if (t.t_b <= t.t_sol) {
    out.push_back({SignalKind::kBaselineAtSol, "baseline runtime " + fmt(t.t_b) +
                                                   " has reached the SOL bound " +
                                                   fmt(t.t_sol) + "; problem is solved"});
  }
  return out;
}

std::optional<double> sol_score(const RuntimeTriple& t) {
  if (!(t.t_b > t.t_sol) || !(t.t_k >= t.t_sol)) return std::nullopt;
  // Evaluated in extended precision and rounded once.
  const long double gap = static_cast<long double>(t.t_k) - t.t_sol;
  const long double span = static_cast<long double>(t.t_b) - t.t_sol;
  return static_cast<double>(1.0L / (1.0L + gap / span));
}

ScoredResult score_result(const RuntimeTriple& triple, bool correct) {
  ScoredResult r;
  r.triple = triple;
  r.correctness = correct;
  r.score = sol_score(triple);
  r.signals = audit_signals(triple);
  if (r.score) r.band = score_band(*r.score);
  if (triple.t_ref && *triple.t_ref > triple.t_sol) {
    r.headroom_fraction = headroom_fraction(*triple.t_ref, triple.t_k, triple.t_sol);
  }
  if (triple.t_ref && *triple.t_ref > 0 && triple.t_k > 0) {
    r.speedup_vs_ref = speedup(*triple.t_ref, triple.t_k);
  }
  return r;
}

double suite_score(std::span<const ScoredResult> results) {
  if (results.empty()) throw Error(ErrorKind::kEmpty, "suite score of an empty suite");
  double mean = 0;
  std::size_t n = 0;
  for (const auto& r : results) {
    ++n;
    mean += (r.gated_score() - mean) / static_cast<double>(n);
  }
  return mean;
}

double problem_score(std::span<const ScoredResult> workloads) {
  if (workloads.empty()) throw Error(ErrorKind::kEmpty, "problem has no scored workloads");
  return suite_score(workloads);
}

const ScoredResult& best_of_k(std::span<const ScoredResult> candidates) {
  if (candidates.empty()) throw Error(ErrorKind::kEmpty, "best-of-k over no candidates");
  const ScoredResult* best = &candidates.front();
  for (const auto& c : candidates.subspan(1)) {
    const double a = c.gated_score(), b = best->gated_score();
    if (a > b || (a == b && c.triple.t_k < best->triple.t_k)) best = &c;
  }
  return *best;
}

double headroom_fraction(double t_ref, double t_k, double t_sol) {
  if (!(t_ref > t_sol)) {
    throw Error(ErrorKind::kDegenerate,
                "headroom is undefined when the reference is not slower than the SOL bound");
  }
  return (t_ref - t_k) / (t_ref - t_sol);
}

double speedup(double t_ref, double t_k) {
  if (!(t_ref > 0) || !(t_k > 0)) {
    throw Error(ErrorKind::kInvalidValue, "speedup needs positive runtimes");
  }
  return t_ref / t_k;
}

ScoreBand score_band(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorKind::kInvalidValue, "score " + fmt(s) + " is outside [0, 1]");
  }
  if (s < 0.4) return ScoreBand::kBelow04;
  if (s < 0.5) return ScoreBand::kBelow05;
  if (s < 0.7) return ScoreBand::kBelow07;
  if (s < 0.9) return ScoreBand::kBelow09;
  return ScoreBand::kTop;
}

}  // namespace solbound
