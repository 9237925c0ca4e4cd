#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "solbound/error.hpp"
#include "solbound/scoring.hpp"

using namespace solbound;

namespace {

ScoredResult with_score(double s, bool correct, double t_k = 1.0) {
  ScoredResult r;
  r.score = s;
  r.correctness = correct;
  r.triple.t_k = t_k;
  return r;
}

bool has(const std::vector<AuditSignal>& v, SignalKind k) {
  for (const auto& s : v) {
    if (s.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("score anchors") {
  CHECK(*sol_score({100, 100, 50, {}}) == 0.5);
  CHECK(*sol_score({50, 100, 50, {}}) == 1.0);
  CHECK(*sol_score({150, 100, 50, {}}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("invalid triples carry no score and raise signals") {
  CHECK_FALSE(sol_score({40, 100, 50, {}}).has_value());
  CHECK_FALSE(sol_score({60, 50, 50, {}}).has_value());
  const auto v = audit_signals({40, 100, 50, {}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == SignalKind::kSolViolation);
  const auto b = audit_signals({60, 50, 50, {}});
  REQUIRE(b.size() == 1);
  CHECK(b[0].kind == SignalKind::kBaselineAtSol);
  CHECK(audit_signals({60, 100, 50, {}}).empty());
  const auto both = audit_signals({40, 30, 50, {}});
  CHECK(has(both, SignalKind::kSolViolation));
  CHECK(has(both, SignalKind::kBaselineAtSol));
  CHECK(signal_name(SignalKind::kSolViolation) == "SOL_VIOLATION");
}

TEST_CASE("score_result fills derived fields") {
  const ScoredResult r = score_result({100, 100, 50, 200.0}, true);
  CHECK(*r.score == 0.5);
  CHECK(*r.band == ScoreBand::kBelow07);
  CHECK(*r.headroom_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(*r.speedup_vs_ref == 2.0);
  CHECK(r.gated_score() == 0.5);
  const ScoredResult gated = score_result({100, 100, 50, {}}, false);
  CHECK(gated.gated_score() == 0.0);
  CHECK_FALSE(gated.headroom_fraction.has_value());
  const ScoredResult unscoreable = score_result({40, 100, 50, {}}, true);
  CHECK(unscoreable.gated_score() == 0.0);
  CHECK_FALSE(unscoreable.band.has_value());
}

TEST_CASE("suite score") {
  std::vector<ScoredResult> a{with_score(1.0, true), with_score(0.5, true), with_score(0.0, true)};
  CHECK(suite_score(a) == 0.5);
  std::vector<ScoredResult> b{with_score(0.9, false), with_score(0.8, true)};
  CHECK(suite_score(b) == 0.4);
  std::vector<ScoredResult> c{with_score(1.0, true)};
  CHECK(suite_score(c) == 1.0);
  std::vector<ScoredResult> none;
  try {
    suite_score(none);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmpty);
  }
  CHECK(problem_score(a) == 0.5);
}

TEST_CASE("suite of identical results equals the gated score") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const ScoredResult r = with_score(u(rng), true);
    std::vector<ScoredResult> copies(1 + i % 37, r);
    CHECK(suite_score(copies) == r.gated_score());
  }
}

TEST_CASE("best of k") {
  std::vector<ScoredResult> a{with_score(0.4, true), with_score(0.9, false), with_score(0.7, true)};
  CHECK(&best_of_k(a) == &a[2]);
  std::vector<ScoredResult> gated{with_score(0.4, false), with_score(0.9, false)};
  CHECK(&best_of_k(gated) == &gated[0]);
  std::vector<ScoredResult> single{with_score(0.3, true)};
  CHECK(&best_of_k(single) == &single[0]);
  std::vector<ScoredResult> tie{with_score(0.5, true, 2.0), with_score(0.5, true, 1.0),
                                with_score(0.5, true, 1.0)};
  CHECK(&best_of_k(tie) == &tie[1]);
  std::vector<ScoredResult> none;
  CHECK_THROWS_AS(best_of_k(none), Error);
}

TEST_CASE("headroom and speedup") {
  CHECK(headroom_fraction(200, 100, 50) == doctest::Approx(2.0 / 3.0));
  CHECK(headroom_fraction(200, 200, 50) == 0.0);
  CHECK(headroom_fraction(200, 50, 50) == 1.0);
  try {
    headroom_fraction(50, 40, 50);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerate);
  }
  CHECK(speedup(200, 100) == 2.0);
  CHECK(speedup(100, 100) == 1.0);
  CHECK(speedup(100, 400) == 0.25);
  CHECK_THROWS_AS(speedup(0, 1), Error);
  CHECK_THROWS_AS(speedup(1, -1), Error);
}

TEST_CASE("score bands are left-closed") {
  CHECK(score_band(0.95) == ScoreBand::kTop);
  CHECK(score_band(0.39) == ScoreBand::kBelow04);
  CHECK(score_band(0.5) == ScoreBand::kBelow07);
  CHECK(score_band(0.4) == ScoreBand::kBelow05);
  CHECK(score_band(0.7) == ScoreBand::kBelow09);
  CHECK(score_band(0.9) == ScoreBand::kTop);
  CHECK(score_band(1.0) == ScoreBand::kTop);
  CHECK(score_band(0.0) == ScoreBand::kBelow04);
  CHECK_THROWS_AS(score_band(1.01), Error);
  CHECK_THROWS_AS(score_band(-0.01), Error);
  CHECK_THROWS_AS(score_band(std::nan("")), Error);
}

TEST_CASE("score properties on random triples") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-6, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double t_sol = u(rng);
    const double t_b = t_sol + u(rng);
    const double t_k = t_sol + u(rng);
    const double s = *sol_score({t_k, t_b, t_sol, {}});
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    const double alt = (t_b - t_sol) / ((t_k - t_sol) + (t_b - t_sol));
    const double m = std::max(s, alt);
    CHECK(std::fabs(s - alt) <= 2 * (std::nextafter(m, 2.0) - m));
    CHECK(*sol_score({t_k * 1.0001, t_b, t_sol, {}}) < s);
    const double scaled = *sol_score({t_k * 4, t_b * 4, t_sol * 4, {}});
    CHECK(scaled == doctest::Approx(s).epsilon(1e-12));
  }
  const double eps = 1e-6;
  CHECK(*sol_score({50 + 50 * (1 / eps - 1) * 1.01, 100, 50, {}}) < eps);
}
