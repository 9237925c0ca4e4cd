#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "solbound/error.hpp"
#include "solbound/report.hpp"

using namespace solbound;

namespace {

std::vector<ScoredRecord> load(const char* rel) { return parse_records(fixtures::read(rel)); }

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

ScoredRecord record(std::string problem, Category cat, std::uint64_t w, std::string cand, double t_k,
                    bool correct = true) {
  ScoredRecord r;
  r.problem = std::move(problem);
  r.category = cat;
  r.op_type = "gemm";
  r.precision = "bf16";
  r.domain = "llm";
  r.workload_index = w;
  r.candidate_id = std::move(cand);
  r.result = score_result(RuntimeTriple{t_k, 2.0, 1.0, 4.0}, correct);
  return r;
}

}  // namespace

TEST_CASE("pearson correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  CHECK(pearson_r(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  CHECK(pearson_r(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> a{1, 2, 3}, b{1, 2, 2};
  CHECK(pearson_r(a, b) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(pearson_r(a, flat), Error);
  CHECK_THROWS_AS(pearson_r(std::vector<double>{1}, std::vector<double>{1}), Error);
  CHECK_THROWS_AS(pearson_r(a, x), Error);
}

TEST_CASE("pearson is affine invariant and matches the oracle") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-5, 5);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> xs(20), ys(20);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      xs[j] = n(rng);
      ys[j] = 0.5 * xs[j] + n(rng);
    }
    const double r = pearson_r(xs, ys);
    CHECK(r == doctest::Approx(oracle::pearson(xs, ys)).epsilon(1e-12));
    const double sa = scale(rng), sb = shift(rng);
    std::vector<double> t = xs, negy = ys;
    for (auto& v : t) v = sa * v + sb;
    for (auto& v : negy) v = -v;
    CHECK(pearson_r(t, ys) == doctest::Approx(r).epsilon(1e-12));
    CHECK(pearson_r(xs, negy) == doctest::Approx(-r).epsilon(1e-12));
  }
}

TEST_CASE("iso-score contours") {
  CHECK(runtime_for_score(50, 100, 0.5) == 100.0);
  CHECK(runtime_for_score(50, 100, 1.0) == 50.0);
  CHECK(runtime_for_score(50, 100, 1.0 / 3.0) == doctest::Approx(150.0).epsilon(1e-15));
  for (const auto& p : iso_score_contour(50, 100, 1.0, 10)) CHECK(p.sol_distance == 1.0);
  for (const auto& p : iso_score_contour(50, 100, 0.5, 10)) CHECK(p.t_ref / p.speedup == doctest::Approx(100.0));
  const auto pts = iso_score_contour(50, 100, 0.7, 25);
  REQUIRE(pts.size() == 25);
  CHECK(pts.front().t_ref == doctest::Approx(50.0));
  CHECK(pts.back().t_ref == doctest::Approx(50000.0));
  const auto ranged = iso_score_contour(50, 100, 0.9, 3, 10.0, 1000.0);
  CHECK(ranged[1].t_ref == doctest::Approx(100.0));
  CHECK_THROWS_AS(iso_score_contour(50, 100, 0.0, 10), Error);
  CHECK_THROWS_AS(iso_score_contour(50, 100, 1.2, 10), Error);
  CHECK_THROWS_AS(iso_score_contour(100, 50, 0.5, 10), Error);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1e-3, 1e3), s(0.01, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double t_sol = u(rng), t_b = t_sol + u(rng), level = s(rng);
    for (const auto& p : iso_score_contour(t_sol, t_b, level, 7)) {
      const double t_k = p.sol_distance * t_sol;
      CHECK(std::fabs(*sol_score({t_k, t_b, t_sol, {}}) - level) <= 1e-9);
    }
  }
}

TEST_CASE("records round-trip through JSON lines") {
  const auto recs = load("report/category_medians.jsonl");
  REQUIRE(recs.size() == 12);
  const ScoredRecord back = record_from_json(jsonu::parse_document(jsonu::dump(record_to_json(recs[0])), "r"));
  CHECK(back.problem == recs[0].problem);
  CHECK(*back.result.score == *recs[0].result.score);
  try {
    parse_records("{\"problem\": \"x\"}\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("line 1:", 0) == 0);
  }
}

TEST_CASE("category medians") {
  const auto recs = load("report/category_medians.jsonl");
  const Leaderboard lb = aggregate_leaderboard(recs);
  CHECK(lb.by_category.at(Category::kL1).median == doctest::Approx(0.688).epsilon(1e-12));
  CHECK(lb.by_category.at(Category::kL2).median == doctest::Approx(0.761).epsilon(1e-12));
  CHECK(lb.by_category.at(Category::kQuant).median == doctest::Approx(0.757).epsilon(1e-12));
  CHECK(lb.by_category.at(Category::kFIB).median == doctest::Approx(0.789).epsilon(1e-12));
  CHECK(lb.overall.median == doctest::Approx(0.732).epsilon(1e-12));
  const std::string text = leaderboard_text(lb);
  for (const char* s : {"0.688", "0.761", "0.757", "0.789", "overall median 0.732"}) {
    CHECK(text.find(s) != std::string::npos);
  }
}

TEST_CASE("lower median and shares") {
  CHECK(lower_median({3, 1, 2}) == 2);
  CHECK(lower_median({4, 1, 3, 2}) == 2);
  CHECK(lower_median({5}) == 5);
  CHECK_THROWS_AS(lower_median({}), Error);
  const auto thirds = label_shares({{"a", 1}, {"b", 1}, {"c", 1}});
  long units = 0;
  for (const auto& s : thirds) units += std::lround(s.percent * 10);
  CHECK(units == 1000);
  CHECK(thirds[0].percent == 33.4);
  CHECK(label_shares({}).empty());
}

TEST_CASE("op-type breakdown over 235 problems") {
  const Leaderboard lb = aggregate_leaderboard(load("report/op_types.jsonl"));
  CHECK(lb.rows.size() == 235);
  std::map<std::string, double> pct;
  std::size_t units = 0;
  for (const auto& s : lb.op_types) {
    pct[s.label] = s.percent;
    units += static_cast<std::size_t>(std::lround(s.percent * 10));
  }
  CHECK(units == 1000);
  CHECK(pct.at("attention") == 34.5);
  CHECK(pct.at("moe") == 15.3);
  CHECK(pct.at("normalization") == 11.5);
  CHECK(std::lround(pct.at("attention")) == 35);
  CHECK(std::lround(pct.at("moe")) == 15);
  CHECK(std::lround(pct.at("normalization")) == 12);
}

TEST_CASE("singleton leaderboard") {
  const std::vector<ScoredRecord> one{record("p", Category::kL2, 0, "c", 1.25)};
  const Leaderboard lb = aggregate_leaderboard(one);
  REQUIRE(lb.rows.size() == 1);
  CHECK(lb.overall.median == 0.8);
  CHECK(lb.overall.mean == 0.8);
  CHECK(lb.by_category.at(Category::kL2).count == 1);
  CHECK(*lb.overall_sol_distance_reduction_median == 3.2);
  CHECK_THROWS_AS(aggregate_leaderboard(std::vector<ScoredRecord>{}), Error);
}

TEST_CASE("best candidate per workload, then mean over workloads") {
  const std::vector<ScoredRecord> recs{
      record("p", Category::kL1, 0, "a", 2.0), record("p", Category::kL1, 0, "b", 1.25),
      record("p", Category::kL1, 1, "a", 1.0, false), record("p", Category::kL1, 1, "b", 4.0)};
  const Leaderboard lb = aggregate_leaderboard(recs);
  REQUIRE(lb.rows.size() == 1);
  CHECK(lb.rows[0].gated_scores == std::vector<double>{0.8, 0.25});
  CHECK(lb.rows[0].problem_score == doctest::Approx(0.525));
  const std::string csv = leaderboard_csv(lb);
  CHECK(csv.rfind("problem,category,", 0) == 0);
  CHECK(csv.find("p,L1,gemm,bf16,llm,2,") != std::string::npos);

  auto conflicting = recs;
  conflicting[1].op_type = "attention";
  CHECK_THROWS_AS(aggregate_leaderboard(conflicting), Error);
}

TEST_CASE("plot data") {
  const auto pts = load("report/plot_points.jsonl");
  const std::string quad = emit_plot_data(pts, PlotKind::kSpeedupVsSolDist);
  const auto rows = data_rows(quad);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("plot_a,", 0) == 0);
  CHECK(rows[0].find(",upper-right") != std::string::npos);
  CHECK(quad.find("# x: speedup (log scale)") != std::string::npos);

  const std::string land = emit_plot_data(pts, PlotKind::kScoreLandscape);
  const auto lrows = data_rows(land);
  REQUIRE(lrows.size() == 3);
  CHECK(lrows[1].find("S<0.4") != std::string::npos);
  CHECK(lrows[2].find("S>=0.9") != std::string::npos);

  const std::vector<ScoredRecord> none;
  for (auto k : {PlotKind::kSpeedupVsSolDist, PlotKind::kScoreLandscape, PlotKind::kScoreVsHeadroom}) {
    const std::string out = emit_plot_data(none, k);
    CHECK(data_rows(out).empty());
    CHECK(out.find("problem,workload,candidate,") != std::string::npos);
  }

  ScoredRecord no_ref = record("q", Category::kL1, 0, "c", 1.5);
  no_ref.result = score_result(RuntimeTriple{1.5, 2.0, 1.0, std::nullopt}, true);
  try {
    emit_plot_data(std::vector<ScoredRecord>{no_ref}, PlotKind::kScoreVsHeadroom);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingField);
    CHECK(std::string(e.what()).find("t_ref") != std::string::npos);
  }
  CHECK(parse_plot_kind("score_landscape") == PlotKind::kScoreLandscape);
  CHECK_FALSE(parse_plot_kind("pie").has_value());
}

TEST_CASE("exploit distribution plot") {
  std::map<ExploitFamily, FamilyShare> shares;
  shares[ExploitFamily::kPrecisionDowngrade] = {259, 259.0 / 4062};
  shares[ExploitFamily::kMonkeyPatching] = {134, 134.0 / 4062};
  shares[ExploitFamily::kStreamInjection] = {100, 100.0 / 4062};
  shares[ExploitFamily::kCachedOutputReuse] = {67, 67.0 / 4062};
  const auto rows = data_rows(emit_plot_data(shares));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("PrecisionDowngrade,259,", 0) == 0);
  CHECK(rows[0].substr(rows[0].rfind(',') + 1) == "6.4");
  CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "3.3");
  CHECK(rows[2].substr(rows[2].rfind(',') + 1) == "2.5");
  CHECK(rows[3].substr(rows[3].rfind(',') + 1) == "1.6");
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(10) == "10");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}
