#include "solbound/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "solbound/error.hpp"

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.count = v.size();
  s.median = lower_median(v);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

}  // namespace

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::kInvalidValue, "pearson_r needs series of equal length");
  }
  if (xs.size() < 2) throw Error(ErrorKind::kInvalidValue, "pearson_r needs at least 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorKind::kDegenerate, "correlation is undefined for a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double runtime_for_score(double t_sol, double t_b, double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw Error(ErrorKind::kInvalidValue, "iso-score level must lie in (0, 1]");
  }
  if (!(t_b > t_sol) || !(t_sol > 0)) {
    throw Error(ErrorKind::kInvalidValue, "iso-score contour needs t_b > t_sol > 0");
  }
  if (s == 1.0) return t_sol;
  return t_sol + (1.0 / s - 1.0) * (t_b - t_sol);
}

std::vector<ContourPoint> iso_score_contour(double t_sol, double t_b, double s,
                                            std::size_t n_samples,
                                            std::optional<double> t_ref_lo,
                                            std::optional<double> t_ref_hi) {
  const double t_k = runtime_for_score(t_sol, t_b, s);
  if (n_samples == 0) throw Error(ErrorKind::kInvalidValue, "contour needs at least one sample");
  const double lo = t_ref_lo.value_or(t_sol);
  const double hi = t_ref_hi.value_or(1000.0 * t_sol);
  if (!(lo > 0) || !(hi >= lo)) {
    throw Error(ErrorKind::kInvalidValue, "contour t_ref range must satisfy 0 < lo <= hi");
  }
  std::vector<ContourPoint> out;
  out.reserve(n_samples);
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (std::size_t i = 0; i < n_samples; ++i) {
    double t_ref = lo;
    if (n_samples > 1) {
      if (i + 1 == n_samples) {
        t_ref = hi;
      } else if (i > 0) {
        const double f = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        t_ref = std::exp(log_lo + f * (log_hi - log_lo));
      }
    }
    out.push_back(ContourPoint{t_ref, t_ref / t_k, t_k / t_sol});
  }
  return out;
}

OrderedJson record_to_json(const ScoredRecord& r) {
  const ScoredResult& s = r.result;
  OrderedJson j;
  j["problem"] = r.problem;
  j["category"] = std::string(category_name(r.category));
  j["op_type"] = r.op_type;
  j["precision"] = r.precision;
  j["domain"] = r.domain;
  j["workload_index"] = r.workload_index;
  j["candidate_id"] = r.candidate_id;
  j["t_k"] = s.triple.t_k;
  j["t_b"] = s.triple.t_b;
  j["t_sol"] = s.triple.t_sol;
  j["t_ref"] = s.triple.t_ref ? OrderedJson(*s.triple.t_ref) : OrderedJson(nullptr);
  j["correct"] = s.correctness;
  j["score"] = s.score ? OrderedJson(*s.score) : OrderedJson(nullptr);
  j["gated_score"] = s.gated_score();
  j["band"] = s.band ? OrderedJson(std::string(band_label(*s.band))) : OrderedJson(nullptr);
  j["headroom_fraction"] =
      s.headroom_fraction ? OrderedJson(*s.headroom_fraction) : OrderedJson(nullptr);
  j["speedup"] = s.speedup_vs_ref ? OrderedJson(*s.speedup_vs_ref) : OrderedJson(nullptr);
  OrderedJson signals = OrderedJson::array();
  for (const auto& sig : s.signals) {
    signals.push_back({{"kind", std::string(signal_name(sig.kind))}, {"detail", sig.detail}});
  }
  j["signals"] = signals;
  return j;
}

ScoredRecord record_from_json(const Json& j) {
  ScoredRecord r;
  r.problem = jsonu::require_string(j, "problem", "");
  const std::string cat = jsonu::require_string(j, "category", "");
  auto c = parse_category(cat);
  if (!c) throw Error(ErrorKind::kInvalidValue, "unknown category '" + cat + "'");
  r.category = *c;
  r.op_type = jsonu::require_string(j, "op_type", "");
  r.precision = jsonu::require_string(j, "precision", "");
  if (auto it = j.find("domain"); it != j.end() && it->is_string()) r.domain = it->get<std::string>();
  if (auto it = j.find("workload_index"); it != j.end()) {
    if (!it->is_number_unsigned()) {
      throw Error(ErrorKind::kInvalidValue, "field 'workload_index' must be a non-negative integer");
    }
    r.workload_index = it->get<std::uint64_t>();
  }
  if (auto it = j.find("candidate_id"); it != j.end() && it->is_string()) {
    r.candidate_id = it->get<std::string>();
  }
  RuntimeTriple t;
  t.t_k = jsonu::require_number(j, "t_k", "");
  t.t_b = jsonu::require_number(j, "t_b", "");
  t.t_sol = jsonu::require_number(j, "t_sol", "");
  if (auto it = j.find("t_ref"); it != j.end() && !it->is_null()) t.t_ref = jsonu::as_number(*it, "t_ref");
  bool correct = true;
  if (auto it = j.find("correct"); it != j.end()) {
    if (!it->is_boolean()) throw Error(ErrorKind::kInvalidValue, "field 'correct' must be a boolean");
    correct = it->get<bool>();
  }
  r.result = score_result(t, correct);
  return r;
}

std::vector<ScoredRecord> parse_records(std::string_view text) {
  std::vector<ScoredRecord> out;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(record_from_json(jsonu::parse_document(line, "scored record")));
      } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return out;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kEmpty, "median of an empty list");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

std::vector<LabelShare> label_shares(const std::map<std::string, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [label, n] : counts) total += n;
  std::vector<LabelShare> out;
  if (total == 0) return out;
  struct Part {
    std::size_t index;
    std::size_t remainder;
  };
  std::vector<std::size_t> units;
  std::vector<Part> parts;
  std::size_t assigned = 0;
  for (const auto& [label, n] : counts) {
    const std::size_t scaled = n * 1000;
    units.push_back(scaled / total);
    parts.push_back({out.size(), scaled % total});
    assigned += scaled / total;
    out.push_back(LabelShare{label, n, 0});
  }
  std::stable_sort(parts.begin(), parts.end(),
                   [](const Part& a, const Part& b) { return a.remainder > b.remainder; });
  for (std::size_t k = 0; assigned < 1000; ++k, ++assigned) ++units[parts[k].index];
  for (std::size_t i = 0; i < out.size(); ++i) out[i].percent = static_cast<double>(units[i]) / 10.0;
  return out;
}

Leaderboard aggregate_leaderboard(std::span<const ScoredRecord> records) {
  if (records.empty()) throw Error(ErrorKind::kEmpty, "leaderboard needs at least one result");

  std::map<std::string, std::vector<const ScoredRecord*>> by_problem;
  for (const auto& r : records) by_problem[r.problem].push_back(&r);

  Leaderboard lb;
  std::map<Category, std::vector<double>> cat_scores;
  std::map<Category, std::vector<double>> cat_reduction;
  std::vector<double> all_scores, all_reduction, headroom;
  std::map<std::string, std::size_t> op_counts, prec_counts, domain_counts;

  for (auto& [name, recs] : by_problem) {
    const ScoredRecord& first = *recs.front();
    for (const auto* r : recs) {
      if (r->category != first.category || r->op_type != first.op_type ||
          r->precision != first.precision || r->domain != first.domain) {
        throw Error(ErrorKind::kInconsistentBinding,
                    "problem '" + name + "' carries conflicting metadata");
      }
    }
    std::stable_sort(recs.begin(), recs.end(), [](const ScoredRecord* a, const ScoredRecord* b) {
      return std::tie(a->workload_index, a->candidate_id) <
             std::tie(b->workload_index, b->candidate_id);
    });

    LeaderboardRow row{name, first.category, first.op_type, first.precision, first.domain, {}, 0};
    std::vector<ScoredResult> best_per_workload;
    for (std::size_t i = 0; i < recs.size();) {
      std::size_t j = i;
      std::vector<ScoredResult> candidates;
      while (j < recs.size() && recs[j]->workload_index == recs[i]->workload_index) {
        candidates.push_back(recs[j]->result);
        ++j;
      }
      const ScoredResult& best = best_of_k(candidates);
      best_per_workload.push_back(best);
      row.gated_scores.push_back(best.gated_score());
      if (best.headroom_fraction) headroom.push_back(*best.headroom_fraction);
      if (best.speedup_vs_ref) {
        cat_reduction[row.category].push_back(*best.speedup_vs_ref);
        all_reduction.push_back(*best.speedup_vs_ref);
      }
      i = j;
    }
    row.problem_score = problem_score(best_per_workload);
    cat_scores[row.category].push_back(row.problem_score);
    all_scores.push_back(row.problem_score);
    ++op_counts[row.op_type];
    ++prec_counts[row.precision];
    ++domain_counts[row.domain.empty() ? "unspecified" : row.domain];
    lb.rows.push_back(std::move(row));
  }

  for (const auto& [cat, scores] : cat_scores) lb.by_category[cat] = summarize(scores);
  lb.overall = summarize(all_scores);
  lb.op_types = label_shares(op_counts);
  lb.precisions = label_shares(prec_counts);
  lb.domains = label_shares(domain_counts);
  if (!headroom.empty()) lb.headroom_median = lower_median(headroom);
  for (const auto& [cat, v] : cat_reduction) lb.sol_distance_reduction_median[cat] = lower_median(v);
  if (!all_reduction.empty()) lb.overall_sol_distance_reduction_median = lower_median(all_reduction);
  return lb;
}

std::string leaderboard_csv(const Leaderboard& lb) {
  std::ostringstream os;
  os << "problem,category,op_type,precision,domain,workloads,problem_score,gated_scores\n";
  for (const auto& r : lb.rows) {
    os << csv_field(r.problem) << ',' << category_name(r.category) << ',' << csv_field(r.op_type)
       << ',' << csv_field(r.precision) << ',' << csv_field(r.domain) << ','
       << r.gated_scores.size() << ',' << format_number(r.problem_score) << ',';
    for (std::size_t i = 0; i < r.gated_scores.size(); ++i) {
      if (i) os << ';';
      os << format_number(r.gated_scores[i]);
    }
    os << '\n';
  }
  return os.str();
}

namespace {

OrderedJson summary_json(const Summary& s) {
  return OrderedJson{{"count", s.count}, {"median", s.median}, {"mean", s.mean}};
}

OrderedJson shares_json(const std::vector<LabelShare>& shares) {
  OrderedJson a = OrderedJson::array();
  for (const auto& s : shares) {
    a.push_back({{"label", s.label}, {"count", s.count}, {"percent", s.percent}});
  }
  return a;
}

}  // namespace

OrderedJson leaderboard_json(const Leaderboard& lb) {
  OrderedJson j;
  OrderedJson rows = OrderedJson::array();
  for (const auto& r : lb.rows) {
    rows.push_back({{"problem", r.problem},
                    {"category", std::string(category_name(r.category))},
                    {"op_type", r.op_type},
                    {"precision", r.precision},
                    {"domain", r.domain},
                    {"gated_scores", r.gated_scores},
                    {"problem_score", r.problem_score}});
  }
  j["rows"] = rows;
  OrderedJson cats = OrderedJson::object();
  for (const auto& [c, s] : lb.by_category) cats[std::string(category_name(c))] = summary_json(s);
  j["categories"] = cats;
  j["overall"] = summary_json(lb.overall);
  j["op_types"] = shares_json(lb.op_types);
  j["precisions"] = shares_json(lb.precisions);
  j["domains"] = shares_json(lb.domains);
  j["headroom_median"] = lb.headroom_median ? OrderedJson(*lb.headroom_median) : OrderedJson(nullptr);
  OrderedJson red = OrderedJson::object();
  for (const auto& [c, v] : lb.sol_distance_reduction_median) red[std::string(category_name(c))] = v;
  j["sol_distance_reduction_median"] = red;
  j["overall_sol_distance_reduction_median"] =
      lb.overall_sol_distance_reduction_median
          ? OrderedJson(*lb.overall_sol_distance_reduction_median)
          : OrderedJson(nullptr);
  return j;
}

std::string leaderboard_text(const Leaderboard& lb) {
  std::ostringstream os;
  os << "problems: " << lb.rows.size() << "\n";
  os << "category  count  median  mean\n";
  for (const auto& [c, s] : lb.by_category) {
    char line[96];
    std::snprintf(line, sizeof line, "%-8s  %5zu  %6s  %s\n", std::string(category_name(c)).c_str(),
                  s.count, fixed(s.median, 3).c_str(), fixed(s.mean, 3).c_str());
    os << line;
  }
  os << "overall median " << fixed(lb.overall.median, 3) << " mean " << fixed(lb.overall.mean, 3)
     << "\n";
  auto shares = [&](std::string_view title, const std::vector<LabelShare>& v) {
    os << title << ":\n";
    for (const auto& s : v) os << "  " << s.label << " " << s.count << " (" << fixed(s.percent, 1) << "%)\n";
  };
  shares("op types", lb.op_types);
  shares("precisions", lb.precisions);
  shares("domains", lb.domains);
  if (lb.headroom_median) os << "headroom median " << fixed(*lb.headroom_median, 3) << "\n";
  for (const auto& [c, v] : lb.sol_distance_reduction_median) {
    os << "sol distance reduction median " << category_name(c) << " " << fixed(v, 3) << "x\n";
  }
  return os.str();
}

std::string_view plot_kind_name(PlotKind k) {
  switch (k) {
    case PlotKind::kSpeedupVsSolDist: return "speedup_vs_soldist";
    case PlotKind::kScoreLandscape: return "score_landscape";
    case PlotKind::kScoreVsHeadroom: return "score_vs_headroom";
    case PlotKind::kExploitDistribution: return "exploit_distribution";
  }
  return "speedup_vs_soldist";
}

std::optional<PlotKind> parse_plot_kind(std::string_view s) {
  for (auto k : {PlotKind::kSpeedupVsSolDist, PlotKind::kScoreLandscape, PlotKind::kScoreVsHeadroom,
                 PlotKind::kExploitDistribution}) {
    if (plot_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

std::string quadrant(double speedup, double sol_distance) {
  const std::string vertical = sol_distance >= kQuadrantSolDistance ? "upper" : "lower";
  const std::string horizontal = speedup >= 1.0 ? "right" : "left";
  return vertical + "-" + horizontal;
}

[[noreturn]] void missing(const ScoredRecord& r, std::string_view field) {
  throw Error(ErrorKind::kMissingField, "record for problem '" + r.problem + "' workload " +
                                            std::to_string(r.workload_index) +
                                            " lacks required field '" + std::string(field) + "'");
}

}  // namespace

std::string emit_plot_data(std::span<const ScoredRecord> records, PlotKind kind) {
  if (kind == PlotKind::kExploitDistribution) {
    throw Error(ErrorKind::kInvalidValue, "exploit_distribution plots are built from audit findings");
  }
  std::vector<const ScoredRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScoredRecord* a, const ScoredRecord* b) {
    return std::tie(a->problem, a->workload_index, a->candidate_id) <
           std::tie(b->problem, b->workload_index, b->candidate_id);
  });

  std::ostringstream os;
  os << "# kind: " << plot_kind_name(kind) << "\n";
  switch (kind) {
    case PlotKind::kSpeedupVsSolDist:
      os << "# x: speedup (log scale)\n# y: sol_distance (log scale)\n"
         << "# quadrants: split at speedup=1 and sol_distance=" << format_number(kQuadrantSolDistance)
         << "\n";
      os << "problem,workload,candidate,speedup,sol_distance,quadrant\n";
      break;
    case PlotKind::kScoreLandscape:
      os << "# x: speedup (log scale)\n# y: sol_distance (log scale)\n# color: score (linear)\n";
      os << "problem,workload,candidate,speedup,sol_distance,score,band\n";
      break;
    case PlotKind::kScoreVsHeadroom:
      os << "# x: headroom (linear)\n# y: score (linear)\n";
      os << "problem,workload,candidate,headroom,score,speedup\n";
      break;
    case PlotKind::kExploitDistribution: break;
  }
  for (const auto* r : sorted) {
    const ScoredResult& s = r->result;
    os << csv_field(r->problem) << ',' << r->workload_index << ',' << csv_field(r->candidate_id)
       << ',';
    switch (kind) {
      case PlotKind::kSpeedupVsSolDist: {
        if (!s.speedup_vs_ref) missing(*r, "t_ref");
        const double d = s.triple.t_k / s.triple.t_sol;
        os << format_number(*s.speedup_vs_ref) << ',' << format_number(d) << ','
           << quadrant(*s.speedup_vs_ref, d) << '\n';
        break;
      }
      case PlotKind::kScoreLandscape: {
        if (!s.speedup_vs_ref) missing(*r, "t_ref");
        if (!s.score) missing(*r, "score");
        os << format_number(*s.speedup_vs_ref) << ',' << format_number(s.triple.t_k / s.triple.t_sol)
           << ',' << format_number(*s.score) << ',' << band_label(*s.band) << '\n';
        break;
      }
      case PlotKind::kScoreVsHeadroom: {
        if (!s.headroom_fraction) missing(*r, "t_ref");
        if (!s.score) missing(*r, "score");
        os << format_number(*s.headroom_fraction) << ',' << format_number(*s.score) << ','
           << format_number(*s.speedup_vs_ref) << '\n';
        break;
      }
      case PlotKind::kExploitDistribution: break;
    }
  }
  return os.str();
}

std::string emit_plot_data(const std::map<ExploitFamily, FamilyShare>& shares) {
  std::vector<std::pair<ExploitFamily, FamilyShare>> rows(shares.begin(), shares.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return family_name(a.first) < family_name(b.first);
  });
  std::ostringstream os;
  os << "# kind: exploit_distribution\n# x: family (categorical)\n# y: percent (linear)\n";
  os << "family,count,fraction,percent\n";
  for (const auto& [f, s] : rows) {
    os << family_name(f) << ',' << s.count << ',' << format_number(s.fraction) << ','
       << fixed(100.0 * s.fraction, 1) << '\n';
  }
  return os.str();
}

}  // namespace solbound
