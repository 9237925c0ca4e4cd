// solbound: command-line front end.
//
// Exit codes: 0 ok, 1 validation or correctness failure, 2 audit reject,
// 3 input/usage error, 4 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "solbound/audit.hpp"
#include "solbound/cost_model.hpp"
#include "solbound/error.hpp"
#include "solbound/graph_io.hpp"
#include "solbound/harness.hpp"
#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"
#include "solbound/report.hpp"
#include "solbound/roofline.hpp"
#include "solbound/scoring.hpp"
#include "solbound/specs_io.hpp"

namespace fs = std::filesystem;
using namespace solbound;
using jsonu::Json;
using jsonu::OrderedJson;

namespace {

enum Exit { kOk = 0, kFailed = 1, kRejected = 2, kInputError = 3, kInternal = 4 };

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kParse, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// A spec named on the command line, or found in $SOLBOUND_HW_DIR.
std::string locate_hw(const std::string& arg) {
  if (arg == "-" || fs::exists(arg)) return arg;
  if (const char* dir = std::getenv("SOLBOUND_HW_DIR"); dir != nullptr && *dir != '\0') {
    for (const std::string& candidate : {arg, arg + ".json"}) {
      const fs::path p = fs::path(dir) / candidate;
      if (fs::exists(p)) return p.string();
    }
  }
  throw Error(ErrorKind::kParse, "hardware spec '" + arg + "' not found (also searched SOLBOUND_HW_DIR)");
}

bool on_off(const std::string& v) { return v == "on"; }

std::string si(double v, int sig, std::string_view unit) {
  static const char* kPrefixes[] = {"", "K", "M", "G", "T", "P", "E"};
  int p = 0;
  while (std::fabs(v) >= 1000.0 && p < 6) {
    v /= 1000.0;
    ++p;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g %s%s", sig, v, kPrefixes[p], std::string(unit).c_str());
  return buf;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kValidation:
    case ErrorKind::kCycle:
    case ErrorKind::kInconsistentBinding:
      return kFailed;
    default:
      return kInputError;
  }
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  std::string hw;
  std::string workloads;
  std::string dtype;
  std::string prefetch = "on";
  std::string scale_overhead = "off";
  std::string format = "json";
  bool tighten = false;
  std::string out;
};

OrderedJson analyze_graph(const EinsumGraph& g, const HardwareSpec& spec, const AnalyzeArgs& a,
                          std::string& text) {
  const auto defects = validate_graph(g);
  if (!defects.ok()) {
    std::string msg = "graph does not validate:";
    for (const auto& d : defects.defects) msg += "\n  " + d.subject + ": " + d.rule + ": " + d.detail;
    throw Error(ErrorKind::kValidation, msg);
  }
  std::string dtype = a.dtype;
  if (dtype.empty()) {
    auto it = g.metadata.find("precision");
    if (it == g.metadata.end()) {
      throw Error(ErrorKind::kMissingField, "no --dtype given and the graph declares no precision");
    }
    dtype = it->second;
  }
  const ByteOptions opts{on_off(a.prefetch), on_off(a.scale_overhead)};
  const CostBreakdown cost = analyze_cost(g, opts);
  const SolReport rep = sol_time(cost, spec, dtype);
  OrderedJson j;
  j["hardware"] = spec.name;
  j["prefetch_weights"] = opts.prefetch_weights;
  j["scale_overhead"] = opts.scale_overhead;
  j["cost"] = cost_to_json(cost);
  j["sol"] = sol_report_to_json(rep);
  std::optional<SolReport> tight;
  if (a.tighten) {
    tight = tightened_sol_time(g, cost, spec, dtype, std::nullopt);
    j["tightened"] = sol_report_to_json(*tight);
  }

  std::ostringstream os;
  os << "Total FLOPs      " << si(static_cast<double>(cost.total_flops), 4, "") << "\n";
  os << "Fused bytes      " << si(static_cast<double>(cost.external_bytes), 3, "B") << "\n";
  if (rep.intensity) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f FLOP/B", *rep.intensity);
    os << "Intensity        " << buf << "\n";
  } else {
    os << "Intensity        unbounded\n";
  }
  os << "Bottleneck       " << bottleneck_name(rep.bottleneck) << "\n";
  char ms[64];
  std::snprintf(ms, sizeof ms, "%.3g ms", rep.sol_time_s * 1e3);
  os << "Runtime (SOL)    " << ms << "\n";
  if (tight) {
    std::snprintf(ms, sizeof ms, "%.3g ms", tight->sol_time_s * 1e3);
    os << "Tightened SOL    " << ms << "\n";
  }
  text += os.str();
  return j;
}

int run_analyze(const AnalyzeArgs& a) {
  const HardwareSpec spec = parse_hardware_spec(read_input(locate_hw(a.hw)));
  const std::string doc = read_input(a.input);
  const Json probe = jsonu::parse_document(doc, a.input);
  std::string text;
  OrderedJson result;
  if (probe.is_object() && probe.contains("axes")) {
    if (a.workloads.empty()) {
      throw Error(ErrorKind::kMissingField, "problem files need --workloads");
    }
    const ProblemSpec problem = parse_problem(doc);
    const auto workloads = parse_workloads(read_input(a.workloads));
    result["problem"] = problem.name;
    OrderedJson list = OrderedJson::array();
    for (std::size_t i = 0; i < workloads.size(); ++i) {
      AnalyzeArgs wa = a;
      if (wa.dtype.empty() && problem.precision != "mixed") wa.dtype = problem.precision;
      text += "workload " + std::to_string(i) + "\n";
      OrderedJson w = analyze_graph(bind_axes(problem, workloads[i]), spec, wa, text);
      OrderedJson entry;
      entry["workload_index"] = i;
      entry["bindings"] = workloads[i].bindings;
      for (auto& [k, v] : w.items()) entry[k] = v;
      list.push_back(entry);
    }
    result["workloads"] = list;
  } else {
    result = analyze_graph(parse_graph(doc), spec, a, text);
  }
  write_output(a.out, a.format == "text" ? text : jsonu::dump(result));
  return kOk;
}

// ---- score ---------------------------------------------------------------

struct ScoreArgs {
  std::string timings;
  std::string bounds;
  std::string baselines;
  std::string out;
};

std::vector<double> number_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw Error(ErrorKind::kInvalidValue, "field '" + path + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(jsonu::as_number(v[i], jsonu::index(path, i)));
  return out;
}

double at_workload(const std::vector<double>& v, std::uint64_t w, const std::string& what) {
  if (w >= v.size()) {
    throw Error(ErrorKind::kMissingField,
                what + " has no entry for workload " + std::to_string(w));
  }
  return v[w];
}

int run_score(const ScoreArgs& a) {
  const auto logs = parse_timing_log(read_input(a.timings));
  const Json bounds = jsonu::parse_document(read_input(a.bounds), a.bounds);
  if (!bounds.is_object()) throw Error(ErrorKind::kParse, "bounds file must be an object keyed by problem");
  Json baselines = Json::object();
  if (!a.baselines.empty()) {
    baselines = jsonu::parse_document(read_input(a.baselines), a.baselines);
    if (!baselines.is_object()) {
      throw Error(ErrorKind::kParse, "baselines file must be an object keyed by problem");
    }
  }

  std::vector<ScoredRecord> records;
  for (const auto& log : logs) {
    const Json& b = jsonu::require(bounds, log.problem, "");
    ScoredRecord r;
    r.problem = log.problem;
    const std::string cat = jsonu::require_string(b, "category", log.problem);
    auto c = parse_category(cat);
    if (!c) throw Error(ErrorKind::kInvalidValue, "unknown category '" + cat + "'");
    r.category = *c;
    r.op_type = jsonu::require_string(b, "op_type", log.problem);
    r.precision = jsonu::require_string(b, "precision", log.problem);
    if (auto it = b.find("domain"); it != b.end() && it->is_string()) r.domain = it->get<std::string>();
    r.workload_index = log.workload_index;
    r.candidate_id = log.candidate_id;

    RuntimeTriple t;
    t.t_k = aggregate_runtime(log);
    const std::string sol_path = jsonu::join(log.problem, "t_sol_ms");
    t.t_sol = at_workload(number_list(jsonu::require(b, "t_sol_ms", log.problem), sol_path),
                          log.workload_index, sol_path);
    if (auto it = b.find("t_ref_ms"); it != b.end()) {
      const std::string p = jsonu::join(log.problem, "t_ref_ms");
      t.t_ref = at_workload(number_list(*it, p), log.workload_index, p);
    }
    if (auto it = baselines.find(log.problem); it != baselines.end()) {
      t.t_b = at_workload(number_list(*it, log.problem), log.workload_index,
                          "baseline for " + log.problem);
    } else if (auto bt = b.find("t_b_ms"); bt != b.end()) {
      const std::string p = jsonu::join(log.problem, "t_b_ms");
      t.t_b = at_workload(number_list(*bt, p), log.workload_index, p);
    } else {
      throw Error(ErrorKind::kMissingField, "no baseline runtime for problem '" + log.problem + "'");
    }
    r.result = score_result(t, log.correct);
    records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(), [](const ScoredRecord& x, const ScoredRecord& y) {
    return std::tie(x.problem, x.workload_index, x.candidate_id) <
           std::tie(y.problem, y.workload_index, y.candidate_id);
  });
  std::string text;
  for (const auto& r : records) text += record_to_json(r).dump() + "\n";
  write_output(a.out, text);
  return kOk;
}

// ---- validate ------------------------------------------------------------

OrderedJson defects_json(const ValidationOutcome& v) {
  OrderedJson a = OrderedJson::array();
  for (const auto& d : v.defects) a.push_back({{"subject", d.subject}, {"rule", d.rule}, {"detail", d.detail}});
  return a;
}

int run_validate(const std::string& input, const std::string& workloads, const std::string& out) {
  const std::string doc = read_input(input);
  const Json probe = jsonu::parse_document(doc, input);
  OrderedJson j;
  bool valid = true;
  if (probe.is_object() && probe.contains("axes")) {
    const ProblemSpec problem = parse_problem(doc);
    j["problem"] = problem.name;
    OrderedJson list = OrderedJson::array();
    if (!workloads.empty()) {
      const auto ws = parse_workloads(read_input(workloads));
      for (std::size_t i = 0; i < ws.size(); ++i) {
        OrderedJson e;
        e["workload_index"] = i;
        try {
          const EinsumGraph g = bind_axes(problem, ws[i]);
          e["valid"] = true;
          e["defects"] = OrderedJson::array();
        } catch (const Error& err) {
          valid = false;
          e["valid"] = false;
          e["error"] = err.what();
        }
        list.push_back(e);
      }
    }
    j["workloads"] = list;
  } else {
    const EinsumGraph g = parse_graph(doc);
    const auto v = validate_graph(g);
    valid = v.ok();
    j["defects"] = defects_json(v);
  }
  j["valid"] = valid;
  write_output(out, jsonu::dump(j));
  return valid ? kOk : kFailed;
}

// ---- compare / calibrate -------------------------------------------------

struct CompareArgs {
  std::string candidate;
  std::string reference;
  std::optional<double> atol, rtol, matched_ratio;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  const TensorData cand = parse_tensor_data(read_input(a.candidate));
  const TensorData ref = parse_tensor_data(read_input(a.reference));
  const DefaultTolerance d = default_tolerance(ref.dtype);
  const ToleranceTuple tol{a.atol.value_or(0.0), a.rtol.value_or(d.rtol),
                           a.matched_ratio.value_or(d.matched_ratio)};
  const Verdict v = compare_outputs(cand, ref, tol);
  OrderedJson j;
  j["correct"] = v.correct;
  j["matched_fraction"] = v.matched_fraction;
  j["reject_reason"] =
      v.reject_reason ? OrderedJson(std::string(reject_reason_name(*v.reject_reason))) : OrderedJson(nullptr);
  j["tolerance"] = {{"atol", tol.atol}, {"rtol", tol.rtol}, {"matched_ratio", tol.matched_ratio}};
  write_output(a.out, jsonu::dump(j));
  return v.correct ? kOk : kFailed;
}

int run_calibrate(const std::string& input, const std::string& dtype_name, double floor,
                  const std::string& out) {
  const Json doc = jsonu::parse_document(read_input(input), input);
  const Json& samples_json = doc.is_object() ? jsonu::require(doc, "samples", "") : doc;
  const std::vector<double> samples = number_list(samples_json, "samples");
  auto dtype = parse_dtype(dtype_name);
  if (!dtype) throw Error(ErrorKind::kUnknownPrecision, "unknown dtype '" + dtype_name + "'");
  const ToleranceTuple t = calibrate_tolerance(samples, *dtype, floor);
  OrderedJson j{{"atol", t.atol}, {"rtol", t.rtol}, {"matched_ratio", t.matched_ratio}};
  write_output(out, jsonu::dump(j));
  return kOk;
}

// ---- audit ---------------------------------------------------------------

struct AuditArgs {
  std::vector<std::string> paths;
  std::string rules;
  std::string precision;
  std::size_t min_blob_chars = 64;
  std::string out;
};

// Files of one submission, keyed by path. Directories are walked in sorted
// order.
std::map<std::string, std::string> collect_sources(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path == "-") {
    out["-"] = read_input("-");
    return out;
  }
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out[f.generic_string()] = read_input(f.string());
    return out;
  }
  out[path] = read_input(path);
  return out;
}

int run_audit(const AuditArgs& a) {
  const RuleSet rules = parse_rules(read_input(a.rules));
  std::optional<DType> precision;
  if (!a.precision.empty()) {
    precision = parse_dtype(a.precision);
    if (!precision) throw Error(ErrorKind::kUnknownPrecision, "unknown precision '" + a.precision + "'");
  }
  std::vector<std::string> paths = a.paths;
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

  std::string text;
  bool reject = false;
  for (const auto& p : paths) {
    const auto sources = collect_sources(p);
    auto findings = scan_submission(sources, rules, precision);
    auto blobs = detect_embedded_binary(sources, a.min_blob_chars, default_binary_magics(), &rules);
    findings.insert(findings.end(), blobs.begin(), blobs.end());
    std::stable_sort(findings.begin(), findings.end(), [](const AuditFinding& x, const AuditFinding& y) {
      return std::tie(x.file, x.line, x.rule_id) < std::tie(y.file, y.line, y.rule_id);
    });
    for (const auto& f : findings) {
      OrderedJson j;
      j["submission"] = p;
      const OrderedJson body = finding_to_json(f);
      for (const auto& [k, v] : body.items()) j[k] = v;
      text += j.dump() + "\n";
      if (f.severity == Severity::kReject) reject = true;
    }
  }
  write_output(a.out, text);
  return reject ? kRejected : kOk;
}

// ---- report --------------------------------------------------------------

struct ReportArgs {
  std::string input;
  std::string format = "json";
  std::string plot;
  std::uint64_t total = 0;
  std::string out;
};

int run_report(const ReportArgs& a) {
  const std::string text = read_input(a.input);
  if (!a.plot.empty()) {
    auto kind = parse_plot_kind(a.plot);
    if (!kind) throw Error(ErrorKind::kInvalidValue, "unknown plot kind '" + a.plot + "'");
    if (*kind == PlotKind::kExploitDistribution) {
      // Input: audit findings as JSON Lines, grouped by their submission.
      std::map<std::string, std::vector<AuditFinding>> by_submission;
      std::size_t line_no = 0, start = 0;
      while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(start, end - start);
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          try {
            const Json j = jsonu::parse_document(line, "finding");
            std::string sub = j.value("submission", std::string());
            if (sub.empty()) sub = jsonu::require_string(j, "file", "");
            by_submission[sub].push_back(finding_from_json(j));
          } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
          }
        }
        start = end + 1;
      }
      std::vector<std::vector<AuditFinding>> lists;
      for (auto& [s, f] : by_submission) lists.push_back(std::move(f));
      const std::uint64_t total = a.total != 0 ? a.total : lists.size();
      write_output(a.out, emit_plot_data(exploit_distribution(lists, total)));
      return kOk;
    }
    const auto records = parse_records(text);
    write_output(a.out, emit_plot_data(records, *kind));
    return kOk;
  }
  const auto records = parse_records(text);
  const Leaderboard lb = aggregate_leaderboard(records);
  if (a.format == "csv") {
    write_output(a.out, leaderboard_csv(lb));
  } else if (a.format == "text") {
    write_output(a.out, leaderboard_text(lb));
  } else {
    write_output(a.out, jsonu::dump(leaderboard_json(lb)));
  }
  return kOk;
}

// ---- contour -------------------------------------------------------------

struct ContourArgs {
  double t_sol = 0;
  double t_b = 0;
  std::vector<double> scores{0.5, 0.7, 0.9};
  std::size_t samples = 50;
  std::optional<double> t_ref_min, t_ref_max;
  std::string out;
};

int run_contour(const ContourArgs& a) {
  std::vector<double> scores = a.scores;
  std::sort(scores.begin(), scores.end());
  std::ostringstream os;
  os << "# kind: iso_score_contour\n# x: speedup (log scale)\n# y: sol_distance (log scale)\n";
  os << "# t_sol: " << format_number(a.t_sol) << "\n# t_b: " << format_number(a.t_b) << "\n";
  os << "score,t_ref,t_k,speedup,sol_distance\n";
  for (double s : scores) {
    const double t_k = runtime_for_score(a.t_sol, a.t_b, s);
    for (const auto& p : iso_score_contour(a.t_sol, a.t_b, s, a.samples, a.t_ref_min, a.t_ref_max)) {
      os << format_number(s) << ',' << format_number(p.t_ref) << ',' << format_number(t_k) << ','
         << format_number(p.speedup) << ',' << format_number(p.sol_distance) << '\n';
    }
  }
  write_output(a.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solbound: speed-of-light bounds, scoring and audit for GPU kernels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "solbound 0.1.0");

  const auto on_off_check = CLI::IsMember({"on", "off"});
  std::function<int()> action;

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "FLOPs, fused bytes and SOL time of a graph or problem");
  analyze->add_option("input", an.input, "graph or problem file ('-' for stdin)")->required();
  analyze->add_option("--hw", an.hw, "hardware spec file (searched in SOLBOUND_HW_DIR)")->required();
  analyze->add_option("--workloads", an.workloads, "workload JSON Lines file (problem input only)");
  analyze->add_option("--dtype", an.dtype, "precision used for the compute peak (default: graph precision)");
  analyze->add_option("--prefetch-weights", an.prefetch, "exclude weights from traffic: on|off")
      ->check(on_off_check)
      ->default_val("on");
  analyze->add_option("--scale-overhead", an.scale_overhead, "count block-scale bytes: on|off")
      ->check(on_off_check)
      ->default_val("off");
  analyze->add_flag("--tighten", an.tighten, "add the buffer-aware traffic-bound report");
  analyze->add_option("--format", an.format, "json|text")->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--out", an.out, "output path or '-'");
  analyze->callback([&] { action = [&] { return run_analyze(an); }; });

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "score timing logs against SOL bounds and baselines");
  score->add_option("--timings", sc.timings, "timing log JSON Lines ('-' for stdin)")->required();
  score->add_option("--bounds", sc.bounds, "per-problem bounds file")->required();
  score->add_option("--baselines", sc.baselines, "per-problem baseline runtimes file");
  score->add_option("--out", sc.out, "output path or '-'");
  score->callback([&] { action = [&] { return run_score(sc); }; });

  std::string v_input, v_workloads, v_out;
  auto* validate = app.add_subcommand("validate", "check a problem (with workloads) or graph file");
  validate->add_option("input", v_input, "problem or graph file ('-' for stdin)")->required();
  validate->add_option("--workloads", v_workloads, "workload JSON Lines file");
  validate->add_option("--out", v_out, "output path or '-'");
  validate->callback([&] { action = [&] { return run_validate(v_input, v_workloads, v_out); }; });

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "check a candidate output against the reference");
  compare->add_option("candidate", cmp.candidate, "candidate TensorData file")->required();
  compare->add_option("reference", cmp.reference, "reference TensorData file")->required();
  compare->add_option("--atol", cmp.atol, "absolute tolerance (default 0)");
  compare->add_option("--rtol", cmp.rtol, "relative tolerance (default per dtype)");
  compare->add_option("--matched-ratio", cmp.matched_ratio, "required matched fraction (default per dtype)");
  compare->add_option("--out", cmp.out, "output path or '-'");
  compare->callback([&] { action = [&] { return run_compare(cmp); }; });

  std::string cal_input, cal_dtype, cal_out;
  double cal_floor = 0;
  auto* calibrate = app.add_subcommand("calibrate", "derive a tolerance tuple from deviation samples");
  calibrate->add_option("input", cal_input, "JSON array of deviations, or {\"samples\": [...]}")->required();
  calibrate->add_option("--dtype", cal_dtype, "output dtype")->required();
  calibrate->add_option("--floor", cal_floor, "minimum atol (default 0)");
  calibrate->add_option("--out", cal_out, "output path or '-'");
  calibrate->callback([&] { action = [&] { return run_calibrate(cal_input, cal_dtype, cal_floor, cal_out); }; });

  AuditArgs au;
  auto* audit = app.add_subcommand("audit", "scan submission sources for reward-hacking patterns");
  audit->add_option("paths", au.paths, "submission files or directories")->required();
  audit->add_option("--rules", au.rules, "rule file")->required();
  audit->add_option("--precision", au.precision, "declared problem precision");
  audit->add_option("--min-blob-chars", au.min_blob_chars, "shortest base64 run inspected (>= 64)");
  audit->add_option("--out", au.out, "output path or '-'");
  audit->callback([&] { action = [&] { return run_audit(au); }; });

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "leaderboard and plot data from scored results");
  report->add_option("input", rp.input, "scored records (or findings for exploit_distribution)")->required();
  report->add_option("--format", rp.format, "json|csv|text")->check(CLI::IsMember({"json", "csv", "text"}));
  report->add_option("--plot", rp.plot,
                     "speedup_vs_soldist|score_landscape|score_vs_headroom|exploit_distribution");
  report->add_option("--total", rp.total, "submission count for exploit_distribution");
  report->add_option("--out", rp.out, "output path or '-'");
  report->callback([&] { action = [&] { return run_report(rp); }; });

  ContourArgs ct;
  auto* contour = app.add_subcommand("contour", "iso-score contour points");
  contour->add_option("--t-sol", ct.t_sol, "SOL runtime")->required();
  contour->add_option("--t-b", ct.t_b, "baseline runtime")->required();
  contour->add_option("--score", ct.scores, "score levels in (0, 1] (default 0.5 0.7 0.9)");
  contour->add_option("--samples", ct.samples, "points per level");
  contour->add_option("--t-ref-min", ct.t_ref_min, "smallest reference runtime (default t_sol)");
  contour->add_option("--t-ref-max", ct.t_ref_max, "largest reference runtime (default 1000 t_sol)");
  contour->add_option("--out", ct.out, "output path or '-'");
  contour->callback([&] { action = [&] { return run_contour(ct); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return kInputError;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
