#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "solbound/cost_model.hpp"
#include "solbound/error.hpp"
#include "solbound/specs_io.hpp"

using namespace solbound;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kParse;
}

const char* kMinimalL1 = R"({
  "name": "tiny_matmul",
  "category": "L1",
  "op_type": "gemm",
  "domain": "llm",
  "direction": "forward",
  "precision": "fp32",
  "axes": [{"name": "B", "kind": "var"}, {"name": "H", "kind": "const", "const_value": 2560}],
  "tensors": [
    {"name": "x", "shape": ["B", "H"], "dtype": "fp32", "role": "input"},
    {"name": "w", "shape": ["H", "H"], "dtype": "fp32", "role": "weight"},
    {"name": "y", "shape": ["B", "H"], "dtype": "fp32", "role": "output"}
  ],
  "nodes": [{"id": "mm", "kind": "contraction", "inputs": ["x", "w"], "input_specs": ["bk", "kn"],
             "output": "y", "output_spec": "bn"}],
  "vendor_notes": {"kept": true}
})";

ProblemSpec expr_chain(bool reversed) {
  ProblemSpec p = parse_problem(kMinimalL1);
  AxisDecl half{"half", AxisKind::kExpr, std::nullopt, "H / 2"};
  AxisDecl quarter{"quarter", AxisKind::kExpr, std::nullopt, "half / 2"};
  if (reversed) {
    p.axes.insert(p.axes.begin(), {quarter, half});
  } else {
    p.axes.push_back(half);
    p.axes.push_back(quarter);
  }
  return p;
}

}  // namespace

TEST_CASE("minimal problem parses") {
  const ProblemSpec p = parse_problem(kMinimalL1);
  CHECK(p.axes.size() == 2);
  CHECK(p.nodes.size() == 1);
  CHECK(p.category == Category::kL1);
  CHECK(p.op_type == OpType::kGemm);
  CHECK(p.extra.contains("vendor_notes"));
  const std::string canon = serialize_problem(p);
  CHECK(serialize_problem(parse_problem(canon)) == canon);
  CHECK(canon.find("vendor_notes") != std::string::npos);
}

TEST_CASE("shipped problem files are canonical") {
  for (const char* f : {"problems/o_proj_residual.json", "problems/rmsnorm.json"}) {
    const std::string text = fixtures::read(f);
    CHECK(serialize_problem(parse_problem(text)) == text);
  }
}

TEST_CASE("problem errors") {
  std::string no_axes = kMinimalL1;
  no_axes.replace(no_axes.find("\"axes\""), 6, "\"axis_list\"");
  try {
    parse_problem(no_axes);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingField);
    CHECK(std::string(e.what()).find("axes") != std::string::npos);
  }
  std::string bad_cat = kMinimalL1;
  bad_cat.replace(bad_cat.find("\"L1\""), 4, "\"L9\"");
  CHECK(kind_of([&] { parse_problem(bad_cat); }) == ErrorKind::kInvalidValue);

  std::string fib = kMinimalL1;
  fib.replace(fib.find("\"L1\""), 4, "\"FIB\"");
  fib.replace(fib.find("\"gemm\""), 6, "\"attention\"");
  CHECK(parse_problem(fib).category == Category::kFIB);

  std::string unknown_axis = kMinimalL1;
  unknown_axis.replace(unknown_axis.find("[\"B\", \"H\"]"), 10, "[\"B\", \"Q\"]");
  CHECK_THROWS_AS(parse_problem(unknown_axis), Error);

  CHECK(kind_of([] { parse_problem("{\"name\": "); }) == ErrorKind::kParse);
}

TEST_CASE("axis expressions") {
  CHECK(eval_axis_expr("heads*head_dim", {{"heads", 8}, {"head_dim", 64}}) == 512);
  CHECK(eval_axis_expr("(hidden)/(heads)", {{"hidden", 2560}, {"heads", 8}}) == 320);
  CHECK(eval_axis_expr(" 2 + 3 * 4 ", {}) == 14);
  CHECK(eval_axis_expr("(2 + 3) * 4", {}) == 20);
  CHECK(eval_axis_expr("10 - 4 - 3", {}) == 3);
  CHECK(eval_axis_expr("64 / 4 / 2", {}) == 8);
  CHECK(kind_of([] { eval_axis_expr("seq-1", {{"seq", 1}}); }) == ErrorKind::kInvalidValue);
  CHECK(kind_of([] { eval_axis_expr("7/2", {}); }) == ErrorKind::kInvalidValue);
  CHECK(kind_of([] { eval_axis_expr("x", {}); }) == ErrorKind::kInconsistentBinding);
  CHECK(kind_of([] { eval_axis_expr("-3", {}); }) == ErrorKind::kParse);
  CHECK(kind_of([] { eval_axis_expr("2 *", {}); }) == ErrorKind::kParse);
  CHECK(kind_of([] { eval_axis_expr("(2", {}); }) == ErrorKind::kParse);
  CHECK(kind_of([] { eval_axis_expr("4/(2-2)", {}); }) == ErrorKind::kDivisionByZero);
  CHECK(kind_of([] { eval_axis_expr("4294967296*4294967296", {}); }) == ErrorKind::kInvalidValue);
  try {
    eval_axis_expr("2 + $", {});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
  CHECK(expr_identifiers("a*b + a/c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("axis expressions agree with an independent evaluator") {
  std::mt19937_64 rng(1234);
  int evaluated = 0;
  for (int i = 0; i < 1000; ++i) {
    const oracle::ExprCase c = oracle::random_expression(rng);
    INFO(c.text);
    if (c.expected) {
      CHECK(eval_axis_expr(c.text, c.env) == static_cast<std::uint64_t>(*c.expected));
      ++evaluated;
    } else {
      CHECK_THROWS_AS(eval_axis_expr(c.text, c.env), Error);
    }
  }
  CHECK(evaluated > 200);
}

TEST_CASE("binding axes") {
  const ProblemSpec p = parse_problem(fixtures::read("problems/o_proj_residual.json"));
  const auto workloads = parse_workloads(fixtures::read("problems/o_proj_residual.workloads.jsonl"));
  REQUIRE(workloads.size() == 16);
  const EinsumGraph g = bind_axes(p, workloads[11]);
  CHECK(g.tensors.at("attn_output").shape == Shape{16, 512, 2560});
  CHECK(g.tensors.at("weight").shape == Shape{2560, 2560});
  CHECK(graph_flops(g).total_flops == 107395153920ull);

  Workload missing;
  missing.bindings = {{"batch", 1}};
  CHECK(kind_of([&] { bind_axes(p, missing); }) == ErrorKind::kMissingField);
  Workload binds_const = workloads[0];
  binds_const.bindings["heads"] = 4;
  CHECK(kind_of([&] { bind_axes(p, binds_const); }) == ErrorKind::kInvalidValue);
}

TEST_CASE("expr axes resolve in dependency order regardless of declaration order") {
  Workload w;
  w.bindings = {{"B", 3}};
  for (bool reversed : {false, true}) {
    const auto env = resolve_axes(expr_chain(reversed), w);
    CHECK(env.at("half") == 1280);
    CHECK(env.at("quarter") == 640);
  }
  ProblemSpec cyclic = parse_problem(kMinimalL1);
  cyclic.axes.push_back({"p", AxisKind::kExpr, std::nullopt, "q + 1"});
  cyclic.axes.push_back({"q", AxisKind::kExpr, std::nullopt, "p + 1"});
  CHECK(kind_of([&] { resolve_axes(cyclic, w); }) == ErrorKind::kCycle);
}

TEST_CASE("workload files") {
  CHECK(parse_workloads("").empty());
  CHECK(parse_workloads("\n\n").empty());
  const std::string bad = "{\"bindings\": {\"B\": 1}, \"tolerance\": {\"atol\": 0, \"rtol\": 0, \"matched_ratio\": 1}}\n"
                          "{\"bindings\": {\"B\": 2}, \"tolerance\": {\"atol\": 0, \"rtol\": 0, \"matched_ratio\": 1.5}}\n";
  try {
    parse_workloads(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("line 2:", 0) == 0);
  }
  const auto ws = parse_workloads(fixtures::read("problems/o_proj_residual.workloads.jsonl"));
  std::string again;
  for (const auto& w : ws) again += serialize_workload(w);
  CHECK(again == fixtures::read("problems/o_proj_residual.workloads.jsonl"));
}

TEST_CASE("timing logs") {
  auto record = [](int trials, int samples, int timed) {
    std::string t = "[";
    for (int i = 0; i < trials; ++i) {
      t += i ? ",[" : "[";
      for (int j = 0; j < samples; ++j) t += (j ? ",1.0" : "1.0");
      t += "]";
    }
    t += "]";
    return "{\"problem\": \"p\", \"workload_index\": 0, \"candidate_id\": \"c\", \"trials\": " + t +
           ", \"warmup_count\": 10, \"timed_count\": " + std::to_string(timed) + "}";
  };
  CHECK(parse_timing_log(record(3, 50, 50)).size() == 1);
  CHECK_THROWS_AS(parse_timing_log(record(3, 49, 50)), Error);
  CHECK(parse_timing_log(record(1, 1, 1)).size() == 1);
  const auto logs = parse_timing_log(fixtures::read("harness/timing_fixture.jsonl"));
  REQUIRE(logs.size() == 1);
  CHECK(parse_timing_log(serialize_timing_log(logs[0]))[0].trials == logs[0].trials);
}
