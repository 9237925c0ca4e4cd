#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "solbound/cost_model.hpp"
#include "solbound/error.hpp"
#include "solbound/graph_io.hpp"

using namespace solbound;

namespace {

EinsumGraph projection() { return parse_graph(fixtures::read("fixtures/projection.graph.json")); }

EinsumGraph add_graph(int copies) {
  EinsumGraph g;
  for (int i = 0; i < copies; ++i) {
    const std::string s = std::to_string(i);
    for (const auto& [name, role] : {std::pair{"a" + s, TensorRole::kInput}, {"b" + s, TensorRole::kInput},
                                     {"c" + s, TensorRole::kOutput}}) {
      g.tensors[name] = TensorDecl{name, {2, 3}, {DType::kFP32, {}}, role};
    }
    EinsumNode n;
    n.id = "add" + s;
    n.kind = NodeKind::kElementwise;
    n.op = "add";
    n.elementwise_cost = 1;
    n.inputs = {"a" + s, "b" + s};
    n.input_specs = {"ij", "ij"};
    n.output = "c" + s;
    n.output_spec = "ij";
    g.nodes.push_back(n);
  }
  return g;
}

}  // namespace

TEST_CASE("node FLOPs") {
  const EinsumGraph g = projection();
  CHECK(node_flops(*g.find_node("matmul"), g) == 107374182400ull);
  CHECK(node_flops(*g.find_node("add"), g) == 20971520ull);
  const EinsumGraph adds = add_graph(1);
  CHECK(node_flops(adds.nodes[0], adds) == 6);

  EinsumGraph perm;
  perm.tensors["x"] = TensorDecl{"x", {5, 7}, {}, TensorRole::kInput};
  perm.tensors["y"] = TensorDecl{"y", {7, 5}, {}, TensorRole::kOutput};
  EinsumNode t;
  t.id = "t";
  t.kind = NodeKind::kPermutation;
  t.inputs = {"x"};
  t.input_specs = {"AB"};
  t.output = "y";
  t.output_spec = "BA";
  perm.nodes.push_back(t);
  CHECK(node_flops(perm.nodes[0], perm) == 0);
}

TEST_CASE("graph FLOPs") {
  const CostBreakdown c = graph_flops(projection());
  CHECK(c.total_flops == 107395153920ull);
  CHECK(c.per_node_flops.at("matmul") == 107374182400ull);
  CHECK(c.per_node_flops.at("add") == 20971520ull);
  CHECK(graph_flops(EinsumGraph{}).total_flops == 0);
  CHECK(graph_flops(add_graph(2)).total_flops == 12);
}

TEST_CASE("unbound letter is an inconsistent binding") {
  EinsumGraph g = projection();
  g.nodes[1].input_specs[0] = "AC";
  try {
    node_flops(g.nodes[1], g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInconsistentBinding);
  }
}

TEST_CASE("fused bytes") {
  const EinsumGraph g = projection();
  const CostBreakdown on = fused_bytes(g, ByteOptions{true, false});
  CHECK(on.external_bytes == 125829120ull);
  CHECK(on.prefetch_excluded_bytes == 13107200ull);
  CHECK(on.intermediate_bytes == 41943040ull);
  const CostBreakdown off = fused_bytes(g, ByteOptions{false, false});
  CHECK(off.external_bytes == 138936320ull);
  CHECK(off.prefetch_excluded_bytes == 0);

  EinsumGraph empty;
  CHECK(fused_bytes(empty, ByteOptions{}).external_bytes == 0);
}

TEST_CASE("scale overhead only when requested") {
  EinsumGraph g;
  g.tensors["q"] = TensorDecl{"q", {64}, {DType::kNVFP4, ScaleBlock{16, 8}}, TensorRole::kInput};
  g.tensors["o"] = TensorDecl{"o", {64}, {DType::kNVFP4, ScaleBlock{16, 8}}, TensorRole::kOutput};
  EinsumNode n;
  n.id = "copy";
  n.kind = NodeKind::kElementwise;
  n.inputs = {"q"};
  n.input_specs = {"i"};
  n.output = "o";
  n.output_spec = "i";
  g.nodes.push_back(n);
  CHECK(fused_bytes(g, ByteOptions{true, false}).external_bytes == 64);
  CHECK(fused_bytes(g, ByteOptions{true, true}).external_bytes == 72);
}

TEST_CASE("MIXED among counted tensors is unsupported") {
  EinsumGraph g = projection();
  g.tensors["residual"].dtype = ElementType{DType::kMIXED, {}};
  try {
    fused_bytes(g, ByteOptions{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedType);
  }
}

TEST_CASE("arithmetic intensity") {
  CHECK(arithmetic_intensity(107395153920ull, 125829120ull) == 853.5);
  CHECK(arithmetic_intensity(0, 100) == 0.0);
  try {
    arithmetic_intensity(100, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDivisionByZero);
    CHECK(std::string(e.what()).find("unbounded") != std::string::npos);
  }
  CostBreakdown c;
  c.total_flops = 10;
  CHECK(cost_to_json(c)["arithmetic_intensity"] == "unbounded");
}

TEST_CASE("analytic FLOPs match iteration-space enumeration") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const EinsumGraph g = oracle::random_graph(rng, 3, 6);
    INFO(serialize_graph(g));
    CHECK(graph_flops(g).total_flops == oracle::brute_force_flops(g));
  }
}

TEST_CASE("byte accounting properties on random graphs") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const EinsumGraph g = oracle::random_graph(rng, 3, 6);
    const auto on = fused_bytes(g, ByteOptions{true, false});
    const auto off = fused_bytes(g, ByteOptions{false, false});
    CHECK(off.external_bytes == on.external_bytes + on.prefetch_excluded_bytes);
    std::uint64_t expect = 0;
    for (const auto& [name, t] : g.tensors) {
      if (t.role == TensorRole::kInput || t.role == TensorRole::kOutput) expect += tensor_bytes(t, false);
    }
    CHECK(on.external_bytes == expect);
  }
}
