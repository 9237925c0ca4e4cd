#include "solbound/cost_model.hpp"

#include "solbound/error.hpp"

namespace solbound {

namespace {

std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b, const std::string& where) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::kInvalidValue, where + ": FLOP count overflows 64 bits");
  }
  return out;
}

std::uint64_t add_checked(std::uint64_t a, std::uint64_t b, const std::string& where) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorKind::kInvalidValue, where + ": total overflows 64 bits");
  }
  return out;
}

}  // namespace

std::uint64_t node_flops(const EinsumNode& node, const EinsumGraph& graph) {
  const auto binding = bind_node_letters(node, graph);
  const std::string where = "node '" + node.id + "'";

  switch (node.kind) {
    case NodeKind::kContraction: {
      std::uint64_t points = 1;
      for (const auto& [letter, extent] : binding) points = mul_checked(points, extent, where);
      return mul_checked(points, node.inputs.size(), where);
    }
    case NodeKind::kElementwise: {
      const TensorDecl* out = graph.find_tensor(node.output);
      return mul_checked(out->numel(), node.elementwise_cost, where);
    }
    case NodeKind::kReduction: {
      const TensorDecl* in = graph.find_tensor(node.inputs.at(0));
      return in->numel();
    }
    case NodeKind::kPermutation:
      return 0;
  }
  return 0;
}

CostBreakdown graph_flops(const EinsumGraph& graph) {
  CostBreakdown cost;
  for (const auto& id : topological_order(graph)) {
    const EinsumNode* node = graph.find_node(id);
    const std::uint64_t f = node_flops(*node, graph);
    cost.per_node_flops[id] = f;
    cost.total_flops = add_checked(cost.total_flops, f, "graph");
  }
  return cost;
}

CostBreakdown fused_bytes(const EinsumGraph& graph, ByteOptions opts, CostBreakdown into) {
  into.external_bytes = 0;
  into.intermediate_bytes = 0;
  into.prefetch_excluded_bytes = 0;
  for (const auto& [name, t] : graph.tensors) {
    const std::uint64_t b = tensor_bytes(t, opts.scale_overhead);
    switch (t.role) {
      case TensorRole::kInput:
      case TensorRole::kOutput:
        into.external_bytes = add_checked(into.external_bytes, b, "external bytes");
        break;
      case TensorRole::kWeight:
        if (opts.prefetch_weights) {
          into.prefetch_excluded_bytes = add_checked(into.prefetch_excluded_bytes, b, "weights");
        } else {
          into.external_bytes = add_checked(into.external_bytes, b, "external bytes");
        }
        break;
      case TensorRole::kIntermediate:
        into.intermediate_bytes = add_checked(into.intermediate_bytes, b, "intermediates");
        break;
    }
  }
  return into;
}

CostBreakdown analyze_cost(const EinsumGraph& graph, ByteOptions opts) {
  return fused_bytes(graph, opts, graph_flops(graph));
}

double arithmetic_intensity(std::uint64_t flops, std::uint64_t bytes) {
  if (bytes == 0) {
    throw Error(ErrorKind::kDivisionByZero,
                "arithmetic intensity with zero bytes; report it as unbounded intensity");
  }
  return static_cast<double>(flops) / static_cast<double>(bytes);
}

jsonu::OrderedJson cost_to_json(const CostBreakdown& cost) {
  jsonu::OrderedJson j;
  jsonu::OrderedJson per = jsonu::OrderedJson::object();
  for (const auto& [id, f] : cost.per_node_flops) per[id] = f;
  j["per_node_flops"] = std::move(per);
  j["total_flops"] = cost.total_flops;
  j["external_bytes"] = cost.external_bytes;
  j["intermediate_bytes"] = cost.intermediate_bytes;
  j["prefetch_excluded_bytes"] = cost.prefetch_excluded_bytes;
  if (cost.external_bytes == 0) {
    j["arithmetic_intensity"] = "unbounded";
  } else {
    j["arithmetic_intensity"] = arithmetic_intensity(cost.total_flops, cost.external_bytes);
  }
  return j;
}

}  // namespace solbound
