#pragma once
// FLOP and fused-traffic accounting over an einsum graph.
//
// FLOP convention: a contraction with k operands costs k FLOPs per point of
// its iteration space ((k-1) multiplies and one accumulate), so a binary
// contraction is the usual 2 FLOPs per multiply-accumulate. The whole graph
// is treated as one fused region: only graph-external tensors move through
// DRAM.

#include <cstdint>
#include <map>
#include <string>

#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"

namespace solbound {

struct CostBreakdown {
  std::map<std::string, std::uint64_t> per_node_flops;
  std::uint64_t total_flops = 0;
  std::uint64_t external_bytes = 0;
  std::uint64_t intermediate_bytes = 0;
  std::uint64_t prefetch_excluded_bytes = 0;
};

struct ByteOptions {
  bool prefetch_weights = true;
  bool scale_overhead = false;
};

std::uint64_t node_flops(const EinsumNode& node, const EinsumGraph& graph);

// Populates per_node_flops and total_flops in topological order.
CostBreakdown graph_flops(const EinsumGraph& graph);

// Populates the byte fields of `into` (a fresh breakdown when omitted).
CostBreakdown fused_bytes(const EinsumGraph& graph, ByteOptions opts, CostBreakdown into = {});

// Both halves at once.
CostBreakdown analyze_cost(const EinsumGraph& graph, ByteOptions opts);

// flops / bytes. Throws kDivisionByZero when bytes == 0; callers should
// report the intensity as unbounded in that case.
double arithmetic_intensity(std::uint64_t flops, std::uint64_t bytes);

// Integer fields stay integers; `arithmetic_intensity` is added as a real
// field, or the string "unbounded" when there is no external traffic.
jsonu::OrderedJson cost_to_json(const CostBreakdown& cost);

}  // namespace solbound
