#include "solbound/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "solbound/error.hpp"

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

std::string_view bottleneck_name(Bottleneck b) {
  switch (b) {
    case Bottleneck::kCompute: return "compute";
    case Bottleneck::kMemory: return "memory";
    case Bottleneck::kBalanced: return "balanced";
  }
  return "compute";
}

namespace {

double positive_number(const Json& doc, std::string_view key) {
  const double v = jsonu::require_number(doc, key, "");
  if (!(v > 0)) {
    throw Error(ErrorKind::kInvalidValue, "field '" + std::string(key) + "' must be positive");
  }
  return v;
}

}  // namespace

HardwareSpec parse_hardware_spec(std::string_view text) {
  const Json doc = jsonu::parse_document(text, "hardware spec");
  HardwareSpec spec;
  spec.name = jsonu::require_string(doc, "name", "");
  spec.reference_clock_mhz = positive_number(doc, "reference_clock_mhz");
  spec.locked_clock_mhz = positive_number(doc, "locked_clock_mhz");
  spec.dram_bandwidth_bytes_per_s = positive_number(doc, "dram_bandwidth_bytes_per_s");
  spec.dram_capacity_bytes = jsonu::require_positive_int(doc, "dram_capacity_bytes", "");
  spec.on_chip_buffer_bytes = jsonu::require_positive_int(doc, "on_chip_buffer_bytes", "");

  const Json& peaks = jsonu::require(doc, "peak_flops_by_dtype", "");
  if (!peaks.is_object() || peaks.empty()) {
    throw Error(ErrorKind::kInvalidValue, "field 'peak_flops_by_dtype' must be a non-empty object");
  }
  for (const auto& [k, v] : peaks.items()) {
    if (!parse_dtype(k) || k == "mixed") {
      throw Error(ErrorKind::kInvalidValue, "field 'peak_flops_by_dtype." + k +
                                                "' names an unknown precision");
    }
    const double p = jsonu::as_number(v, "peak_flops_by_dtype." + k);
    if (!(p > 0)) {
      throw Error(ErrorKind::kInvalidValue,
                  "field 'peak_flops_by_dtype." + k + "' must be positive");
    }
    spec.peak_flops_by_dtype[k] = p;
  }
  if (auto it = doc.find("provenance"); it != doc.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      spec.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return spec;
}

std::string serialize_hardware_spec(const HardwareSpec& spec) {
  OrderedJson j;
  j["name"] = spec.name;
  j["reference_clock_mhz"] = spec.reference_clock_mhz;
  j["locked_clock_mhz"] = spec.locked_clock_mhz;
  OrderedJson peaks = OrderedJson::object();
  for (const auto& [k, v] : spec.peak_flops_by_dtype) peaks[k] = v;
  j["peak_flops_by_dtype"] = std::move(peaks);
  j["dram_bandwidth_bytes_per_s"] = spec.dram_bandwidth_bytes_per_s;
  j["dram_capacity_bytes"] = spec.dram_capacity_bytes;
  j["on_chip_buffer_bytes"] = spec.on_chip_buffer_bytes;
  OrderedJson prov = OrderedJson::object();
  for (const auto& [k, v] : spec.provenance) prov[k] = v;
  j["provenance"] = std::move(prov);
  return jsonu::dump(j);
}

double scale_peak(const HardwareSpec& spec, std::string_view dtype) {
  auto it = spec.peak_flops_by_dtype.find(std::string(dtype));
  if (it == spec.peak_flops_by_dtype.end()) {
    throw Error(ErrorKind::kUnknownPrecision, "hardware spec '" + spec.name +
                                                  "' has no peak throughput for precision '" +
                                                  std::string(dtype) + "'");
  }
  return it->second * spec.locked_clock_mhz / spec.reference_clock_mhz;
}

namespace {

SolReport make_report(std::uint64_t flops, std::uint64_t external_bytes, double peak,
                      double memory_bytes, double bandwidth, std::string_view dtype) {
  SolReport r;
  r.flops = flops;
  r.external_bytes = external_bytes;
  if (external_bytes > 0) r.intensity = arithmetic_intensity(flops, external_bytes);
  r.compute_time_s = static_cast<double>(flops) / peak;
  r.memory_time_s = memory_bytes / bandwidth;
  r.sol_time_s = std::max(r.compute_time_s, r.memory_time_s);
  if (std::fabs(r.compute_time_s - r.memory_time_s) <= kBalancedRelEps * r.sol_time_s) {
    r.bottleneck = Bottleneck::kBalanced;
  } else if (r.compute_time_s > r.memory_time_s) {
    r.bottleneck = Bottleneck::kCompute;
  } else {
    r.bottleneck = Bottleneck::kMemory;
  }
  r.dtype_used = std::string(dtype);
  return r;
}

}  // namespace

SolReport sol_time(const CostBreakdown& cost, const HardwareSpec& spec, std::string_view dtype) {
  if (cost.total_flops == 0 && cost.external_bytes == 0) {
    throw Error(ErrorKind::kDegenerate, "workload has zero FLOPs and zero external bytes");
  }
  return make_report(cost.total_flops, cost.external_bytes, scale_peak(spec, dtype),
                     static_cast<double>(cost.external_bytes), spec.dram_bandwidth_bytes_per_s,
                     dtype);
}

double contraction_traffic_lower_bound(std::uint64_t m, std::uint64_t n, std::uint64_t k,
                                       std::uint64_t buffer_words, double bytes_per_word) {
  if (m == 0 || n == 0 || k == 0 || buffer_words == 0 || !(bytes_per_word > 0)) {
    throw Error(ErrorKind::kInvalidValue, "traffic bound arguments must be positive");
  }
  const double dm = static_cast<double>(m), dn = static_cast<double>(n),
               dk = static_cast<double>(k);
  const double compulsory = dm * dk + dk * dn + dm * dn;
  const double reuse_limited = 2.0 * dm * dn * dk / std::sqrt(static_cast<double>(buffer_words));
  return std::max(compulsory, reuse_limited) * bytes_per_word;
}

std::optional<ContractionDims> dominant_contraction_dims(const EinsumGraph& graph) {
  std::optional<ContractionDims> best;
  std::uint64_t best_flops = 0;
  for (const auto& node : graph.nodes) {
    if (node.kind != NodeKind::kContraction || node.inputs.size() != 2) continue;
    const auto binding = bind_node_letters(node, graph);
    const std::set<char> a(node.input_specs[0].begin(), node.input_specs[0].end());
    const std::set<char> b(node.input_specs[1].begin(), node.input_specs[1].end());
    const std::set<char> out(node.output_spec.begin(), node.output_spec.end());
    ContractionDims d{1, 1, 1};
    for (const auto& [c, extent] : binding) {
      const bool in_a = a.count(c), in_b = b.count(c), in_out = out.count(c);
      if (!in_out) {
        d.k *= extent;
      } else if (in_a && !in_b) {
        d.m *= extent;
      } else if (in_b && !in_a) {
        d.n *= extent;
      } else {
        d.m *= extent;  // batch axis
      }
    }
    const std::uint64_t f = node_flops(node, graph);
    if (!best || f > best_flops) {
      best = d;
      best_flops = f;
    }
  }
  return best;
}

SolReport tightened_sol_time(const EinsumGraph& graph, const CostBreakdown& cost,
                             const HardwareSpec& spec, std::string_view dtype,
                             std::optional<ContractionDims> dims) {
  if (dims) {
    const bool has_contraction =
        std::any_of(graph.nodes.begin(), graph.nodes.end(),
                    [](const EinsumNode& n) { return n.kind == NodeKind::kContraction; });
    if (!has_contraction) {
      throw Error(ErrorKind::kMisconfiguration,
                  "contraction dims given for a graph with no contraction node");
    }
  }
  SolReport base = sol_time(cost, spec, dtype);
  base.memory_term = MemoryTerm::kExternalBytes;
  if (!dims) return base;

  auto dt = parse_dtype(dtype);
  auto bits = dt ? dtype_bits(*dt) : std::nullopt;
  if (!bits) {
    throw Error(ErrorKind::kUnsupportedType,
                "precision '" + std::string(dtype) + "' has no word size");
  }
  const double bytes_per_word = static_cast<double>(*bits) / 8.0;
  const auto buffer_words = static_cast<std::uint64_t>(
      std::max(1.0, std::floor(static_cast<double>(spec.on_chip_buffer_bytes) / bytes_per_word)));
  const double bound =
      contraction_traffic_lower_bound(dims->m, dims->n, dims->k, buffer_words, bytes_per_word);

  const double external = static_cast<double>(cost.external_bytes);
  const bool bound_wins = bound > external;
  SolReport r = make_report(cost.total_flops, cost.external_bytes, scale_peak(spec, dtype),
                            bound_wins ? bound : external, spec.dram_bandwidth_bytes_per_s, dtype);
  r.memory_term = bound_wins ? MemoryTerm::kTrafficBound : MemoryTerm::kExternalBytes;
  r.traffic_bound_bytes = bound;
  return r;
}

OrderedJson sol_report_to_json(const SolReport& r) {
  OrderedJson j;
  j["flops"] = r.flops;
  j["external_bytes"] = r.external_bytes;
  if (r.intensity) {
    j["intensity"] = *r.intensity;
  } else {
    j["intensity"] = "unbounded";
  }
  j["compute_time_s"] = r.compute_time_s;
  j["memory_time_s"] = r.memory_time_s;
  j["sol_time_s"] = r.sol_time_s;
  j["sol_time_ms"] = r.sol_time_s * 1e3;
  j["bottleneck"] = std::string(bottleneck_name(r.bottleneck));
  j["dtype_used"] = r.dtype_used;
  if (r.memory_term) {
    j["memory_term"] =
        *r.memory_term == MemoryTerm::kTrafficBound ? "traffic_bound" : "external_bytes";
  }
  if (r.traffic_bound_bytes) j["traffic_bound_bytes"] = *r.traffic_bound_bytes;
  return j;
}

}  // namespace solbound
