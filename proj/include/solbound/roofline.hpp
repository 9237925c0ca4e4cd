#pragma once
// Roofline bound: T_sol = max(flops / peak, bytes / bandwidth).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "solbound/cost_model.hpp"
#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"

namespace solbound {

struct HardwareSpec {
  std::string name;
  double reference_clock_mhz = 0;
  double locked_clock_mhz = 0;
  std::map<std::string, double> peak_flops_by_dtype;  // at reference clock
  double dram_bandwidth_bytes_per_s = 0;
  std::uint64_t dram_capacity_bytes = 0;
  std::uint64_t on_chip_buffer_bytes = 0;
  std::map<std::string, std::string> provenance;
};

enum class Bottleneck { kCompute, kMemory, kBalanced };
std::string_view bottleneck_name(Bottleneck b);

// Which term set memory_time in a tightened report.
enum class MemoryTerm { kExternalBytes, kTrafficBound };

struct SolReport {
  std::uint64_t flops = 0;
  std::uint64_t external_bytes = 0;
  std::optional<double> intensity;  // nullopt when external_bytes == 0
  double compute_time_s = 0;
  double memory_time_s = 0;
  double sol_time_s = 0;
  Bottleneck bottleneck = Bottleneck::kCompute;
  std::string dtype_used;
  // Tightened reports only.
  std::optional<MemoryTerm> memory_term;
  std::optional<double> traffic_bound_bytes;
};

HardwareSpec parse_hardware_spec(std::string_view text);
std::string serialize_hardware_spec(const HardwareSpec& spec);

// Compute peak at the locked clock. Bandwidth is never clock-scaled.
double scale_peak(const HardwareSpec& spec, std::string_view dtype);

// Relative tolerance used to call compute and memory time balanced.
inline constexpr double kBalancedRelEps = 1e-9;

SolReport sol_time(const CostBreakdown& cost, const HardwareSpec& spec, std::string_view dtype);

// Classical GEMM I/O lower bound in words,
//   max(m*k + k*n + m*n, 2*m*n*k / sqrt(buffer_words)),
// scaled by bytes_per_word. Stands in for a full buffer-capacity model.
double contraction_traffic_lower_bound(std::uint64_t m, std::uint64_t n, std::uint64_t k,
                                       std::uint64_t buffer_words, double bytes_per_word);

struct ContractionDims {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
};

// (m, n, k) of the binary contraction with the most FLOPs. Letters shared by
// both operands and the output (batch axes) fold into m. nullopt when the
// graph has no binary contraction.
std::optional<ContractionDims> dominant_contraction_dims(const EinsumGraph& graph);

// sol_time with memory_time = max(external bytes, traffic bound) / bandwidth.
// The buffer is spec.on_chip_buffer_bytes and a word is one element of dtype.
// Throws kMisconfiguration when dims are given but the graph has no
// contraction node.
SolReport tightened_sol_time(const EinsumGraph& graph, const CostBreakdown& cost,
                             const HardwareSpec& spec, std::string_view dtype,
                             std::optional<ContractionDims> dims);

jsonu::OrderedJson sol_report_to_json(const SolReport& report);

}  // namespace solbound
