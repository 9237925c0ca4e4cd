#pragma once
// Replay of the benchmark harness over recorded data: runtime aggregation,
// tolerance calibration and output comparison. No device execution happens
// here; the GPU-side protocol lives on only as constants used to check logs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solbound/ir.hpp"
#include "solbound/specs_io.hpp"

namespace solbound {

// Measurement protocol of the recorded logs.
namespace protocol {
inline constexpr std::uint64_t kWarmupIterations = 10;
inline constexpr std::uint64_t kTimedIterations = 50;
inline constexpr std::uint64_t kTrials = 3;
inline constexpr std::uint64_t kL2FlushBytes = 256ull << 20;
inline constexpr std::uint64_t kAllocatorShiftBytes = 256;
inline constexpr double kLockedClockMhzB200 = 1500.0;
inline constexpr double kToleranceSafetyMargin = 1.25;
}  // namespace protocol

// Per-trial statistic: mean of the trial's timed iterations. Reported
// runtime: mean of the per-trial statistics. Values are summed in sorted
// order so the result does not depend on sample order.
double trial_statistic(std::span<const double> samples);
double aggregate_runtime(const TimingLog& log);

// True when the log follows the full protocol (10 warmup, 50 timed, 3 trials).
bool follows_full_protocol(const TimingLog& log);

struct DefaultTolerance {
  double rtol;
  double matched_ratio;
};
DefaultTolerance default_tolerance(DType dtype);

// atol = max(1.25 * max(samples), floor); rtol and matched ratio from the
// per-dtype defaults.
ToleranceTuple calibrate_tolerance(std::span<const double> deviation_samples, DType dtype,
                                   double floor);

struct TensorData {
  Shape shape;
  DType dtype = DType::kFP32;
  std::vector<double> values;  // row-major, already decoded
};

enum class RejectReason { kShapeMismatch, kDtypeMismatch, kNonfinite, kDegenerateZero };
std::string_view reject_reason_name(RejectReason r);

struct Verdict {
  bool correct = false;
  double matched_fraction = 0;
  std::optional<RejectReason> reject_reason;
};

// Checks in order: shape, dtype, non-finite values (either side), an all-zero
// candidate against a reference with some |v| > atol, then elementwise
// |c - r| <= atol + rtol * |r| with C = matched_fraction >= matched_ratio.
Verdict compare_outputs(const TensorData& candidate, const TensorData& reference,
                        const ToleranceTuple& tol);

// TensorData file: {"shape": [...], "dtype": "...", "encoding": "inline" |
// "base64", "data": [...] | "<base64>"}. base64 payloads are little-endian raw
// element bytes (nvfp4: two e2m1 codes per byte, low nibble first).
TensorData parse_tensor_data(std::string_view text);
std::string serialize_tensor_data(const TensorData& t, std::string_view encoding);

}  // namespace solbound
