#include "solbound/harness.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>

#include "solbound/base64.hpp"
#include "solbound/error.hpp"
#include "solbound/json_util.hpp"
#include "solbound/kernels.hpp"

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

double trial_statistic(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorKind::kEmpty, "trial has no timed iterations");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (double v : sorted) sum += v;
  return sum / static_cast<double>(sorted.size());
}

double aggregate_runtime(const TimingLog& log) {
  if (log.trials.empty()) throw Error(ErrorKind::kEmpty, "timing log has no trials");
  std::vector<double> per_trial;
  per_trial.reserve(log.trials.size());
  for (const auto& t : log.trials) per_trial.push_back(trial_statistic(t));
  return trial_statistic(per_trial);
}

bool follows_full_protocol(const TimingLog& log) {
  return log.warmup_count == protocol::kWarmupIterations &&
         log.timed_count == protocol::kTimedIterations && log.trials.size() == protocol::kTrials;
}

DefaultTolerance default_tolerance(DType dtype) {
  switch (dtype) {
    case DType::kFP32: return {1e-5, 0.999};
    case DType::kFP16:
    case DType::kBF16: return {1e-2, 0.999};
    case DType::kFP8:
    case DType::kNVFP4: return {5e-2, 0.999};
    case DType::kINT32:
    case DType::kBOOL: return {0.0, 1.0};
    case DType::kMIXED: return {1e-2, 0.999};
  }
  return {1e-5, 0.999};
}

ToleranceTuple calibrate_tolerance(std::span<const double> deviation_samples, DType dtype,
                                   double floor) {
  if (deviation_samples.empty()) {
    throw Error(ErrorKind::kEmpty, "tolerance calibration needs at least one deviation sample");
  }
  if (!(floor >= 0)) throw Error(ErrorKind::kInvalidValue, "tolerance floor must be >= 0");
  double worst = 0;
  for (double s : deviation_samples) {
    if (!(s >= 0) || !std::isfinite(s)) {
      throw Error(ErrorKind::kInvalidValue, "deviation samples must be finite and non-negative");
    }
    worst = std::max(worst, s);
  }
  const auto d = default_tolerance(dtype);
  return ToleranceTuple{std::max(protocol::kToleranceSafetyMargin * worst, floor), d.rtol,
                        d.matched_ratio};
}

std::string_view reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kShapeMismatch: return "shape_mismatch";
    case RejectReason::kDtypeMismatch: return "dtype_mismatch";
    case RejectReason::kNonfinite: return "nonfinite";
    case RejectReason::kDegenerateZero: return "degenerate_zero";
  }
  return "shape_mismatch";
}

Verdict compare_outputs(const TensorData& candidate, const TensorData& reference,
                        const ToleranceTuple& tol) {
  const auto& k = kernels::active_kernels();
  Verdict v;
  if (candidate.shape != reference.shape || candidate.values.size() != reference.values.size()) {
    v.reject_reason = RejectReason::kShapeMismatch;
    return v;
  }
  if (candidate.dtype != reference.dtype) {
    v.reject_reason = RejectReason::kDtypeMismatch;
    return v;
  }
  if (k.any_nonfinite(candidate.values) || k.any_nonfinite(reference.values)) {
    v.reject_reason = RejectReason::kNonfinite;
    return v;
  }
  if (k.all_zero(candidate.values) && k.any_abs_above(reference.values, tol.atol)) {
    v.reject_reason = RejectReason::kDegenerateZero;
    return v;
  }
  const std::uint64_t matched =
      k.count_within_tolerance(candidate.values, reference.values, tol.atol, tol.rtol);
  v.matched_fraction = candidate.values.empty()
                           ? 1.0
                           : static_cast<double>(matched) /
                                 static_cast<double>(candidate.values.size());
  v.correct = v.matched_fraction >= tol.matched_ratio;
  return v;
}

namespace {

// Exhaustive decode tables for the 8-bit and 4-bit float formats.
double decode_e4m3(std::uint8_t code) {
  const int sign = code >> 7;
  const int exp = (code >> 3) & 0xF;
  const int man = code & 0x7;
  if (exp == 0xF && man == 0x7) return std::numeric_limits<double>::quiet_NaN();
  double mag = exp == 0 ? std::ldexp(man / 8.0, -6) : std::ldexp(1.0 + man / 8.0, exp - 7);
  return sign ? -mag : mag;
}

double decode_e2m1(std::uint8_t code) {
  static constexpr std::array<double, 8> kMag{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  const double mag = kMag[code & 0x7];
  return (code & 0x8) ? -mag : mag;
}

// Nearest representable code, ties to the even code; saturates at the
// largest finite magnitude.
template <typename Decode>
std::uint8_t encode_nearest(double v, int codes, Decode decode, std::uint8_t nan_code) {
  if (std::isnan(v)) return nan_code;
  std::uint8_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int c = 0; c < codes; ++c) {
    const double d = decode(static_cast<std::uint8_t>(c));
    if (std::isnan(d)) continue;
    const double err = std::fabs(d - v);
    if (err < best_err || (err == best_err && (c & 1) == 0 && (best & 1) == 1)) {
      best = static_cast<std::uint8_t>(c);
      best_err = err;
    }
  }
  return best;
}

std::size_t payload_bytes(DType d, std::size_t n) {
  switch (d) {
    case DType::kFP32:
    case DType::kINT32: return 4 * n;
    case DType::kFP16:
    case DType::kBF16: return 2 * n;
    case DType::kFP8:
    case DType::kBOOL: return n;
    case DType::kNVFP4: return (n + 1) / 2;
    case DType::kMIXED: break;
  }
  throw Error(ErrorKind::kUnsupportedType, "tensor data cannot use dtype mixed");
}

template <typename T>
T load_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));  // host is little-endian on all supported targets
  return v;
}

template <typename T>
void store_le(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

std::vector<double> decode_payload(DType d, std::span<const std::uint8_t> bytes, std::size_t n) {
  if (bytes.size() != payload_bytes(d, n)) {
    throw Error(ErrorKind::kInvalidValue, "payload has " + std::to_string(bytes.size()) +
                                              " bytes, expected " +
                                              std::to_string(payload_bytes(d, n)));
  }
  std::vector<double> out(n);
  const std::uint8_t* p = bytes.data();
  for (std::size_t i = 0; i < n; ++i) {
    switch (d) {
      case DType::kFP32: out[i] = load_le<float>(p + 4 * i); break;
      case DType::kINT32: out[i] = load_le<std::int32_t>(p + 4 * i); break;
      case DType::kFP16:
        out[i] = static_cast<double>(
            static_cast<float>(Eigen::numext::bit_cast<Eigen::half>(load_le<std::uint16_t>(p + 2 * i))));
        break;
      case DType::kBF16:
        out[i] = static_cast<double>(static_cast<float>(
            Eigen::numext::bit_cast<Eigen::bfloat16>(load_le<std::uint16_t>(p + 2 * i))));
        break;
      case DType::kFP8: out[i] = decode_e4m3(p[i]); break;
      case DType::kBOOL: out[i] = p[i] != 0 ? 1.0 : 0.0; break;
      case DType::kNVFP4: {
        const std::uint8_t byte = p[i / 2];
        out[i] = decode_e2m1(i % 2 == 0 ? (byte & 0xF) : (byte >> 4));
        break;
      }
      case DType::kMIXED: break;
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_payload(DType d, std::span<const double> values) {
  std::vector<std::uint8_t> out;
  out.reserve(payload_bytes(d, values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    switch (d) {
      case DType::kFP32: store_le(out, static_cast<float>(v)); break;
      case DType::kINT32: store_le(out, static_cast<std::int32_t>(std::llround(v))); break;
      case DType::kFP16:
        store_le(out, Eigen::numext::bit_cast<std::uint16_t>(Eigen::half(static_cast<float>(v))));
        break;
      case DType::kBF16:
        store_le(out,
                 Eigen::numext::bit_cast<std::uint16_t>(Eigen::bfloat16(static_cast<float>(v))));
        break;
      case DType::kFP8: out.push_back(encode_nearest(v, 256, decode_e4m3, 0x7F)); break;
      case DType::kBOOL: out.push_back(v != 0.0 ? 1 : 0); break;
      case DType::kNVFP4: {
        // e2m1 has no NaN code; NaN encodes as +0.
        const std::uint8_t code = encode_nearest(v, 16, decode_e2m1, 0x0);
        if (i % 2 == 0) {
          out.push_back(code);
        } else {
          out.back() = static_cast<std::uint8_t>(out.back() | (code << 4));
        }
        break;
      }
      case DType::kMIXED:
        throw Error(ErrorKind::kUnsupportedType, "tensor data cannot use dtype mixed");
    }
  }
  return out;
}

}  // namespace

TensorData parse_tensor_data(std::string_view text) {
  const Json doc = jsonu::parse_document(text, "tensor data file");
  TensorData t;
  const Json& shape = jsonu::require(doc, "shape", "");
  if (!shape.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'shape' must be an array");
  for (std::size_t i = 0; i < shape.size(); ++i) {
    t.shape.push_back(jsonu::as_positive_int(shape[i], jsonu::index("shape", i)));
  }
  const std::string dt = jsonu::require_string(doc, "dtype", "");
  auto d = parse_dtype(dt);
  if (!d || *d == DType::kMIXED) {
    throw Error(ErrorKind::kInvalidValue, "field 'dtype' has unsupported value '" + dt + "'");
  }
  t.dtype = *d;
  std::size_t numel = 1;
  for (auto e : t.shape) numel *= e;

  const std::string encoding = jsonu::require_string(doc, "encoding", "");
  const Json& data = jsonu::require(doc, "data", "");
  if (encoding == "inline") {
    if (!data.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'data' must be an array");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Json& v = data[i];
      if (v.is_number()) {
        t.values.push_back(v.get<double>());
      } else if (v.is_string()) {
        // JSON has no literal for non-finite numbers.
        const std::string s = v.get<std::string>();
        if (s == "nan" || s == "NaN") {
          t.values.push_back(std::numeric_limits<double>::quiet_NaN());
        } else if (s == "inf" || s == "Infinity") {
          t.values.push_back(std::numeric_limits<double>::infinity());
        } else if (s == "-inf" || s == "-Infinity") {
          t.values.push_back(-std::numeric_limits<double>::infinity());
        } else {
          throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::index("data", i) +
                                                    "' holds unknown token '" + s + "'");
        }
      } else {
        throw Error(ErrorKind::kInvalidValue,
                    "field '" + jsonu::index("data", i) + "' must be a number");
      }
    }
  } else if (encoding == "base64") {
    if (!data.is_string()) throw Error(ErrorKind::kInvalidValue, "field 'data' must be a string");
    auto bytes = base64::decode(data.get<std::string>());
    if (!bytes) throw Error(ErrorKind::kInvalidValue, "field 'data' is not valid base64");
    t.values = decode_payload(t.dtype, *bytes, numel);
  } else {
    throw Error(ErrorKind::kInvalidValue, "field 'encoding' has unknown value '" + encoding + "'");
  }
  if (t.values.size() != numel) {
    throw Error(ErrorKind::kInvalidValue, "payload holds " + std::to_string(t.values.size()) +
                                              " values, shape implies " + std::to_string(numel));
  }
  return t;
}

std::string serialize_tensor_data(const TensorData& t, std::string_view encoding) {
  OrderedJson j;
  j["shape"] = t.shape;
  j["dtype"] = std::string(dtype_name(t.dtype));
  j["encoding"] = std::string(encoding);
  if (encoding == "inline") {
    OrderedJson arr = OrderedJson::array();
    for (double v : t.values) {
      if (std::isnan(v)) {
        arr.push_back("nan");
      } else if (std::isinf(v)) {
        arr.push_back(v > 0 ? "inf" : "-inf");
      } else {
        arr.push_back(v);
      }
    }
    j["data"] = std::move(arr);
  } else if (encoding == "base64") {
    j["data"] = base64::encode(encode_payload(t.dtype, t.values));
  } else {
    throw Error(ErrorKind::kInvalidValue, "unknown encoding '" + std::string(encoding) + "'");
  }
  return jsonu::dump(j);
}

}  // namespace solbound
