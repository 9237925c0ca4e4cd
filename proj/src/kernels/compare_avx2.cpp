// Built with -mavx2 (and without -mfma). Only reached through avx2_kernels(),
// which checks the CPU first.

#include <immintrin.h>

#include <cfloat>
#include <cmath>

#include "solbound/kernels.hpp"

namespace solbound::kernels {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

bool any_nonfinite(std::span<const double> xs) {
  const __m256d max = _mm256_set1_pd(DBL_MAX);
  const double* p = xs.data();
  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    // Unordered compare: NaN lanes also report "not <= max".
    const __m256d bad = _mm256_cmp_pd(abs_pd(_mm256_loadu_pd(p + i)), max, _CMP_NLE_UQ);
    if (_mm256_movemask_pd(bad) != 0) return true;
  }
  for (; i < n; ++i) {
    if (!std::isfinite(p[i])) return true;
  }
  return false;
}

bool all_zero(std::span<const double> xs) {
  const __m256d zero = _mm256_setzero_pd();
  const double* p = xs.data();
  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d eq = _mm256_cmp_pd(_mm256_loadu_pd(p + i), zero, _CMP_EQ_OQ);
    if (_mm256_movemask_pd(eq) != 0xF) return false;
  }
  for (; i < n; ++i) {
    if (!(p[i] == 0.0)) return false;
  }
  return true;
}

bool any_abs_above(std::span<const double> xs, double threshold) {
  const __m256d thr = _mm256_set1_pd(threshold);
  const double* p = xs.data();
  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d gt = _mm256_cmp_pd(abs_pd(_mm256_loadu_pd(p + i)), thr, _CMP_GT_OQ);
    if (_mm256_movemask_pd(gt) != 0) return true;
  }
  for (; i < n; ++i) {
    if (std::fabs(p[i]) > threshold) return true;
  }
  return false;
}

std::uint64_t count_within_tolerance(std::span<const double> c, std::span<const double> r,
                                     double atol, double rtol) {
  const __m256d va = _mm256_set1_pd(atol);
  const __m256d vr = _mm256_set1_pd(rtol);
  const double* pc = c.data();
  const double* pr = r.data();
  const std::size_t n = c.size();
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d ref = _mm256_loadu_pd(pr + i);
    const __m256d diff = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(pc + i), ref));
    const __m256d limit = _mm256_add_pd(va, _mm256_mul_pd(vr, abs_pd(ref)));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(diff, limit, _CMP_LE_OQ));
    count += static_cast<std::uint64_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
    const double diff = std::fabs(pc[i] - pr[i]);
    const double limit = atol + rtol * std::fabs(pr[i]);
    count += diff <= limit ? 1 : 0;
  }
  return count;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", any_nonfinite, all_zero, any_abs_above,
                                 count_within_tolerance};
  return table;
}

}  // namespace solbound::kernels
