#pragma once
// Data-parallel kernels behind output validation.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. Both use the same IEEE operations in the same
// order per element (no FMA contraction), so results are bit-identical; the
// equivalence tests enforce this.

#include <cstdint>
#include <span>
#include <string_view>

namespace solbound::kernels {

struct KernelTable {
  std::string_view isa;
  bool (*any_nonfinite)(std::span<const double> xs);
  bool (*all_zero)(std::span<const double> xs);
  // Any |x| > threshold. NaN never exceeds.
  bool (*any_abs_above)(std::span<const double> xs, double threshold);
  // Count of i with |c[i] - r[i]| <= atol + rtol * |r[i]|. Sizes must match.
  std::uint64_t (*count_within_tolerance)(std::span<const double> candidate,
                                          std::span<const double> reference, double atol,
                                          double rtol);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the running CPU lacks AVX2.
const KernelTable* avx2_kernels();

// AVX2 when available unless SOLBOUND_SIMD=scalar is set in the environment.
const KernelTable& active_kernels();

}  // namespace solbound::kernels
