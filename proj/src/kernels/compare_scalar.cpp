#include <cmath>

#include "solbound/kernels.hpp"

namespace solbound::kernels {

namespace {

bool any_nonfinite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return true;
  }
  return false;
}

bool all_zero(std::span<const double> xs) {
  for (double x : xs) {
    if (!(x == 0.0)) return false;
  }
  return true;
}

bool any_abs_above(std::span<const double> xs, double threshold) {
  for (double x : xs) {
    if (std::fabs(x) > threshold) return true;
  }
  return false;
}

std::uint64_t count_within_tolerance(std::span<const double> c, std::span<const double> r,
                                     double atol, double rtol) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double diff = std::fabs(c[i] - r[i]);
    const double limit = atol + rtol * std::fabs(r[i]);
    n += diff <= limit ? 1 : 0;
  }
  return n;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", any_nonfinite, all_zero, any_abs_above,
                                 count_within_tolerance};
  return table;
}

}  // namespace solbound::kernels
