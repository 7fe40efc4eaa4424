#include "mrhet/kernels.hpp"

namespace mrhet::kernels {
namespace {

void bits_to_genotypes_scalar(const std::uint64_t* bits, std::uint8_t* out, std::size_t n,
                              std::uint32_t threshold) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = static_cast<std::uint32_t>(bits[i]);
    const auto hi = static_cast<std::uint32_t>(bits[i] >> 32);
    out[i] = static_cast<std::uint8_t>((lo < threshold) + (hi < threshold));
  }
}

void axpy_genotype_scalar(double a, const std::uint8_t* z, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * static_cast<double>(z[i]);
}

double dot_genotype_scalar(const std::uint8_t* z, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(z[i]) * y[i];
  return s;
}

GenotypeSums genotype_sums_scalar(const std::uint8_t* z, std::size_t n) {
  GenotypeSums r;
  for (std::size_t i = 0; i < n; ++i) {
    r.sum += z[i];
    r.sum_sq += static_cast<std::uint64_t>(z[i]) * z[i];
  }
  return r;
}

WeightedSums weighted_sums_scalar(const double* x, const double* y, const double* w,
                                  std::size_t n) {
  WeightedSums r;
  for (std::size_t i = 0; i < n; ++i) {
    r.w += w[i];
    r.wx += w[i] * x[i];
    r.wy += w[i] * y[i];
  }
  return r;
}

WeightedCross weighted_cross_scalar(const double* x, const double* y, const double* w, double cx,
                                    double cy, std::size_t n) {
  WeightedCross r;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - cx;
    const double dy = y[i] - cy;
    r.wxy += w[i] * dx * dy;
    r.wxx += w[i] * dx * dx;
  }
  return r;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",
      bits_to_genotypes_scalar,
      axpy_genotype_scalar,
      dot_genotype_scalar,
      genotype_sums_scalar,
      weighted_sums_scalar,
      weighted_cross_scalar,
  };
  return table;
}

}  // namespace mrhet::kernels
