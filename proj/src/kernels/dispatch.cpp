#include <cassert>
#include <cstdlib>
#include <string_view>

#include "mrhet/kernels.hpp"

namespace mrhet::kernels {

#if MRHET_HAVE_AVX2
const KernelTable& avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if MRHET_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("MR_HETERO_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

void bits_to_genotypes(std::span<const std::uint64_t> bits, std::span<std::uint8_t> out,
                       std::uint32_t threshold) {
  assert(out.size() >= bits.size());
  active().bits_to_genotypes(bits.data(), out.data(), bits.size(), threshold);
}

void axpy_genotype(double a, std::span<const std::uint8_t> z, std::span<double> y) {
  assert(y.size() == z.size());
  active().axpy_genotype(a, z.data(), y.data(), z.size());
}

double dot_genotype(std::span<const std::uint8_t> z, std::span<const double> y) {
  assert(y.size() == z.size());
  return active().dot_genotype(z.data(), y.data(), z.size());
}

GenotypeSums genotype_sums(std::span<const std::uint8_t> z) {
  return active().genotype_sums(z.data(), z.size());
}

WeightedSums weighted_sums(std::span<const double> x, std::span<const double> y,
                           std::span<const double> w) {
  assert(x.size() == y.size() && x.size() == w.size());
  return active().weighted_sums(x.data(), y.data(), w.data(), x.size());
}

WeightedCross weighted_cross(std::span<const double> x, std::span<const double> y,
                             std::span<const double> w, double cx, double cy) {
  assert(x.size() == y.size() && x.size() == w.size());
  return active().weighted_cross(x.data(), y.data(), w.data(), cx, cy, x.size());
}

}  // namespace mrhet::kernels
