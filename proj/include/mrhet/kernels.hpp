#pragma once

// Data-parallel inner loops of the simulator and the regression kernels.
// Every routine has a scalar reference implementation; an AVX2+FMA variant is
// compiled separately and chosen at runtime when the CPU supports it. Both
// variants are tested against each other.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mrhet::kernels {

struct GenotypeSums {
  std::uint64_t sum = 0;     // sum of z
  std::uint64_t sum_sq = 0;  // sum of z^2
};

struct WeightedSums {
  double w = 0.0;   // sum w
  double wx = 0.0;  // sum w x
  double wy = 0.0;  // sum w y
};

struct WeightedCross {
  double wxy = 0.0;  // sum w (x - cx)(y - cy)
  double wxx = 0.0;  // sum w (x - cx)^2
};

struct KernelTable {
  std::string_view name;
  // out[i] = [lo32(bits[i]) < threshold] + [hi32(bits[i]) < threshold]
  void (*bits_to_genotypes)(const std::uint64_t* bits, std::uint8_t* out, std::size_t n,
                            std::uint32_t threshold);
  // y[i] += a * z[i]
  void (*axpy_genotype)(double a, const std::uint8_t* z, double* y, std::size_t n);
  // sum z[i] * y[i]
  double (*dot_genotype)(const std::uint8_t* z, const double* y, std::size_t n);
  GenotypeSums (*genotype_sums)(const std::uint8_t* z, std::size_t n);
  WeightedSums (*weighted_sums)(const double* x, const double* y, const double* w, std::size_t n);
  WeightedCross (*weighted_cross)(const double* x, const double* y, const double* w, double cx,
                                  double cy, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Selected once per process: MR_HETERO_SIMD=scalar forces the reference path,
// otherwise the widest supported variant wins.
const KernelTable& active();

// Span front ends over active().
void bits_to_genotypes(std::span<const std::uint64_t> bits, std::span<std::uint8_t> out,
                       std::uint32_t threshold);
void axpy_genotype(double a, std::span<const std::uint8_t> z, std::span<double> y);
double dot_genotype(std::span<const std::uint8_t> z, std::span<const double> y);
GenotypeSums genotype_sums(std::span<const std::uint8_t> z);
WeightedSums weighted_sums(std::span<const double> x, std::span<const double> y,
                           std::span<const double> w);
WeightedCross weighted_cross(std::span<const double> x, std::span<const double> y,
                             std::span<const double> w, double cx, double cy);

}  // namespace mrhet::kernels
