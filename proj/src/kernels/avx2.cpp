// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "mrhet/kernels.hpp"

namespace mrhet::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Four genotypes -> four doubles.
inline __m256d load4_u8(const std::uint8_t* z) {
  std::int32_t packed;
  __builtin_memcpy(&packed, z, sizeof(packed));
  return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed)));
}

// Per 64-bit lane: ([lo < t] + [hi < t]) in the low 32 bits.
inline __m256i genotype_counts(__m256i words, __m256i thr_biased, __m256i bias, __m256i one) {
  const __m256i lt = _mm256_cmpgt_epi32(thr_biased, _mm256_xor_si256(words, bias));
  const __m256i ones = _mm256_and_si256(lt, one);
  return _mm256_add_epi32(ones, _mm256_srli_epi64(ones, 32));
}

void bits_to_genotypes_avx2(const std::uint64_t* bits, std::uint8_t* out, std::size_t n,
                            std::uint32_t threshold) {
  const __m256i bias = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  const __m256i thr = _mm256_xor_si256(_mm256_set1_epi32(static_cast<int>(threshold)), bias);
  const __m256i one = _mm256_set1_epi32(1);
  const __m256i gather = _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i + 4));
    const __m256i ca = _mm256_permutevar8x32_epi32(genotype_counts(a, thr, bias, one), gather);
    const __m256i cb = _mm256_permutevar8x32_epi32(genotype_counts(b, thr, bias, one), gather);
    const __m128i w16 =
        _mm_packus_epi32(_mm256_castsi256_si128(ca), _mm256_castsi256_si128(cb));
    const __m128i w8 = _mm_packus_epi16(w16, w16);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(out + i), w8);
  }
  for (; i < n; ++i) {
    const auto lo = static_cast<std::uint32_t>(bits[i]);
    const auto hi = static_cast<std::uint32_t>(bits[i] >> 32);
    out[i] = static_cast<std::uint8_t>((lo < threshold) + (hi < threshold));
  }
}

void axpy_genotype_avx2(double a, const std::uint8_t* z, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    // a * z is exact for z in {0, 1, 2}, so fused and unfused forms agree.
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, load4_u8(z + i), yv));
  }
  for (; i < n; ++i) y[i] += a * static_cast<double>(z[i]);
}

double dot_genotype_avx2(const std::uint8_t* z, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(load4_u8(z + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(load4_u8(z + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += static_cast<double>(z[i]) * y[i];
  return s;
}

GenotypeSums genotype_sums_avx2(const std::uint8_t* z, std::size_t n) {
  // maddubs against 1 pairs bytes into 16-bit sums; madd widens to 32 bits.
  const __m256i one8 = _mm256_set1_epi8(1);
  const __m256i one16 = _mm256_set1_epi16(1);
  __m256i sum = _mm256_setzero_si256();
  __m256i sum_sq = _mm256_setzero_si256();
  GenotypeSums r;
  std::size_t i = 0;
  while (i + 32 <= n) {
    // Flush the 32-bit lanes well before they could overflow.
    const std::size_t block_end = i + std::min<std::size_t>((n - i) / 32 * 32, std::size_t{1} << 24);
    for (; i < block_end; i += 32) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(z + i));
      sum = _mm256_add_epi32(sum, _mm256_madd_epi16(_mm256_maddubs_epi16(v, one8), one16));
      const __m256i sq = _mm256_maddubs_epi16(v, v);
      sum_sq = _mm256_add_epi32(sum_sq, _mm256_madd_epi16(sq, one16));
    }
    alignas(32) std::uint32_t a[8];
    alignas(32) std::uint32_t b[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(a), sum);
    _mm256_store_si256(reinterpret_cast<__m256i*>(b), sum_sq);
    for (int k = 0; k < 8; ++k) {
      r.sum += a[k];
      r.sum_sq += b[k];
    }
    sum = _mm256_setzero_si256();
    sum_sq = _mm256_setzero_si256();
  }
  for (; i < n; ++i) {
    r.sum += z[i];
    r.sum_sq += static_cast<std::uint64_t>(z[i]) * z[i];
  }
  return r;
}

WeightedSums weighted_sums_avx2(const double* x, const double* y, const double* w,
                                std::size_t n) {
  __m256d sw = _mm256_setzero_pd();
  __m256d swx = _mm256_setzero_pd();
  __m256d swy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    sw = _mm256_add_pd(sw, wv);
    swx = _mm256_fmadd_pd(wv, _mm256_loadu_pd(x + i), swx);
    swy = _mm256_fmadd_pd(wv, _mm256_loadu_pd(y + i), swy);
  }
  WeightedSums r{hsum(sw), hsum(swx), hsum(swy)};
  for (; i < n; ++i) {
    r.w += w[i];
    r.wx += w[i] * x[i];
    r.wy += w[i] * y[i];
  }
  return r;
}

WeightedCross weighted_cross_avx2(const double* x, const double* y, const double* w, double cx,
                                  double cy, std::size_t n) {
  const __m256d cxv = _mm256_set1_pd(cx);
  const __m256d cyv = _mm256_set1_pd(cy);
  __m256d sxy = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), cxv);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), cyv);
    const __m256d wdx = _mm256_mul_pd(wv, dx);
    sxy = _mm256_fmadd_pd(wdx, dy, sxy);
    sxx = _mm256_fmadd_pd(wdx, dx, sxx);
  }
  WeightedCross r{hsum(sxy), hsum(sxx)};
  for (; i < n; ++i) {
    const double dx = x[i] - cx;
    const double dy = y[i] - cy;
    r.wxy += w[i] * dx * dy;
    r.wxx += w[i] * dx * dx;
  }
  return r;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",
      bits_to_genotypes_avx2,
      axpy_genotype_avx2,
      dot_genotype_avx2,
      genotype_sums_avx2,
      weighted_sums_avx2,
      weighted_cross_avx2,
  };
  return table;
}

}  // namespace mrhet::kernels
