#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "mrhet/kernels.hpp"
#include "mrhet/parallel.hpp"
#include "mrhet/rng.hpp"

using namespace mrhet;

namespace {

std::vector<std::size_t> lengths() { return {0, 1, 3, 7, 8, 15, 16, 17, 31, 32, 33, 63, 64, 100, 1000, 4099, 70001}; }

std::vector<std::uint8_t> random_genotypes(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::uint8_t> z(n);
  for (auto& v : z) v = static_cast<std::uint8_t>(gen() % 3);
  return z;
}

std::vector<double> random_doubles(std::mt19937_64& gen, std::size_t n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

}  // namespace

TEST_CASE("active kernel table") {
  const auto& t = kernels::active();
  CHECK_FALSE(t.name.empty());
  MESSAGE("active kernels: " << t.name);
}

TEST_CASE("scalar reference kernels") {
  const auto& s = kernels::scalar_table();
  const std::uint64_t bits[] = {0x0000000100000002ULL, 0xFFFFFFFF00000000ULL, 0x80000000FFFFFFFFULL};
  std::uint8_t out[3];
  s.bits_to_genotypes(bits, out, 3, 0x80000000u);
  CHECK(out[0] == 2);
  CHECK(out[1] == 1);
  CHECK(out[2] == 0);

  const std::uint8_t z[] = {0, 1, 2, 2};
  double y[] = {1, 1, 1, 1};
  s.axpy_genotype(0.5, z, y, 4);
  CHECK(y[3] == 2.0);
  CHECK(s.dot_genotype(z, y, 4) == doctest::Approx(1.5 + 4 + 4));
  const auto gs = s.genotype_sums(z, 4);
  CHECK(gs.sum == 5);
  CHECK(gs.sum_sq == 9);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const kernels::KernelTable* v = kernels::avx2_table();
  if (v == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& s = kernels::scalar_table();
  std::mt19937_64 gen(2024);
  for (std::size_t n : lengths()) {
    CAPTURE(n);
    std::vector<std::uint64_t> bits(n);
    for (auto& b : bits) b = gen();
    for (std::uint32_t thr : {0u, 1u, 0x4CCCCCCDu, 0x80000000u, 0xFFFFFFFFu}) {
      std::vector<std::uint8_t> a(n), b(n);
      s.bits_to_genotypes(bits.data(), a.data(), n, thr);
      v->bits_to_genotypes(bits.data(), b.data(), n, thr);
      CHECK(a == b);
    }

    const auto z = random_genotypes(gen, n);
    auto y1 = random_doubles(gen, n);
    auto y2 = y1;
    s.axpy_genotype(0.0731, z.data(), y1.data(), n);
    v->axpy_genotype(0.0731, z.data(), y2.data(), n);
    CHECK(y1 == y2);

    const auto gs1 = s.genotype_sums(z.data(), n);
    const auto gs2 = v->genotype_sums(z.data(), n);
    CHECK(gs1.sum == gs2.sum);
    CHECK(gs1.sum_sq == gs2.sum_sq);

    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += z[i] * std::abs(y1[i]);
    CHECK(std::abs(s.dot_genotype(z.data(), y1.data(), n) - v->dot_genotype(z.data(), y1.data(), n)) <=
          1e-13 * std::max(1.0, mag));

    const auto x = random_doubles(gen, n);
    const auto w = random_doubles(gen, n, 0.1, 3.0);
    const auto ws1 = s.weighted_sums(x.data(), y1.data(), w.data(), n);
    const auto ws2 = v->weighted_sums(x.data(), y1.data(), w.data(), n);
    const double scale = std::max(1.0, static_cast<double>(n) * 3.0);
    CHECK(std::abs(ws1.w - ws2.w) <= 1e-13 * scale);
    CHECK(std::abs(ws1.wx - ws2.wx) <= 1e-13 * scale);
    CHECK(std::abs(ws1.wy - ws2.wy) <= 1e-13 * scale);
    const auto wc1 = s.weighted_cross(x.data(), y1.data(), w.data(), 0.1, -0.2, n);
    const auto wc2 = v->weighted_cross(x.data(), y1.data(), w.data(), 0.1, -0.2, n);
    CHECK(std::abs(wc1.wxy - wc2.wxy) <= 1e-13 * scale);
    CHECK(std::abs(wc1.wxx - wc2.wxx) <= 1e-13 * scale);
  }
}

TEST_CASE("genotype frequencies follow Binomial(2, maf)") {
  Rng rng(5, {1});
  const std::size_t n = 200000;
  std::vector<std::uint64_t> bits(n);
  for (auto& b : bits) b = rng();
  std::vector<std::uint8_t> z(n);
  kernels::bits_to_genotypes(bits, z, 0x4CCCCCCDu);  // round(0.3 * 2^32)
  std::size_t count[3] = {0, 0, 0};
  for (auto v : z) ++count[v];
  const double expect[3] = {0.49, 0.42, 0.09};
  for (int k = 0; k < 3; ++k) {
    const double p = static_cast<double>(count[k]) / n;
    CHECK(std::abs(p - expect[k]) <= 4 * std::sqrt(expect[k] * (1 - expect[k]) / n));
  }
}

TEST_CASE("rng streams") {
  Rng a(42, {1, 2});
  Rng b(42, {1, 2});
  Rng c(42, {2, 1});
  Rng d(43, {1, 2});
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto va = a(), vb = b(), vc = c(), vd = d();
    CHECK(va == vb);
    differ_c = differ_c || va != vc;
    differ_d = differ_d || va != vd;
  }
  CHECK(differ_c);
  CHECK(differ_d);
  CHECK(stream_key(1, {}) != stream_key(1, {0}));

  Rng r(7, {});
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = r.normal();
    sum += g;
    sum_sq += g * g;
  }
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) <= 0.015);

  std::size_t hits[7] = {};
  for (int i = 0; i < 70000; ++i) ++hits[r.below(7)];
  for (auto h : hits) CHECK(std::abs(static_cast<double>(h) - 10000.0) <= 500.0);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (unsigned threads : {1u, 2u, 8u}) {
    std::vector<std::atomic<int>> hit(1000);
    parallel_for(hit.size(), threads, [&](std::size_t i) { hit[i]++; });
    for (auto& h : hit) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(100, threads,
                                 [](std::size_t i) {
                                   if (i == 37) throw std::runtime_error("x");
                                 }),
                    std::runtime_error);
  }
  CHECK(default_thread_count() >= 1);
}
