#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "mrhet/errors.hpp"
#include "mrhet/inference.hpp"
#include "mrhet/mr_wald.hpp"

using namespace mrhet;

namespace {

std::vector<HarmonizedTriple> sample(std::size_t p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<HarmonizedTriple> t(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double g = 0.05 + 0.05 * (static_cast<double>(j) + 0.5) / static_cast<double>(p);
    t[j] = {"rs" + std::to_string(j), g + 0.01 * nd(gen), 0.01, g + 0.01 * nd(gen), 0.01,
            0.5 * g + 0.01 * nd(gen), 0.01};
  }
  return t;
}

double mean_gamma_tr(std::span<const HarmonizedTriple> t) {
  double s = 0;
  for (const auto& h : t) s += h.gamma_tr;
  return s / static_cast<double>(t.size());
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("constant estimator has zero spread") {
  const auto t = sample(20, 1);
  BootstrapConfig cfg;
  cfg.n_boot = 200;
  const auto r = bootstrap([](std::span<const HarmonizedTriple>) { return 1.25; }, t, cfg);
  CHECK(r.se == 0.0);
  CHECK(r.ci_low == 1.25);
  CHECK(r.ci_high == 1.25);
  CHECK(r.point == 1.25);
  CHECK(r.n_failed == 0);
}

TEST_CASE("bootstrap se of a mean matches the analytic se") {
  const auto t = sample(200, 2);
  double m = mean_gamma_tr(t), ss = 0;
  for (const auto& h : t) ss += (h.gamma_tr - m) * (h.gamma_tr - m);
  const double analytic = std::sqrt(ss / 199.0) / std::sqrt(200.0);
  BootstrapConfig cfg;
  cfg.n_boot = 2000;
  cfg.seed = 99;
  const auto r = bootstrap(mean_gamma_tr, t, cfg);
  CHECK(std::abs(r.se - analytic) <= 0.15 * analytic);
  const double z = normal_quantile(0.975);
  CHECK(r.ci_low == doctest::Approx(m - z * r.se));
  CHECK(r.ci_high == doctest::Approx(m + z * r.se));
}

TEST_CASE("bootstrap is deterministic and thread-count independent") {
  const auto t = sample(60, 3);
  const Estimator est = [](std::span<const HarmonizedTriple> s) { return mr_wald(s).beta; };
  for (CiKind kind : {CiKind::NormalApprox, CiKind::Percentile}) {
    BootstrapConfig cfg;
    cfg.n_boot = 301;
    cfg.seed = 7;
    cfg.ci_kind = kind;
    const auto a = bootstrap(est, t, cfg, 1);
    const auto b = bootstrap(est, t, cfg, 1);
    const auto c = bootstrap(est, t, cfg, 5);
    CHECK(a.se == b.se);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == c.ci_high);
    CHECK(a.se == c.se);
    CHECK(a.ci_low == c.ci_low);
  }
}

TEST_CASE("bootstrap_many equals separate bootstrap calls") {
  const auto t = sample(50, 4);
  BootstrapConfig cfg;
  cfg.n_boot = 150;
  cfg.seed = 12;
  std::vector<Estimator> ests;
  for (Method m : {Method::MrWald, Method::MrWaldR, Method::Ivw}) {
    ests.emplace_back([m](std::span<const HarmonizedTriple> s) { return estimate_beta(m, s); });
  }
  const auto many = bootstrap_many(ests, t, cfg, 3);
  REQUIRE(many.size() == ests.size());
  for (std::size_t k = 0; k < ests.size(); ++k) {
    REQUIRE(many[k].result.has_value());
    const auto one = bootstrap(ests[k], t, cfg, 1);
    CHECK(many[k].result->se == one.se);
    CHECK(many[k].result->ci_low == one.ci_low);
    CHECK(many[k].result->point == one.point);
  }
}

TEST_CASE("percentile interval lies within the replicate range") {
  const auto t = sample(40, 5);
  BootstrapConfig cfg;
  cfg.n_boot = 400;
  cfg.ci_kind = CiKind::Percentile;
  cfg.level = 0.9;
  const auto r = bootstrap(mean_gamma_tr, t, cfg);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& h : t) {
    lo = std::min(lo, h.gamma_tr);
    hi = std::max(hi, h.gamma_tr);
  }
  CHECK(r.ci_low <= r.ci_high);
  CHECK(r.ci_low >= lo);
  CHECK(r.ci_high <= hi);
}

TEST_CASE("failure policy") {
  auto t = sample(30, 6);
  // Tag each SNP through a field the estimators below do not otherwise use.
  for (std::size_t j = 0; j < t.size(); ++j) t[j].se_capgamma_ou = static_cast<double>(j + 1);
  const auto is_full = [](std::span<const HarmonizedTriple> s) {
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j].se_capgamma_ou != static_cast<double>(j + 1)) return false;
    return true;
  };
  BootstrapConfig cfg;
  cfg.n_boot = 100;

  // Roughly a third of the resamples start with a SNP whose tag is divisible by 3.
  const Estimator sometimes = [&](std::span<const HarmonizedTriple> s) {
    if (!is_full(s) && static_cast<int>(s[0].se_capgamma_ou) % 3 == 0) {
      throw Error(ErrorKind::VanishingDenominator, "x");
    }
    return 1.0;
  };
  const auto r = bootstrap(sometimes, t, cfg);
  CHECK(r.n_failed > 10);
  CHECK(r.n_failed < 50);

  const Estimator mostly = [&](std::span<const HarmonizedTriple> s) {
    if (!is_full(s)) throw Error(ErrorKind::DegenerateDesign, "x");
    return 1.0;
  };
  CHECK(kind_of([&] { bootstrap(mostly, t, cfg); }) == ErrorKind::TooManyFailures);
  const std::vector<Estimator> pair{sometimes, mostly};
  const auto many = bootstrap_many(pair, t, cfg);
  CHECK(many[0].result.has_value());
  CHECK_FALSE(many[1].result.has_value());
  CHECK(many[1].failure == "TooManyFailures");

  const Estimator other = [&](std::span<const HarmonizedTriple> s) -> double {
    if (is_full(s)) return 1.0;
    throw Error(ErrorKind::NonConvergence, "boom");
  };
  CHECK(kind_of([&] { bootstrap(other, t, cfg); }) == ErrorKind::NonConvergence);
}

TEST_CASE("configuration errors") {
  const auto t = sample(30, 7);
  BootstrapConfig cfg;
  cfg.n_boot = 1;
  CHECK(kind_of([&] { bootstrap(mean_gamma_tr, t, cfg); }) == ErrorKind::BadConfig);
  cfg.n_boot = 10;
  cfg.level = 1.0;
  CHECK(kind_of([&] { bootstrap(mean_gamma_tr, t, cfg); }) == ErrorKind::BadConfig);
  cfg.level = 0.95;
  const std::vector<HarmonizedTriple> one(1, t[0]);
  CHECK(kind_of([&] { bootstrap(mean_gamma_tr, one, cfg); }) == ErrorKind::DegenerateInput);
}

TEST_CASE("quantile helpers") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(sorted_quantile(v, 0.0) == 1.0);
  CHECK(sorted_quantile(v, 1.0) == 4.0);
  CHECK(sorted_quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(sorted_quantile(v, 0.25) == doctest::Approx(1.75));
}
