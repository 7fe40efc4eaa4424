#include "mrhet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "mrhet/errors.hpp"
#include "mrhet/parallel.hpp"
#include "mrhet/rng.hpp"

namespace mrhet {
namespace {

constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();

bool is_replicate_failure(const Error& e) {
  return e.kind() == ErrorKind::VanishingDenominator || e.kind() == ErrorKind::DegenerateDesign;
}

BootstrapResult summarize(double point, std::vector<double> reps, const BootstrapConfig& cfg) {
  BootstrapResult out;
  out.point = point;
  std::vector<double> ok;
  ok.reserve(reps.size());
  for (double v : reps) {
    if (std::isnan(v)) ++out.n_failed;
    else ok.push_back(v);
  }
  if (2 * out.n_failed > cfg.n_boot || ok.size() < 2) {
    throw Error(ErrorKind::TooManyFailures,
                std::to_string(out.n_failed) + " of " + std::to_string(cfg.n_boot) +
                    " bootstrap replicates failed");
  }

  double mean = 0.0;
  for (double v : ok) mean += v;
  mean /= static_cast<double>(ok.size());
  double ss = 0.0;
  for (double v : ok) ss += (v - mean) * (v - mean);
  out.se = std::sqrt(ss / static_cast<double>(ok.size() - 1));

  if (cfg.ci_kind == CiKind::NormalApprox) {
    const double z = normal_quantile(0.5 * (1.0 + cfg.level));
    out.ci_low = point - z * out.se;
    out.ci_high = point + z * out.se;
  } else {
    std::sort(ok.begin(), ok.end());
    out.ci_low = sorted_quantile(ok, 0.5 * (1.0 - cfg.level));
    out.ci_high = sorted_quantile(ok, 0.5 * (1.0 + cfg.level));
  }
  return out;
}

void validate(std::span<const HarmonizedTriple> triples, const BootstrapConfig& cfg) {
  if (triples.size() < 2) throw Error(ErrorKind::DegenerateInput, "bootstrap needs at least 2 SNPs");
  if (cfg.n_boot < 2) throw Error(ErrorKind::BadConfig, "bootstrap needs n_boot >= 2");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw Error(ErrorKind::BadConfig, "level must lie in (0, 1)");
}

// reps[k][b] for every active estimator k; replicate b writes only slot b.
std::vector<std::vector<double>> run_replicates(std::span<const Estimator> estimators,
                                                const std::vector<bool>& active,
                                                const std::vector<HarmonizedTriple>& base,
                                                const BootstrapConfig& cfg, unsigned threads) {
  const std::size_t m = estimators.size();
  const std::size_t p = base.size();
  std::vector<std::vector<double>> reps(m, std::vector<double>(cfg.n_boot, kFailed));
  const std::size_t chunks = std::min<std::size_t>(cfg.n_boot, std::max(1u, threads) * 4u);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    std::vector<HarmonizedTriple> sample(p);
    const std::size_t begin = cfg.n_boot * chunk / chunks;
    const std::size_t end = cfg.n_boot * (chunk + 1) / chunks;
    for (std::size_t b = begin; b < end; ++b) {
      Rng rng(cfg.seed, {b});
      for (std::size_t j = 0; j < p; ++j) sample[j] = base[rng.below(p)];
      for (std::size_t k = 0; k < m; ++k) {
        if (!active[k]) continue;
        try {
          reps[k][b] = estimators[k](sample);
        } catch (const Error& e) {
          if (!is_replicate_failure(e)) throw;
        }
      }
    }
  });
  return reps;
}

// Ids play no part in estimation; dropping them keeps resampling copies cheap.
std::vector<HarmonizedTriple> anonymous_copy(std::span<const HarmonizedTriple> triples) {
  std::vector<HarmonizedTriple> base(triples.begin(), triples.end());
  for (auto& t : base) t.snp_id.clear();
  return base;
}

}  // namespace

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::DegenerateInput, "quantile of empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<BootstrapOutcome> bootstrap_many(std::span<const Estimator> estimators,
                                             std::span<const HarmonizedTriple> triples,
                                             const BootstrapConfig& cfg, unsigned threads) {
  validate(triples, cfg);
  const std::size_t m = estimators.size();
  const auto base = anonymous_copy(triples);

  std::vector<BootstrapOutcome> out(m);
  std::vector<double> point(m, kFailed);
  std::vector<bool> active(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    try {
      point[k] = estimators[k](base);
      active[k] = true;
    } catch (const Error& e) {
      out[k].failure = std::string(error_kind_name(e.kind()));
    }
  }

  auto reps = run_replicates(estimators, active, base, cfg, threads);
  for (std::size_t k = 0; k < m; ++k) {
    if (!active[k]) continue;
    try {
      out[k].result = summarize(point[k], std::move(reps[k]), cfg);
    } catch (const Error& e) {
      out[k].failure = std::string(error_kind_name(e.kind()));
    }
  }
  return out;
}

BootstrapResult bootstrap(const Estimator& estimator, std::span<const HarmonizedTriple> triples,
                          const BootstrapConfig& cfg, unsigned threads) {
  validate(triples, cfg);
  const auto base = anonymous_copy(triples);
  // Full-sample failures propagate with their own kind.
  const double point = estimator(base);
  auto reps = run_replicates(std::span(&estimator, 1), {true}, base, cfg, threads);
  return summarize(point, std::move(reps[0]), cfg);
}

}  // namespace mrhet
