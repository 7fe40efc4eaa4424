#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "mrhet/types.hpp"

namespace mrhet {

enum class CiKind { NormalApprox, Percentile };

struct BootstrapConfig {
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
  CiKind ci_kind = CiKind::NormalApprox;
  double level = 0.95;
};

struct BootstrapResult {
  double point = 0.0;  // estimator on the full sample
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_failed = 0;
};

using Estimator = std::function<double(std::span<const HarmonizedTriple>)>;

// Resamples SNP triples with replacement. Replicate b draws its indices from
// the stream (cfg.seed, b), so results do not depend on `threads`. Replicates
// whose estimator throws VanishingDenominator or DegenerateDesign are counted
// and excluded; more than n_boot/2 of them raises TooManyFailures.
BootstrapResult bootstrap(const Estimator& estimator, std::span<const HarmonizedTriple> triples,
                          const BootstrapConfig& cfg, unsigned threads = 1);

// Several estimators over the same resamples. A slot is empty when that
// estimator failed on the full sample or on too many replicates.
struct BootstrapOutcome {
  std::optional<BootstrapResult> result;
  std::string failure;  // error kind name when `result` is empty
};
std::vector<BootstrapOutcome> bootstrap_many(std::span<const Estimator> estimators,
                                             std::span<const HarmonizedTriple> triples,
                                             const BootstrapConfig& cfg, unsigned threads = 1);

// Standard normal quantile.
double normal_quantile(double p);

// Type-7 (linear interpolation) sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace mrhet
