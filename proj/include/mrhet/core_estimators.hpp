#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mrhet/types.hpp"

namespace mrhet {

// Regressor, response and positive weights of equal length.
struct WeightedPairs {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;

  WeightedPairs() = default;
  // Throws DegenerateInput on unequal lengths, empty input or a non-positive weight.
  WeightedPairs(std::vector<double> x_, std::vector<double> y_, std::vector<double> w_);

  std::size_t size() const noexcept { return x.size(); }
};

// argmin_b sum w (y - b x)^2. Throws DegenerateDesign when every x is zero.
double wls_origin(const WeightedPairs& d);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// argmin_{b,a} sum w (y - b x - a)^2 (the Egger kernel). Needs p >= 3 and a
// non-constant x.
AffineFit wls_intercept(const WeightedPairs& d);

// argmin_b sum w |y - b x|: the weighted median of y/x under weights w|x|.
// A flat minimising interval resolves to its midpoint.
double l1_origin(const WeightedPairs& d);

// Interpolated weighted median: sort values, place each at the cumulative
// fraction (sum_{k<=j} w_k - w_j/2) / sum w and read off 0.5 linearly.
double interpolated_weighted_median(std::span<const double> values, std::span<const double> weights);

struct RatioMedian {
  double estimate = 0.0;
  std::size_t n_used = 0;
  std::size_t n_dropped_zero_exposure = 0;
};

// Weighted median of the per-SNP ratios capgamma_ou / gamma_tr with
// first-order delta-method inverse-variance weights.
RatioMedian weighted_median_ratio(std::span<const HarmonizedTriple> triples);

struct DivwEstimate {
  double beta = 0.0;
  double se = 0.0;           // plug-in analytic standard error
  double denominator = 0.0;  // sum (gamma_tr^2 - se_tr^2) / se_capgamma^2
};

// Debiased IVW without instrument screening.
DivwEstimate divw(std::span<const HarmonizedTriple> triples);

struct IvStrength {
  double kappa_tr = 0.0;
  double kappa_ou = 0.0;
  double kappa_co = 0.0;
};

// Average instrument strength in each cohort and their coherence, with plug-in
// noise bias removed and floored at zero per SNP.
IvStrength iv_strength_diagnostics(std::span<const HarmonizedTriple> triples);

}  // namespace mrhet
