#pragma once

#include <span>
#include <vector>

#include "mrhet/types.hpp"

namespace mrhet {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Power series below the split point, Lentz continued fraction above it.
// Both throw NonConvergence past 500 iterations.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chisq_sf(double x, double df);

struct HetTestResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  std::vector<double> per_snp;  // squared standardized differences
};

// Global test that the exposure effects agree between the treatment and
// outcome cohorts: T = sum (gamma_ou - gamma_tr)^2 / (se_ou^2 + se_tr^2) ~ chi2(p).
HetTestResult het_test(std::span<const HarmonizedTriple> triples);

}  // namespace mrhet
