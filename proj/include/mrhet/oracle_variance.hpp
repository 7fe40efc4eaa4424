#pragma once

// Quantities that need the true data-generating parameters. They are only
// meaningful inside a simulation and are kept out of the analysis API.

#include <span>

namespace mrhet::simulation_only {

// Asymptotic variance V1^2 of the MR-Wald estimator given the true exposure
// effects, the summary-statistic standard errors and the per-SNP residual
// scale sigma_U. Throws VanishingDenominator when sum gamma_tr gamma_ou / se_ou^2 is 0.
double oracle_variance_v1(std::span<const double> true_gamma_tr,
                          std::span<const double> true_gamma_ou,
                          std::span<const double> se_gamma_tr,
                          std::span<const double> se_gamma_ou,
                          std::span<const double> sigma_u);

}  // namespace mrhet::simulation_only
