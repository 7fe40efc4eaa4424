#pragma once

#include <span>

#include "mrhet/types.hpp"

namespace mrhet {

// Ratio of two IVW slopes on the treatment-cohort exposure effects: outcome
// (weights 1/se_capgamma^2) over outcome-cohort exposure (weights 1/se_gamma_ou^2).
// auxiliary: b_hat, b_beta_hat.
MrEstimate mr_wald(std::span<const HarmonizedTriple> triples);

// Robust variant: both slopes are weighted L1 (median-loss) fits through the
// origin. auxiliary: b_tilde, b_beta_tilde.
MrEstimate mr_wald_r(std::span<const HarmonizedTriple> triples);

// Directional-pleiotropy variant: both slopes come from weighted regressions
// with an intercept. auxiliary: b_tilde, b_beta_tilde, eta_exposure, eta_outcome.
MrEstimate mr_wald_d(std::span<const HarmonizedTriple> triples);

// Baselines on (gamma_tr, capgamma_ou).
MrEstimate ivw(std::span<const HarmonizedTriple> triples);
MrEstimate egger(std::span<const HarmonizedTriple> triples);
MrEstimate weighted_median(std::span<const HarmonizedTriple> triples);
MrEstimate divw_estimate(std::span<const HarmonizedTriple> triples);

MrEstimate point_estimate(Method method, std::span<const HarmonizedTriple> triples);
double estimate_beta(Method method, std::span<const HarmonizedTriple> triples);

}  // namespace mrhet
