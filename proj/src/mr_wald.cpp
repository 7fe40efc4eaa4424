#include "mrhet/mr_wald.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrhet/core_estimators.hpp"
#include "mrhet/errors.hpp"
#include "mrhet/oracle_variance.hpp"

namespace mrhet {
namespace {

enum class Response { GammaOu, CapGammaOu };

// Weight is 1/se^2 of the chosen column; `power` 1 instead gives
// min_j se / se_j.
WeightedPairs pairs(std::span<const HarmonizedTriple> triples, Response response,
                    Response weight_source, int power) {
  const std::size_t p = triples.size();
  std::vector<double> x(p), y(p), se(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& t = triples[j];
    x[j] = t.gamma_tr;
    y[j] = response == Response::GammaOu ? t.gamma_ou : t.capgamma_ou;
    se[j] = weight_source == Response::GammaOu ? t.se_gamma_ou : t.se_capgamma_ou;
  }
  std::vector<double> w(p);
  if (power == 2) {
    for (std::size_t j = 0; j < p; ++j) w[j] = 1.0 / (se[j] * se[j]);
  } else {
    const double min_se = *std::min_element(se.begin(), se.end());
    for (std::size_t j = 0; j < p; ++j) w[j] = min_se / se[j];
  }
  return WeightedPairs(std::move(x), std::move(y), std::move(w));
}

void require_snps(std::span<const HarmonizedTriple> triples, std::size_t min_p) {
  if (triples.size() < min_p) {
    throw Error(ErrorKind::DegenerateInput,
                "need at least " + std::to_string(min_p) + " SNPs, got " + std::to_string(triples.size()));
  }
}

// |b| must not vanish relative to the scale of the two exposure columns.
void check_denominator(double b, std::span<const HarmonizedTriple> triples) {
  double max_ou = 0.0, max_tr = 0.0;
  for (const auto& t : triples) {
    max_ou = std::max(max_ou, std::abs(t.gamma_ou));
    max_tr = std::max(max_tr, std::abs(t.gamma_tr));
  }
  if (!(std::abs(b) >= 1e-12 * (max_ou / max_tr)) || b == 0.0) {
    throw Error(ErrorKind::VanishingDenominator,
                "exposure-on-exposure slope is numerically zero; the two cohorts share no signal");
  }
}

MrEstimate make(Method m, double beta, std::size_t p) {
  MrEstimate e;
  e.method = m;
  e.beta = beta;
  e.n_snps = p;
  return e;
}

}  // namespace

MrEstimate mr_wald(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 1);
  const double b = wls_origin(pairs(triples, Response::GammaOu, Response::GammaOu, 2));
  const double b_beta = wls_origin(pairs(triples, Response::CapGammaOu, Response::CapGammaOu, 2));
  check_denominator(b, triples);
  MrEstimate e = make(Method::MrWald, b_beta / b, triples.size());
  e.auxiliary["b_hat"] = b;
  e.auxiliary["b_beta_hat"] = b_beta;
  return e;
}

MrEstimate mr_wald_r(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 1);
  // w1 is built from se_capgamma and goes with the exposure fit; w2 from
  // se_gamma_ou with the outcome fit.
  const double b = l1_origin(pairs(triples, Response::GammaOu, Response::CapGammaOu, 1));
  const double b_beta = l1_origin(pairs(triples, Response::CapGammaOu, Response::GammaOu, 1));
  check_denominator(b, triples);
  MrEstimate e = make(Method::MrWaldR, b_beta / b, triples.size());
  e.auxiliary["b_tilde"] = b;
  e.auxiliary["b_beta_tilde"] = b_beta;
  return e;
}

MrEstimate mr_wald_d(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 3);
  const AffineFit exposure = wls_intercept(pairs(triples, Response::GammaOu, Response::GammaOu, 2));
  const AffineFit outcome = wls_intercept(pairs(triples, Response::CapGammaOu, Response::CapGammaOu, 2));
  check_denominator(exposure.slope, triples);
  MrEstimate e = make(Method::MrWaldD, outcome.slope / exposure.slope, triples.size());
  e.auxiliary["b_tilde"] = exposure.slope;
  e.auxiliary["b_beta_tilde"] = outcome.slope;
  e.auxiliary["eta_exposure"] = exposure.intercept;
  e.auxiliary["eta_outcome"] = outcome.intercept;
  return e;
}

MrEstimate ivw(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 1);
  return make(Method::Ivw, wls_origin(pairs(triples, Response::CapGammaOu, Response::CapGammaOu, 2)),
              triples.size());
}

MrEstimate egger(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 3);
  const AffineFit fit = wls_intercept(pairs(triples, Response::CapGammaOu, Response::CapGammaOu, 2));
  MrEstimate e = make(Method::Egger, fit.slope, triples.size());
  e.auxiliary["intercept"] = fit.intercept;
  return e;
}

MrEstimate weighted_median(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 1);
  const RatioMedian r = weighted_median_ratio(triples);
  MrEstimate e = make(Method::WeightedMedian, r.estimate, r.n_used);
  e.auxiliary["n_dropped_zero_exposure"] = static_cast<double>(r.n_dropped_zero_exposure);
  return e;
}

MrEstimate divw_estimate(std::span<const HarmonizedTriple> triples) {
  require_snps(triples, 1);
  const DivwEstimate d = divw(triples);
  MrEstimate e = make(Method::Divw, d.beta, triples.size());
  e.se = d.se;
  e.auxiliary["analytic_se"] = d.se;
  e.auxiliary["denominator"] = d.denominator;
  return e;
}

MrEstimate point_estimate(Method method, std::span<const HarmonizedTriple> triples) {
  switch (method) {
    case Method::MrWald: return mr_wald(triples);
    case Method::MrWaldR: return mr_wald_r(triples);
    case Method::MrWaldD: return mr_wald_d(triples);
    case Method::Ivw: return ivw(triples);
    case Method::Divw: return divw_estimate(triples);
    case Method::Egger: return egger(triples);
    case Method::WeightedMedian: return weighted_median(triples);
  }
  throw Error(ErrorKind::BadConfig, "unknown method");
}

double estimate_beta(Method method, std::span<const HarmonizedTriple> triples) {
  switch (method) {
    case Method::Divw: return divw(triples).beta;
    case Method::WeightedMedian: return weighted_median_ratio(triples).estimate;
    default: return point_estimate(method, triples).beta;
  }
}

namespace simulation_only {

double oracle_variance_v1(std::span<const double> true_gamma_tr, std::span<const double> true_gamma_ou,
                          std::span<const double> se_gamma_tr, std::span<const double> se_gamma_ou,
                          std::span<const double> sigma_u) {
  const std::size_t p = true_gamma_tr.size();
  if (true_gamma_ou.size() != p || se_gamma_tr.size() != p || se_gamma_ou.size() != p ||
      sigma_u.size() != p) {
    throw Error(ErrorKind::DegenerateInput, "oracle variance inputs differ in length");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double s2 = se_gamma_ou[j] * se_gamma_ou[j];
    num += (true_gamma_tr[j] * true_gamma_tr[j] + se_gamma_tr[j] * se_gamma_tr[j]) *
           sigma_u[j] * sigma_u[j] / (s2 * s2);
    den += true_gamma_tr[j] * true_gamma_ou[j] / s2;
  }
  if (den == 0.0) throw Error(ErrorKind::VanishingDenominator, "sum gamma_tr gamma_ou / se^2 is zero");
  return num / (den * den);
}

}  // namespace simulation_only
}  // namespace mrhet
