#include "mrhet/core_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mrhet/errors.hpp"
#include "mrhet/kernels.hpp"

namespace mrhet {

WeightedPairs::WeightedPairs(std::vector<double> x_, std::vector<double> y_, std::vector<double> w_)
    : x(std::move(x_)), y(std::move(y_)), w(std::move(w_)) {
  if (x.size() != y.size() || x.size() != w.size()) {
    throw Error(ErrorKind::DegenerateInput, "regressor, response and weights differ in length");
  }
  if (x.empty()) throw Error(ErrorKind::DegenerateInput, "no data points");
  for (double wi : w) {
    if (!(wi > 0.0) || !std::isfinite(wi)) {
      throw Error(ErrorKind::DegenerateInput, "weights must be positive and finite");
    }
  }
}

double wls_origin(const WeightedPairs& d) {
  const auto m = kernels::weighted_cross(d.x, d.y, d.w, 0.0, 0.0);
  if (!(m.wxx > 0.0)) throw Error(ErrorKind::DegenerateDesign, "all regressors are zero");
  return m.wxy / m.wxx;
}

AffineFit wls_intercept(const WeightedPairs& d) {
  if (d.size() < 3) {
    throw Error(ErrorKind::DegenerateDesign, "intercept regression needs at least 3 points");
  }
  const auto s = kernels::weighted_sums(d.x, d.y, d.w);
  const double xbar = s.wx / s.w;
  const double ybar = s.wy / s.w;
  const auto c = kernels::weighted_cross(d.x, d.y, d.w, xbar, ybar);
  const auto raw = kernels::weighted_cross(d.x, d.x, d.w, 0.0, 0.0);
  if (!(c.wxx > 1e-12 * raw.wxx)) {
    throw Error(ErrorKind::DegenerateDesign, "regressor is constant under the weights");
  }
  const double slope = c.wxy / c.wxx;
  return {slope, ybar - slope * xbar};
}

double l1_origin(const WeightedPairs& d) {
  std::vector<std::pair<double, double>> pts;  // (ratio, mass)
  pts.reserve(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d.x[j] == 0.0) continue;
    pts.emplace_back(d.y[j] / d.x[j], d.w[j] * std::abs(d.x[j]));
  }
  if (pts.empty()) throw Error(ErrorKind::DegenerateDesign, "all regressors are zero");
  std::sort(pts.begin(), pts.end());

  double total = 0.0;
  for (const auto& p : pts) total += p.second;
  // The objective's slope right of pts[k] is 2 * cum_k - total.
  const double tol = 1e-12 * total;
  double cum = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cum += pts[k].second;
    const double slope = 2.0 * cum - total;
    if (slope < -tol) continue;
    if (slope <= tol && k + 1 < pts.size()) return 0.5 * (pts[k].first + pts[k + 1].first);
    return pts[k].first;
  }
  return pts.back().first;
}

double interpolated_weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw Error(ErrorKind::DegenerateDesign, "weighted median needs matching, non-empty inputs");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> s(order.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += weights[order[k]];
    s[k] = (cum - 0.5 * weights[order[k]]) / total;
  }

  if (!(s.front() < 0.5)) return values[order.front()];
  std::size_t below = 0;
  while (below + 1 < s.size() && s[below + 1] < 0.5) ++below;
  if (below + 1 == s.size()) return values[order.back()];
  const double lo = values[order[below]];
  const double hi = values[order[below + 1]];
  return lo + (hi - lo) * (0.5 - s[below]) / (s[below + 1] - s[below]);
}

RatioMedian weighted_median_ratio(std::span<const HarmonizedTriple> triples) {
  std::vector<double> ratio;
  std::vector<double> weight;
  ratio.reserve(triples.size());
  weight.reserve(triples.size());
  RatioMedian out;
  for (const auto& t : triples) {
    if (t.gamma_tr == 0.0) {
      ++out.n_dropped_zero_exposure;
      continue;
    }
    const double g2 = t.gamma_tr * t.gamma_tr;
    const double var = t.se_capgamma_ou * t.se_capgamma_ou / g2 +
                       t.capgamma_ou * t.capgamma_ou * t.se_gamma_tr * t.se_gamma_tr / (g2 * g2);
    ratio.push_back(t.capgamma_ou / t.gamma_tr);
    weight.push_back(1.0 / var);
  }
  if (ratio.empty()) throw Error(ErrorKind::DegenerateDesign, "no SNP with non-zero exposure effect");
  out.n_used = ratio.size();
  out.estimate = interpolated_weighted_median(ratio, weight);
  return out;
}

DivwEstimate divw(std::span<const HarmonizedTriple> triples) {
  if (triples.empty()) throw Error(ErrorKind::DegenerateInput, "no SNPs");
  double num = 0.0, den = 0.0, strength = 0.0;
  for (const auto& t : triples) {
    const double w = 1.0 / (t.se_capgamma_ou * t.se_capgamma_ou);
    const double g2 = t.gamma_tr * t.gamma_tr;
    num += w * t.capgamma_ou * t.gamma_tr;
    den += w * (g2 - t.se_gamma_tr * t.se_gamma_tr);
    strength += w * g2;
  }
  if (!(std::abs(den) >= 1e-12 * strength) || den == 0.0) {
    throw Error(ErrorKind::VanishingDenominator, "debiased instrument strength is zero");
  }
  DivwEstimate out;
  out.beta = num / den;
  out.denominator = den;

  // Plug-in of the asymptotic variance with gamma^2 estimated by gamma_hat^2 - se^2.
  double v = 0.0;
  for (const auto& t : triples) {
    const double s2 = t.se_capgamma_ou * t.se_capgamma_ou;
    const double x2 = t.se_gamma_tr * t.se_gamma_tr;
    const double g2 = t.gamma_tr * t.gamma_tr;
    v += g2 / s2 + out.beta * out.beta * x2 * (g2 + x2) / (s2 * s2);
  }
  out.se = std::sqrt(v) / std::abs(den);
  return out;
}

IvStrength iv_strength_diagnostics(std::span<const HarmonizedTriple> triples) {
  if (triples.empty()) throw Error(ErrorKind::DegenerateInput, "no SNPs");
  IvStrength out;
  for (const auto& t : triples) {
    const double ztr = t.gamma_tr / t.se_gamma_tr;
    const double zou = t.gamma_ou / t.se_gamma_tr;
    const double ratio = t.se_gamma_ou / t.se_gamma_tr;
    const double ktr = std::max(0.0, ztr * ztr - 1.0);
    const double kou = std::max(0.0, zou * zou - ratio * ratio);
    out.kappa_tr += ktr;
    out.kappa_ou += kou;
    out.kappa_co += std::sqrt(ktr * kou);
  }
  const double p = static_cast<double>(triples.size());
  out.kappa_tr /= p;
  out.kappa_ou /= p;
  out.kappa_co /= p;
  return out;
}

}  // namespace mrhet
