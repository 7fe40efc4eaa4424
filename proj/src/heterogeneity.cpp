#include "mrhet/heterogeneity.hpp"

#include <cmath>
#include <limits>

#include "mrhet/errors.hpp"

namespace mrhet {
namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-14;
constexpr double kTiny = 1e-300;

// x^a e^-x / Gamma(a)
double prefactor(double a, double x) { return std::exp(a * std::log(x) - x - std::lgamma(a)); }

double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum * prefactor(a, x);
  }
  throw Error(ErrorKind::NonConvergence, "incomplete gamma series did not converge");
}

double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return prefactor(a, x) * h;
  }
  throw Error(ErrorKind::NonConvergence, "incomplete gamma continued fraction did not converge");
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw Error(ErrorKind::DegenerateInput, "incomplete gamma needs a > 0 and x >= 0");
  }
}

// Series below x < a + 1/2, i.e. chi-square argument below df + 1.
bool use_series(double a, double x) { return x < a + 0.5; }

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (use_series(a, x)) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (use_series(a, x)) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chisq_sf(double x, double df) {
  if (!(df > 0.0)) throw Error(ErrorKind::DegenerateInput, "degrees of freedom must be positive");
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

HetTestResult het_test(std::span<const HarmonizedTriple> triples) {
  if (triples.empty()) throw Error(ErrorKind::DegenerateInput, "heterogeneity test needs p >= 1");
  HetTestResult out;
  out.df = triples.size();
  out.per_snp.reserve(triples.size());
  for (const auto& t : triples) {
    const double diff = t.gamma_ou - t.gamma_tr;
    const double contribution =
        diff * diff / (t.se_gamma_ou * t.se_gamma_ou + t.se_gamma_tr * t.se_gamma_tr);
    out.per_snp.push_back(contribution);
    out.statistic += contribution;
  }
  out.p_value = chisq_sf(out.statistic, static_cast<double>(out.df));
  return out;
}

}  // namespace mrhet
