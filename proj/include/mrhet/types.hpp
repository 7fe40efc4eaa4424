#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrhet {

// One SNP's marginal association from one GWAS.
struct SnpRecord {
  std::string snp_id;
  std::string effect_allele;
  std::string other_allele;
  double beta = 0.0;
  double se = 0.0;
  std::optional<double> n;

  bool operator==(const SnpRecord&) const = default;
};

// Treatment-side exposure association plus the outcome cohort's exposure and
// outcome associations, all expressed for the same effect allele.
struct HarmonizedTriple {
  std::string snp_id;
  double gamma_tr = 0.0;
  double se_gamma_tr = 0.0;
  double gamma_ou = 0.0;
  double se_gamma_ou = 0.0;
  double capgamma_ou = 0.0;
  double se_capgamma_ou = 0.0;

  bool operator==(const HarmonizedTriple&) const = default;
};

enum class Method { MrWald, MrWaldR, MrWaldD, Ivw, Divw, Egger, WeightedMedian };

inline constexpr Method kAllMethods[] = {Method::MrWald, Method::MrWaldR, Method::MrWaldD,
                                         Method::Ivw,    Method::Divw,    Method::Egger,
                                         Method::WeightedMedian};

std::string_view method_name(Method m);
// Accepts the canonical names ("MrWaldR") and dashed lower-case aliases ("mr-wald-r").
std::optional<Method> parse_method(std::string_view text);
// Comma separated list; throws Error(BadConfig) on an unknown entry.
std::vector<Method> parse_method_list(std::string_view text);

struct MrEstimate {
  Method method = Method::MrWald;
  double beta = 0.0;
  std::optional<double> se;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  double level = 0.95;
  std::size_t n_snps = 0;
  std::map<std::string, double> auxiliary;
};

}  // namespace mrhet
