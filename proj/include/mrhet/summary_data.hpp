#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrhet/types.hpp"

namespace mrhet {

// Header names for the fields of a summary-statistics TSV. `n` is optional in
// the file; all others must be present.
struct ColumnMapping {
  std::string snp = "snp";
  std::string effect_allele = "effect_allele";
  std::string other_allele = "other_allele";
  std::string beta = "beta";
  std::string se = "se";
  std::string n = "n";

  // Parses "key=header,key=header" over `base`. Keys: snp, effect_allele (ea),
  // other_allele (oa), beta, se, n.
  static ColumnMapping parse(std::string_view spec, ColumnMapping base);
  static ColumnMapping parse(std::string_view spec);
};

struct ParseOptions {
  bool lenient = false;  // count and drop malformed rows instead of failing
};

struct ParsedSummary {
  std::vector<SnpRecord> records;
  std::size_t dropped_malformed = 0;
};

ParsedSummary parse_summary_stream(std::istream& in, std::string_view source_name,
                                   const ColumnMapping& columns, ParseOptions options = {});
ParsedSummary parse_summary_file(const std::filesystem::path& path, const ColumnMapping& columns,
                                 ParseOptions options = {});

enum class PalindromicPolicy { Drop, Keep };

struct HarmonizationReport {
  std::size_t kept = 0;
  std::size_t flipped = 0;              // SNPs with at least one sign-flipped record
  std::size_t dropped_mismatch = 0;     // alleles match neither orientation
  std::size_t dropped_palindromic = 0;  // A/T or C/G under PalindromicPolicy::Drop
  std::size_t dropped_missing = 0;      // ids absent from at least one of the three inputs
};

struct Harmonized {
  std::vector<HarmonizedTriple> triples;
  HarmonizationReport report;
};

bool is_palindromic(std::string_view a1, std::string_view a2);

// Aligns both outcome-cohort inputs to the treatment file's effect allele.
// Output follows the treatment file's row order. Throws EmptyIntersection when
// nothing survives.
Harmonized harmonize(std::span<const SnpRecord> tr, std::span<const SnpRecord> ou_gamma,
                     std::span<const SnpRecord> ou_capgamma,
                     PalindromicPolicy policy = PalindromicPolicy::Drop);

struct RegressionResult {
  double beta = 0.0;
  double se = 0.0;
};

// Simple linear regression of y on z with intercept; se uses n - 2 residual
// degrees of freedom. Throws DegenerateGenotype for constant z.
RegressionResult marginal_regression(std::span<const double> z, std::span<const double> y);

// A trait vector centred once so that many genotype columns can be regressed
// against it.
struct CenteredTrait {
  std::vector<double> values;  // y - mean(y)
  double sum_sq = 0.0;         // sum (y - mean(y))^2
};

CenteredTrait center_trait(std::span<const double> y);

// Same estimator as above for a 0/1/2 genotype column, through the SIMD kernels.
RegressionResult marginal_regression(std::span<const std::uint8_t> z, const CenteredTrait& y);

}  // namespace mrhet
