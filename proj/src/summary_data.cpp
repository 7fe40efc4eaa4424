#include "mrhet/summary_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "mrhet/errors.hpp"
#include "mrhet/kernels.hpp"

namespace mrhet {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, tab - start)));
    start = tab + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == ".";
}

}  // namespace

ColumnMapping ColumnMapping::parse(std::string_view spec) { return parse(spec, ColumnMapping{}); }

ColumnMapping ColumnMapping::parse(std::string_view spec, ColumnMapping base) {
  std::size_t start = 0;
  while (start < spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = trim(spec.substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorKind::BadConfig, "bad column mapping entry '" + std::string(item) + "'");
    }
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    if (key == "snp") base.snp = value;
    else if (key == "effect_allele" || key == "ea") base.effect_allele = value;
    else if (key == "other_allele" || key == "oa") base.other_allele = value;
    else if (key == "beta") base.beta = value;
    else if (key == "se") base.se = value;
    else if (key == "n") base.n = value;
    else throw Error(ErrorKind::BadConfig, "unknown column key '" + key + "'");
  }
  return base;
}

ParsedSummary parse_summary_stream(std::istream& in, std::string_view source_name,
                                   const ColumnMapping& columns, ParseOptions options) {
  const std::string source(source_name);
  std::string line;
  std::size_t line_no = 0;

  // Header: first non-empty line.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto f : split_tabs(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::MalformedRow, source + ": missing header row");

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto require = [&](const std::string& name) {
    const auto idx = find_column(name);
    if (!idx) throw Error::missing_column(name, source);
    return *idx;
  };
  const std::size_t c_snp = require(columns.snp);
  const std::size_t c_ea = require(columns.effect_allele);
  const std::size_t c_oa = require(columns.other_allele);
  const std::size_t c_beta = require(columns.beta);
  const std::size_t c_se = require(columns.se);
  const std::optional<std::size_t> c_n = find_column(columns.n);

  ParsedSummary out;
  std::unordered_set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);

    std::optional<SnpRecord> rec;
    std::string why;
    if (fields.size() != header.size()) {
      why = "expected " + std::to_string(header.size()) + " fields, found " +
            std::to_string(fields.size());
    } else {
      SnpRecord r;
      r.snp_id = std::string(fields[c_snp]);
      r.effect_allele = upper(fields[c_ea]);
      r.other_allele = upper(fields[c_oa]);
      const auto beta = to_double(fields[c_beta]);
      const auto se = to_double(fields[c_se]);
      if (r.snp_id.empty()) {
        why = "empty SNP id";
      } else if (r.effect_allele.empty() || r.other_allele.empty()) {
        why = "empty allele";
      } else if (r.effect_allele == r.other_allele) {
        why = "effect allele equals other allele";
      } else if (!beta || !std::isfinite(*beta)) {
        why = "unparseable beta '" + std::string(fields[c_beta]) + "'";
      } else if (!se || !std::isfinite(*se) || *se <= 0.0) {
        why = "standard error must be a positive number, got '" + std::string(fields[c_se]) + "'";
      } else {
        r.beta = *beta;
        r.se = *se;
        if (c_n && !is_missing_token(fields[*c_n])) {
          const auto n = to_double(fields[*c_n]);
          if (!n || !std::isfinite(*n) || *n <= 0.0) {
            why = "sample size must be positive, got '" + std::string(fields[*c_n]) + "'";
          } else {
            r.n = *n;
          }
        }
        if (why.empty()) rec = std::move(r);
      }
    }

    if (!rec) {
      if (options.lenient) {
        ++out.dropped_malformed;
        continue;
      }
      throw Error::malformed_row(line_no, source, why);
    }
    if (!seen.insert(rec->snp_id).second) {
      throw Error(ErrorKind::DuplicateSnpId,
                  source + ":" + std::to_string(line_no) + ": duplicate SNP id '" + rec->snp_id + "'");
    }
    out.records.push_back(std::move(*rec));
  }
  return out;
}

ParsedSummary parse_summary_file(const std::filesystem::path& path, const ColumnMapping& columns,
                                 ParseOptions options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse_summary_stream(in, path.string(), columns, options);
}

bool is_palindromic(std::string_view a1, std::string_view a2) {
  const std::string x = upper(a1);
  const std::string y = upper(a2);
  return (x == "A" && y == "T") || (x == "T" && y == "A") || (x == "C" && y == "G") ||
         (x == "G" && y == "C");
}

Harmonized harmonize(std::span<const SnpRecord> tr, std::span<const SnpRecord> ou_gamma,
                     std::span<const SnpRecord> ou_capgamma, PalindromicPolicy policy) {
  auto index = [](std::span<const SnpRecord> recs) {
    std::unordered_map<std::string_view, const SnpRecord*> map;
    map.reserve(recs.size());
    for (const auto& r : recs) map.emplace(r.snp_id, &r);
    return map;
  };
  const auto gamma_by_id = index(ou_gamma);
  const auto capgamma_by_id = index(ou_capgamma);

  Harmonized out;
  auto& rep = out.report;
  std::unordered_set<std::string_view> union_ids;
  for (const auto& r : tr) union_ids.insert(r.snp_id);
  for (const auto& r : ou_gamma) union_ids.insert(r.snp_id);
  for (const auto& r : ou_capgamma) union_ids.insert(r.snp_id);

  // +1 same orientation, -1 swapped, 0 incompatible.
  auto orientation = [](const SnpRecord& ref, const SnpRecord& other) {
    if (other.effect_allele == ref.effect_allele && other.other_allele == ref.other_allele) return 1;
    if (other.effect_allele == ref.other_allele && other.other_allele == ref.effect_allele) return -1;
    return 0;
  };

  std::size_t intersection = 0;
  for (const auto& t : tr) {
    const auto g = gamma_by_id.find(t.snp_id);
    const auto c = capgamma_by_id.find(t.snp_id);
    if (g == gamma_by_id.end() || c == capgamma_by_id.end()) continue;
    ++intersection;

    if (policy == PalindromicPolicy::Drop && is_palindromic(t.effect_allele, t.other_allele)) {
      ++rep.dropped_palindromic;
      continue;
    }
    const int og = orientation(t, *g->second);
    const int oc = orientation(t, *c->second);
    if (og == 0 || oc == 0) {
      ++rep.dropped_mismatch;
      continue;
    }
    if (og < 0 || oc < 0) ++rep.flipped;

    HarmonizedTriple h;
    h.snp_id = t.snp_id;
    h.gamma_tr = t.beta;
    h.se_gamma_tr = t.se;
    h.gamma_ou = og * g->second->beta;
    h.se_gamma_ou = g->second->se;
    h.capgamma_ou = oc * c->second->beta;
    h.se_capgamma_ou = c->second->se;
    out.triples.push_back(std::move(h));
    ++rep.kept;
  }
  rep.dropped_missing = union_ids.size() - intersection;

  if (out.triples.empty()) {
    throw Error(ErrorKind::EmptyIntersection,
                "no SNP survived harmonization (" + std::to_string(intersection) +
                    " shared ids, " + std::to_string(rep.dropped_mismatch) + " allele mismatches, " +
                    std::to_string(rep.dropped_palindromic) + " palindromic)");
  }
  return out;
}

RegressionResult marginal_regression(std::span<const double> z, std::span<const double> y) {
  const std::size_t n = z.size();
  if (y.size() != n) throw Error(ErrorKind::DegenerateInput, "genotype and trait lengths differ");
  if (n < 3) throw Error(ErrorKind::DegenerateInput, "marginal regression needs n >= 3");

  double zbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zbar += z[i];
    ybar += y[i];
  }
  zbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);

  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dz = z[i] - zbar;
    szz += dz * dz;
    szy += dz * (y[i] - ybar);
  }
  if (!(szz > 0.0)) throw Error(ErrorKind::DegenerateGenotype, "genotype column is constant");

  const double beta = szy / szz;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (y[i] - ybar) - beta * (z[i] - zbar);
    rss += r * r;
  }
  const double se = std::sqrt(rss / static_cast<double>(n - 2) / szz);
  return {beta, se};
}

CenteredTrait center_trait(std::span<const double> y) {
  CenteredTrait out;
  out.values.assign(y.begin(), y.end());
  if (y.empty()) return out;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (double& v : out.values) {
    v -= mean;
    out.sum_sq += v * v;
  }
  return out;
}

RegressionResult marginal_regression(std::span<const std::uint8_t> z, const CenteredTrait& y) {
  const std::size_t n = z.size();
  if (y.values.size() != n) throw Error(ErrorKind::DegenerateInput, "genotype and trait lengths differ");
  if (n < 3) throw Error(ErrorKind::DegenerateInput, "marginal regression needs n >= 3");

  const auto sums = kernels::genotype_sums(z);
  // n * sum (z - zbar)^2 in exact integer arithmetic.
  const std::uint64_t n_szz = static_cast<std::uint64_t>(n) * sums.sum_sq - sums.sum * sums.sum;
  if (n_szz == 0) throw Error(ErrorKind::DegenerateGenotype, "genotype column is constant");
  const double szz = static_cast<double>(n_szz) / static_cast<double>(n);
  // y is centred, so sum z (y - ybar) = sum (z - zbar)(y - ybar).
  const double szy = kernels::dot_genotype(z, y.values);

  const double beta = szy / szz;
  const double rss = std::max(0.0, y.sum_sq - beta * szy);
  const double se = std::sqrt(rss / static_cast<double>(n - 2) / szz);
  return {beta, se};
}

}  // namespace mrhet
