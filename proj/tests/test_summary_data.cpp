#include <doctest.h>

#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "mrhet/errors.hpp"
#include "mrhet/summary_data.hpp"
#include "oracles.hpp"

using namespace mrhet;

namespace {

ParsedSummary parse_text(const std::string& text, const ColumnMapping& cols = {},
                         ParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_summary_stream(in, "mem.tsv", cols, opts);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

SnpRecord rec(std::string id, std::string ea, std::string oa, double beta, double se = 0.01) {
  return SnpRecord{std::move(id), std::move(ea), std::move(oa), beta, se, std::nullopt};
}

const char* kHeader = "snp\teffect_allele\tother_allele\tbeta\tse\tn\n";

}  // namespace

TEST_CASE("parse maps one row onto one record") {
  const auto p = parse_text(std::string(kHeader) + "rs1\tA\tG\t0.05\t0.01\t1000\n");
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0] == SnpRecord{"rs1", "A", "G", 0.05, 0.01, 1000.0});
  CHECK(p.dropped_malformed == 0);
}

TEST_CASE("parse upper-cases alleles and treats NA sample size as absent") {
  const auto p = parse_text(std::string(kHeader) + "rs1\ta\tg\t-0.5\t0.1\tNA\n");
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0].effect_allele == "A");
  CHECK(p.records[0].other_allele == "G");
  CHECK_FALSE(p.records[0].n.has_value());
}

TEST_CASE("the n column is optional") {
  const auto p = parse_text("snp\teffect_allele\tother_allele\tbeta\tse\nrs9\tC\tT\t1\t2\n");
  REQUIRE(p.records.size() == 1);
  CHECK_FALSE(p.records[0].n.has_value());
}

TEST_CASE("custom column mapping") {
  const auto cols = ColumnMapping::parse("snp=rsid, ea=A1, oa=A2, beta=b, se=s");
  const auto p = parse_text("rsid\tA1\tA2\tb\ts\nrs3\tT\tC\t0.2\t0.03\n", cols);
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0].snp_id == "rs3");
  CHECK(p.records[0].beta == 0.2);
  CHECK(kind_of([] { ColumnMapping::parse("pval=p"); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { ColumnMapping::parse("beta"); }) == ErrorKind::BadConfig);
}

TEST_CASE("missing column names the column") {
  try {
    parse_text("snp\teffect_allele\tother_allele\tbeta\nrs1\tA\tG\t0.1\n");
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingColumn);
    REQUIRE(e.column().has_value());
    CHECK(*e.column() == "se");
  }
}

TEST_CASE("zero standard error is a malformed row with its line number") {
  try {
    parse_text(std::string(kHeader) + "rs1\tA\tG\t0.05\t0.01\t10\nrs2\tA\tG\t0.05\t0\t10\n");
    FAIL("expected MalformedRow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedRow);
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 3);
  }
}

TEST_CASE("malformed rows") {
  const std::string h = kHeader;
  CHECK(kind_of([&] { parse_text(h + "rs1\tA\tG\tabc\t0.1\t10\n"); }) == ErrorKind::MalformedRow);
  CHECK(kind_of([&] { parse_text(h + "rs1\tA\tG\t0.1\t-1\t10\n"); }) == ErrorKind::MalformedRow);
  CHECK(kind_of([&] { parse_text(h + "rs1\tA\tA\t0.1\t0.1\t10\n"); }) == ErrorKind::MalformedRow);
  CHECK(kind_of([&] { parse_text(h + "rs1\tA\tG\t0.1\t0.1\n"); }) == ErrorKind::MalformedRow);
  CHECK(kind_of([&] { parse_text(h + "rs1\tA\tG\tinf\t0.1\t10\n"); }) == ErrorKind::MalformedRow);
}

TEST_CASE("lenient mode counts and drops malformed rows") {
  const auto p = parse_text(std::string(kHeader) +
                                "rs1\tA\tG\t0.05\t0.01\t10\nrs2\tA\tG\tx\t0.01\t10\nrs3\tA\tG\t0.1\t0\t10\n"
                                "rs4\tC\tT\t0.2\t0.02\t10\n",
                            {}, ParseOptions{true});
  CHECK(p.records.size() == 2);
  CHECK(p.dropped_malformed == 2);
}

TEST_CASE("duplicate SNP ids are rejected even in lenient mode") {
  const std::string text = std::string(kHeader) + "rs1\tA\tG\t0.05\t0.01\t10\nrs1\tA\tG\t0.06\t0.01\t10\n";
  CHECK(kind_of([&] { parse_text(text); }) == ErrorKind::DuplicateSnpId);
  CHECK(kind_of([&] { parse_text(text, {}, ParseOptions{true}); }) == ErrorKind::DuplicateSnpId);
}

TEST_CASE("missing file is an Io error") {
  CHECK(kind_of([] { parse_summary_file("/nonexistent/x.tsv", {}); }) == ErrorKind::Io);
}

TEST_CASE("harmonize flips the sign of a swapped record") {
  const std::vector<SnpRecord> tr{rec("rs1", "A", "G", 0.05)};
  const std::vector<SnpRecord> og{rec("rs1", "G", "A", -0.04)};
  const std::vector<SnpRecord> oc{rec("rs1", "A", "G", 0.02)};
  const auto h = harmonize(tr, og, oc);
  REQUIRE(h.triples.size() == 1);
  CHECK(h.triples[0].gamma_ou == doctest::Approx(0.04));
  CHECK(h.triples[0].capgamma_ou == doctest::Approx(0.02));
  CHECK(h.report.flipped == 1);
  CHECK(h.report.kept == 1);
}

TEST_CASE("harmonize drops allele mismatches") {
  const std::vector<SnpRecord> tr{rec("rs1", "A", "G", 0.05), rec("rs2", "A", "G", 0.05)};
  const std::vector<SnpRecord> ou{rec("rs1", "A", "G", 0.05), rec("rs2", "C", "T", 0.05)};
  const auto h = harmonize(tr, ou, ou);
  CHECK(h.report.dropped_mismatch == 1);
  CHECK(h.report.kept == 1);
}

TEST_CASE("identical allele orders keep the whole intersection") {
  std::vector<SnpRecord> tr, og, oc;
  for (int i = 0; i < 5; ++i) {
    tr.push_back(rec("rs" + std::to_string(i), "A", "C", 0.1 * i));
    og.push_back(rec("rs" + std::to_string(i), "A", "C", 0.2 * i));
    oc.push_back(rec("rs" + std::to_string(i), "A", "C", 0.3 * i));
  }
  og.push_back(rec("only_og", "A", "C", 1.0));
  const auto h = harmonize(tr, og, oc);
  CHECK(h.report.kept == 5);
  CHECK(h.report.flipped == 0);
  CHECK(h.report.dropped_missing == 1);
  for (int i = 0; i < 5; ++i) CHECK(h.triples[i].snp_id == "rs" + std::to_string(i));
}

TEST_CASE("palindromic policy") {
  const std::vector<SnpRecord> tr{rec("rs1", "A", "T", 0.05), rec("rs2", "C", "G", 0.05),
                                  rec("rs3", "A", "G", 0.05)};
  const auto drop = harmonize(tr, tr, tr, PalindromicPolicy::Drop);
  CHECK(drop.report.dropped_palindromic == 2);
  CHECK(drop.report.kept == 1);
  const auto keep = harmonize(tr, tr, tr, PalindromicPolicy::Keep);
  CHECK(keep.report.dropped_palindromic == 0);
  CHECK(keep.report.kept == 3);
  CHECK(is_palindromic("g", "c"));
  CHECK_FALSE(is_palindromic("A", "G"));
}

TEST_CASE("empty intersection") {
  const std::vector<SnpRecord> a{rec("rs1", "A", "G", 0.05)};
  const std::vector<SnpRecord> b{rec("rs2", "A", "G", 0.05)};
  CHECK(kind_of([&] { harmonize(a, b, b); }) == ErrorKind::EmptyIntersection);
  const std::vector<SnpRecord> c{rec("rs1", "C", "T", 0.05)};
  CHECK(kind_of([&] { harmonize(a, c, c); }) == ErrorKind::EmptyIntersection);
}

TEST_CASE("report counts add up to the intersection") {
  std::mt19937_64 gen(11);
  const char* alleles[] = {"A", "C", "G", "T"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SnpRecord> files[3];
    for (auto& f : files) {
      for (int i = 0; i < 40; ++i) {
        if (gen() % 4 == 0) continue;
        std::string ea = alleles[gen() % 4];
        std::string oa;
        do oa = alleles[gen() % 4]; while (oa == ea);
        f.push_back(rec("rs" + std::to_string(i), ea, oa, 0.1));
      }
    }
    std::set<std::string> ids[3];
    for (int k = 0; k < 3; ++k)
      for (const auto& r : files[k]) ids[k].insert(r.snp_id);
    std::size_t inter = 0;
    std::set<std::string> uni;
    for (const auto& id : ids[0]) inter += ids[1].count(id) && ids[2].count(id);
    for (const auto& s : ids) uni.insert(s.begin(), s.end());

    HarmonizationReport r;
    try {
      r = harmonize(files[0], files[1], files[2]).report;
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::EmptyIntersection);
      continue;
    }
    CHECK(r.kept + r.dropped_mismatch + r.dropped_palindromic == inter);
    CHECK(r.dropped_missing == uni.size() - inter);
    CHECK(r.flipped <= r.kept);
  }
}

TEST_CASE("harmonization is idempotent and symmetric under allele swaps") {
  std::vector<SnpRecord> tr, og, oc;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "rs" + std::to_string(i);
    tr.push_back(rec(id, "A", "G", 0.01 * (i + 1), 0.002));
    og.push_back(i % 2 ? rec(id, "G", "A", -0.012 * (i + 1), 0.003) : rec(id, "A", "G", 0.012 * (i + 1), 0.003));
    oc.push_back(i % 3 ? rec(id, "A", "G", 0.004 * (i + 1), 0.001) : rec(id, "G", "A", -0.004 * (i + 1), 0.001));
  }
  const auto first = harmonize(tr, og, oc);

  std::vector<SnpRecord> tr2, og2, oc2;
  for (const auto& t : first.triples) {
    tr2.push_back(rec(t.snp_id, "A", "G", t.gamma_tr, t.se_gamma_tr));
    og2.push_back(rec(t.snp_id, "A", "G", t.gamma_ou, t.se_gamma_ou));
    oc2.push_back(rec(t.snp_id, "A", "G", t.capgamma_ou, t.se_capgamma_ou));
  }
  const auto second = harmonize(tr2, og2, oc2);
  CHECK(second.triples == first.triples);
  CHECK(second.report.flipped == 0);

  auto swapped = og;
  for (auto& r : swapped) {
    std::swap(r.effect_allele, r.other_allele);
    r.beta = -r.beta;
  }
  CHECK(harmonize(tr, swapped, oc).triples == first.triples);
}

TEST_CASE("marginal regression exact fits") {
  {
    const std::vector<double> z{0, 1, 2}, y{0, 1, 2};
    const auto r = marginal_regression(z, y);
    CHECK(r.beta == doctest::Approx(1.0));
    CHECK(r.se == doctest::Approx(0.0));
  }
  {
    const std::vector<double> z{0, 1, 2, 1}, y{1, 3, 5, 3};
    const auto r = marginal_regression(z, y);
    CHECK(r.beta == doctest::Approx(2.0));
    CHECK(r.se == doctest::Approx(0.0));
  }
}

TEST_CASE("marginal regression of an affine trait returns the slope with zero se") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(gen), b = u(gen);
    std::vector<double> z(30), y(30);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = static_cast<double>(gen() % 3);
      y[i] = a + b * z[i];
    }
    z[0] = 0;
    z[1] = 2;
    y[0] = a;
    y[1] = a + 2 * b;
    const auto r = marginal_regression(z, y);
    CHECK(std::abs(r.beta - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    CHECK(r.se <= 1e-12);
  }
}

TEST_CASE("marginal regression matches explicit normal equations") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z(50), y(50);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = static_cast<double>(gen() % 3);
      y[i] = 0.3 * z[i] + nd(gen);
    }
    const auto r = marginal_regression(z, y);
    const auto [b, se] = oracle::ols_with_se(z, y);
    CHECK(std::abs(r.beta - b) <= 1e-10);
    CHECK(std::abs(r.se - se) <= 1e-10);

    std::vector<std::uint8_t> zi(z.begin(), z.end());
    const auto rk = marginal_regression(zi, center_trait(y));
    CHECK(std::abs(rk.beta - b) <= 1e-10);
    CHECK(std::abs(rk.se - se) <= 1e-10);
  }
}

TEST_CASE("marginal regression preconditions") {
  const std::vector<double> c{1, 1, 1, 1}, y{1, 2, 3, 4};
  CHECK(kind_of([&] { marginal_regression(c, y); }) == ErrorKind::DegenerateGenotype);
  const std::vector<std::uint8_t> ci{2, 2, 2, 2};
  CHECK(kind_of([&] { marginal_regression(ci, center_trait(y)); }) == ErrorKind::DegenerateGenotype);
  const std::vector<double> z2{0, 1}, y2{1, 2};
  CHECK(kind_of([&] { marginal_regression(z2, y2); }) == ErrorKind::DegenerateInput);
}
