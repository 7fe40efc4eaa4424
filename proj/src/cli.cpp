#include "mrhet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mrhet/core_estimators.hpp"
#include "mrhet/errors.hpp"
#include "mrhet/heterogeneity.hpp"
#include "mrhet/inference.hpp"
#include "mrhet/mr_wald.hpp"
#include "mrhet/parallel.hpp"
#include "mrhet/serialize.hpp"
#include "mrhet/simulation.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {
namespace {

enum class Format { Json, Tsv };

struct InputOptions {
  std::string treatment;
  std::string outcome_exposure;
  std::string outcome;
  std::string columns;
  std::string treatment_columns;
  std::string outcome_exposure_columns;
  std::string outcome_columns;
  bool lenient = false;
  std::string palindromic = "drop";
};

struct OutputOptions {
  std::string path;
  std::string format = "json";
};

struct AnalyzeOptions {
  std::string methods = "MrWald";
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::string ci = "normal";
};

struct SimulateOptions {
  std::string config;
  std::string scenario;
  std::string g;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> p;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_boot;
  std::optional<std::uint64_t> boot_seed;
  std::optional<double> level;
  std::string methods;
  std::string ci;
};

void add_input_flags(CLI::App& cmd, InputOptions& in) {
  cmd.add_option("--treatment", in.treatment, "Treatment-cohort exposure summary TSV")->required();
  cmd.add_option("--outcome-exposure", in.outcome_exposure,
                 "Outcome-cohort exposure summary TSV")
      ->required();
  cmd.add_option("--outcome", in.outcome, "Outcome-cohort outcome summary TSV")->required();
  cmd.add_option("--columns", in.columns, "Header mapping for all inputs, e.g. snp=rsid,beta=b");
  cmd.add_option("--treatment-columns", in.treatment_columns, "Header mapping for --treatment");
  cmd.add_option("--outcome-exposure-columns", in.outcome_exposure_columns,
                 "Header mapping for --outcome-exposure");
  cmd.add_option("--outcome-columns", in.outcome_columns, "Header mapping for --outcome");
  cmd.add_flag("--lenient", in.lenient, "Drop malformed rows instead of failing");
  cmd.add_option("--palindromic", in.palindromic, "A/T and C/G SNPs: drop or keep")
      ->check(CLI::IsMember({"drop", "keep"}));
}

void add_output_flags(CLI::App& cmd, OutputOptions& out) {
  cmd.add_option("--output", out.path, "Write the result here instead of stdout");
  cmd.add_option("--output-format", out.format, "json or tsv")
      ->check(CLI::IsMember({"json", "tsv"}));
}

CiKind parse_ci(const std::string& s) {
  if (s == "normal") return CiKind::NormalApprox;
  if (s == "percentile") return CiKind::Percentile;
  throw Error(ErrorKind::BadConfig, "unknown ci kind '" + s + "' (normal, percentile)");
}

struct LoadedInputs {
  Harmonized harmonized;
  std::size_t malformed[3] = {0, 0, 0};
};

LoadedInputs load_inputs(const InputOptions& in) {
  const ColumnMapping shared = ColumnMapping::parse(in.columns);
  const auto mapping = [&](const std::string& specific) {
    return specific.empty() ? shared : ColumnMapping::parse(specific, shared);
  };
  const ParseOptions opts{in.lenient};
  const auto tr = parse_summary_file(in.treatment, mapping(in.treatment_columns), opts);
  const auto oe = parse_summary_file(in.outcome_exposure, mapping(in.outcome_exposure_columns), opts);
  const auto oo = parse_summary_file(in.outcome, mapping(in.outcome_columns), opts);
  LoadedInputs loaded;
  loaded.harmonized = harmonize(tr.records, oe.records, oo.records,
                                in.palindromic == "keep" ? PalindromicPolicy::Keep
                                                         : PalindromicPolicy::Drop);
  loaded.malformed[0] = tr.dropped_malformed;
  loaded.malformed[1] = oe.dropped_malformed;
  loaded.malformed[2] = oo.dropped_malformed;
  return loaded;
}

void emit(const OutputOptions& opts, const std::string& text, std::ostream& out) {
  if (opts.path.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(opts.path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot open output " + opts.path);
  file << text;
  if (!file.flush()) throw Error(ErrorKind::Io, "cannot write output " + opts.path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void cmd_analyze(const InputOptions& in, const AnalyzeOptions& a, const OutputOptions& o,
                 std::ostream& out) {
  const auto methods = parse_method_list(a.methods);
  if (methods.empty()) throw Error(ErrorKind::BadConfig, "at least one method is required");
  BootstrapConfig boot;
  boot.n_boot = a.n_boot;
  boot.seed = a.seed;
  boot.level = a.level;
  boot.ci_kind = parse_ci(a.ci);

  const LoadedInputs loaded = load_inputs(in);
  const auto& triples = loaded.harmonized.triples;
  const HetTestResult het = het_test(triples);

  std::vector<MrEstimate> estimates;
  std::vector<Estimator> estimators;
  for (Method m : methods) {
    estimates.push_back(point_estimate(m, triples));
    estimators.emplace_back([m](std::span<const HarmonizedTriple> t) { return estimate_beta(m, t); });
  }
  const auto outcomes = bootstrap_many(estimators, triples, boot, default_thread_count());
  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (!outcomes[k].result) {
      throw Error(ErrorKind::TooManyFailures,
                  std::string(method_name(methods[k])) + " bootstrap failed: " + outcomes[k].failure);
    }
    const auto& b = *outcomes[k].result;
    estimates[k].se = b.se;
    estimates[k].ci_low = b.ci_low;
    estimates[k].ci_high = b.ci_high;
    estimates[k].level = boot.level;
  }

  if (o.format == "tsv") {
    emit(o, estimates_tsv(estimates), out);
    return;
  }
  Json doc;
  doc["het_test"] = to_json(het);
  doc["harmonization"] = to_json(loaded.harmonized.report);
  Json est = Json::array();
  for (const auto& e : estimates) est.push_back(to_json(e));
  doc["estimates"] = est;
  Json diag;
  if (triples.size() >= 1) {
    const IvStrength iv = iv_strength_diagnostics(triples);
    diag["kappa_tr"] = round_sig(iv.kappa_tr);
    diag["kappa_ou"] = round_sig(iv.kappa_ou);
    diag["kappa_co"] = round_sig(iv.kappa_co);
  }
  diag["dropped_malformed"] = Json{{"treatment", loaded.malformed[0]},
                                   {"outcome_exposure", loaded.malformed[1]},
                                   {"outcome", loaded.malformed[2]}};
  diag["bootstrap"] = Json{{"n_boot", boot.n_boot},
                           {"seed", boot.seed},
                           {"ci", boot.ci_kind == CiKind::NormalApprox ? "normal" : "percentile"}};
  doc["diagnostics"] = diag;
  emit(o, dump(doc), out);
}

void cmd_het_test(const InputOptions& in, const OutputOptions& o, std::ostream& out) {
  const LoadedInputs loaded = load_inputs(in);
  const HetTestResult het = het_test(loaded.harmonized.triples);
  emit(o, o.format == "tsv" ? het_test_tsv(het) : dump(to_json(het)), out);
}

void cmd_simulate(const SimulateOptions& s, const OutputOptions& o, std::ostream& out) {
  SimulationRequest req =
      s.config.empty() ? default_simulation_request() : load_simulation_request(s.config);
  ScenarioConfig& c = req.scenario;
  if (!s.scenario.empty()) c.apply_scenario(s.scenario);
  if (!s.g.empty()) c.g = GFunction::from_shorthand(s.g);
  if (s.replicates) c.n_replicates = *s.replicates;
  if (s.p) c.p = *s.p;
  if (s.n) c.n = *s.n;
  if (s.seed) c.seed = *s.seed;
  if (s.n_boot) req.bootstrap.n_boot = *s.n_boot;
  if (s.boot_seed) req.bootstrap.seed = *s.boot_seed;
  if (s.level) req.bootstrap.level = *s.level;
  if (!s.ci.empty()) req.bootstrap.ci_kind = parse_ci(s.ci);
  if (!s.methods.empty()) req.methods = parse_method_list(s.methods);
  if (req.methods.empty()) throw Error(ErrorKind::BadConfig, "at least one method is required");
  c.validate();

  RunOptions run;
  run.threads = default_thread_count();
  const ScenarioSummary summary = run_scenario(c, req.methods, req.bootstrap, run);
  emit(o, o.format == "tsv" ? summary_tsv(summary) : dump(to_json(summary)), out);
}

void report(std::ostream& err, const Json& record) { err << record.dump() << '\n'; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mendelian randomization under exposure-effect heterogeneity", "mr_hetero"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  InputOptions in;
  OutputOptions o;
  AnalyzeOptions a;
  SimulateOptions s;

  auto* analyze = app.add_subcommand("analyze", "Estimate the causal effect from summary statistics");
  add_input_flags(*analyze, in);
  analyze->add_option("--methods", a.methods, "Comma-separated estimators")->capture_default_str();
  analyze->add_option("--boot", a.n_boot, "Bootstrap replicates")->capture_default_str();
  analyze->add_option("--seed", a.seed, "Bootstrap seed")->capture_default_str();
  analyze->add_option("--level", a.level, "Confidence level")->capture_default_str();
  analyze->add_option("--ci", a.ci, "normal or percentile")
      ->check(CLI::IsMember({"normal", "percentile"}))
      ->capture_default_str();
  add_output_flags(*analyze, o);

  auto* het = app.add_subcommand("het-test", "Test exposure-effect homogeneity across cohorts");
  add_input_flags(*het, in);
  add_output_flags(*het, o);

  auto* sim = app.add_subcommand("simulate", "Run a simulation scenario");
  sim->add_option("--config", s.config, "JSON scenario file");
  sim->add_option("--scenario", s.scenario, "Pleiotropy scenario i, ii, iii, iv or v");
  sim->add_option("--g", s.g, "identity, shift, sine or table:<path>");
  sim->add_option("--replicates", s.replicates, "Monte Carlo replicates");
  sim->add_option("--p", s.p, "Number of SNPs");
  sim->add_option("--n", s.n, "Individuals per cohort");
  sim->add_option("--seed", s.seed, "Data seed");
  sim->add_option("--boot", s.n_boot, "Bootstrap replicates per data set");
  sim->add_option("--boot-seed", s.boot_seed, "Bootstrap seed");
  sim->add_option("--level", s.level, "Confidence level");
  sim->add_option("--methods", s.methods, "Comma-separated estimators");
  sim->add_option("--ci", s.ci, "normal or percentile")
      ->check(CLI::IsMember({"normal", "percentile"}));
  add_output_flags(*sim, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, Json{{"error", "Usage"}, {"message", e.what()}});
    return 2;
  }

  try {
    if (analyze->parsed()) cmd_analyze(in, a, o, out);
    else if (het->parsed()) cmd_het_test(in, o, out);
    else cmd_simulate(s, o, out);
    return 0;
  } catch (const Error& e) {
    Json record{{"error", error_kind_name(e.kind())}, {"message", e.what()}};
    if (e.column()) record["column"] = *e.column();
    if (e.file()) record["file"] = *e.file();
    if (e.line()) record["line"] = *e.line();
    report(err, record);
    return 2;
  } catch (const std::exception& e) {
    report(err, Json{{"error", "Internal"}, {"message", e.what()}});
    return 1;
  }
}

}  // namespace mrhet
