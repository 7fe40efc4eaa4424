#include "mrhet/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "mrhet/errors.hpp"

namespace mrhet {
namespace {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x);
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::string optional_field(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string("NA");
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::BadConfig, what); }

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) bad("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string("key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const Json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    bad(std::string("key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

GFunction g_from_json(const Json& v, const std::string& base_dir) {
  const auto resolve = [&](const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : std::filesystem::path(base_dir) / p;
  };
  if (v.is_string()) {
    const auto text = v.get<std::string>();
    if (text.starts_with("table:")) return GFunction::load_table(resolve(text.substr(6)));
    return GFunction::from_shorthand(text);
  }
  if (!v.is_object() || !v.contains("kind")) bad("g must be a string or an object with 'kind'");
  const auto kind = get<std::string>(v, "kind", "");
  if (kind == "identity") {
    reject_unknown(v, {"kind"}, "g");
    return GFunction::identity();
  }
  if (kind == "shift") {
    reject_unknown(v, {"kind", "a", "c"}, "g");
    return GFunction::shift(get(v, "a", 0.1), get(v, "c", 0.5));
  }
  if (kind == "sine") {
    reject_unknown(v, {"kind", "amp", "freq"}, "g");
    return GFunction::sinusoid(get(v, "amp", 0.2), get(v, "freq", 5.0 * std::numbers::pi));
  }
  if (kind == "table") {
    reject_unknown(v, {"kind", "path", "knots"}, "g");
    if (v.contains("path")) return GFunction::load_table(resolve(get<std::string>(v, "path", "")));
    return GFunction::tabulated(get<std::vector<std::pair<double, double>>>(v, "knots", {}));
  }
  bad("unknown g kind '" + kind + "'");
}

Pleiotropy pleiotropy_from_json(const Json& v) {
  if (!v.is_object() || !v.contains("kind")) bad("pleiotropy must be an object with 'kind'");
  const auto kind = get<std::string>(v, "kind", "");
  if (kind == "none") {
    reject_unknown(v, {"kind"}, "pleiotropy");
    return NoPleiotropy{};
  }
  if (kind == "balanced") {
    reject_unknown(v, {"kind", "tau0"}, "pleiotropy");
    return BalancedPleiotropy{get(v, "tau0", 0.02)};
  }
  if (kind == "idio_single") {
    reject_unknown(v, {"kind", "mu", "tau0"}, "pleiotropy");
    return IdiosyncraticSingle{get(v, "mu", 0.1), get(v, "tau0", 0.02)};
  }
  if (kind == "idio_multi") {
    reject_unknown(v, {"kind", "mu", "tau0", "k"}, "pleiotropy");
    return IdiosyncraticMulti{get(v, "mu", 0.1), get(v, "tau0", 0.02), get_count(v, "k", 5)};
  }
  if (kind == "directional") {
    reject_unknown(v, {"kind", "mu", "tau0"}, "pleiotropy");
    return DirectionalPleiotropy{get(v, "mu", 0.05), get(v, "tau0", 0.02)};
  }
  bad("unknown pleiotropy kind '" + kind + "'");
}

CiKind ci_from_string(const std::string& s) {
  if (s == "normal") return CiKind::NormalApprox;
  if (s == "percentile") return CiKind::Percentile;
  bad("unknown ci kind '" + s + "' (normal, percentile)");
}

}  // namespace

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", round_sig(x));
  return buf;
}

std::string_view inference_name(InferenceSource s) {
  return s == InferenceSource::Analytic ? "analytic" : "bootstrap";
}

Json to_json(const MrEstimate& e) {
  Json j;
  j["method"] = method_name(e.method);
  j["beta"] = number(e.beta);
  j["se"] = optional_number(e.se);
  j["ci"] = Json::array({optional_number(e.ci_low), optional_number(e.ci_high)});
  j["level"] = number(e.level);
  j["n_snps"] = e.n_snps;
  Json aux = Json::object();
  for (const auto& [k, v] : e.auxiliary) aux[k] = number(v);
  j["auxiliary"] = aux;
  return j;
}

Json to_json(const HetTestResult& r) {
  Json j;
  j["statistic"] = number(r.statistic);
  j["df"] = r.df;
  j["p_value"] = number(r.p_value);
  Json per = Json::array();
  for (double v : r.per_snp) per.push_back(number(v));
  j["per_snp"] = per;
  return j;
}

Json to_json(const HarmonizationReport& r) {
  return Json{{"kept", r.kept},
              {"flipped", r.flipped},
              {"dropped_mismatch", r.dropped_mismatch},
              {"dropped_palindromic", r.dropped_palindromic},
              {"dropped_missing", r.dropped_missing}};
}

Json to_json(const ScenarioSummary& s) {
  Json methods = Json::array();
  for (const auto& m : s.methods) {
    methods.push_back(Json{{"method", method_name(m.method)},
                           {"inference", inference_name(m.inference)},
                           {"bias", number(m.bias_pct)},
                           {"rmse", number(m.rmse_pct)},
                           {"ci_length", number(m.ci_length_pct)},
                           {"coverage", number(m.coverage_pct)},
                           {"n_used", m.n_used},
                           {"n_failed", m.n_failed}});
  }
  return Json{{"n_replicates_used", s.n_replicates_used}, {"methods", methods}};
}

std::string estimates_tsv(const std::vector<MrEstimate>& estimates) {
  std::ostringstream out;
  out << "method\tbeta\tse\tci_low\tci_high\tlevel\tn_snps\n";
  for (const auto& e : estimates) {
    out << method_name(e.method) << '\t' << format_number(e.beta) << '\t' << optional_field(e.se)
        << '\t' << optional_field(e.ci_low) << '\t' << optional_field(e.ci_high) << '\t'
        << format_number(e.level) << '\t' << e.n_snps << '\n';
  }
  return out.str();
}

std::string het_test_tsv(const HetTestResult& r) {
  std::ostringstream out;
  out << "statistic\tdf\tp_value\n"
      << format_number(r.statistic) << '\t' << r.df << '\t' << format_number(r.p_value) << '\n';
  return out.str();
}

std::string summary_tsv(const ScenarioSummary& s) {
  std::ostringstream out;
  out << "method\tbias\trmse\tci_length\tcoverage\tn_used\tn_failed\n";
  for (const auto& m : s.methods) {
    out << method_name(m.method) << '\t' << format_number(m.bias_pct) << '\t'
        << format_number(m.rmse_pct) << '\t' << format_number(m.ci_length_pct) << '\t'
        << format_number(m.coverage_pct) << '\t' << m.n_used << '\t' << m.n_failed << '\n';
  }
  return out.str();
}

SimulationRequest default_simulation_request() {
  SimulationRequest req;
  req.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  req.bootstrap.n_boot = 500;
  return req;
}

SimulationRequest simulation_request_from_json(const Json& doc, const std::string& base_dir) {
  if (!doc.is_object()) bad("config must be a JSON object");
  reject_unknown(doc,
                 {"p", "n", "beta0", "gamma_tr_low", "gamma_tr_high", "maf", "g", "scenario",
                  "pleiotropy", "n_replicates", "seed", "methods", "bootstrap"},
                 "config");
  if (doc.contains("scenario") && doc.contains("pleiotropy")) {
    bad("give either 'scenario' or 'pleiotropy', not both");
  }
  SimulationRequest req = default_simulation_request();
  ScenarioConfig& c = req.scenario;
  if (doc.contains("scenario")) c.apply_scenario(get<std::string>(doc, "scenario", ""));
  if (doc.contains("pleiotropy")) c.pleiotropy = pleiotropy_from_json(doc.at("pleiotropy"));
  c.p = get_count(doc, "p", c.p);
  c.n = get_count(doc, "n", c.n);
  c.beta0 = get(doc, "beta0", c.beta0);
  c.gamma_tr_low = get(doc, "gamma_tr_low", c.gamma_tr_low);
  c.gamma_tr_high = get(doc, "gamma_tr_high", c.gamma_tr_high);
  c.maf = get(doc, "maf", c.maf);
  if (doc.contains("g")) c.g = g_from_json(doc.at("g"), base_dir);
  c.n_replicates = get_count(doc, "n_replicates", c.n_replicates);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) bad("seed must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("methods")) {
    const Json& m = doc.at("methods");
    req.methods.clear();
    if (m.is_string()) {
      req.methods = parse_method_list(m.get<std::string>());
    } else if (m.is_array()) {
      for (const auto& item : m) {
        if (!item.is_string()) bad("methods must be strings");
        const auto parsed = parse_method(item.get<std::string>());
        if (!parsed) bad("unknown method '" + item.get<std::string>() + "'");
        req.methods.push_back(*parsed);
      }
    } else {
      bad("methods must be a list or a comma-separated string");
    }
    if (req.methods.empty()) bad("at least one method is required");
  }
  if (doc.contains("bootstrap")) {
    const Json& b = doc.at("bootstrap");
    if (!b.is_object()) bad("bootstrap must be an object");
    reject_unknown(b, {"n_boot", "seed", "ci", "level"}, "bootstrap");
    req.bootstrap.n_boot = get_count(b, "n_boot", req.bootstrap.n_boot);
    if (b.contains("seed")) {
      if (!b.at("seed").is_number_unsigned()) bad("bootstrap seed must be a non-negative integer");
      req.bootstrap.seed = b.at("seed").get<std::uint64_t>();
    }
    if (b.contains("ci")) req.bootstrap.ci_kind = ci_from_string(get<std::string>(b, "ci", ""));
    req.bootstrap.level = get(b, "level", req.bootstrap.level);
  }
  c.validate();
  return req;
}

SimulationRequest load_simulation_request(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("config " + path + " is not valid JSON: " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  return simulation_request_from_json(doc, base.empty() ? "." : base.string());
}

}  // namespace mrhet
