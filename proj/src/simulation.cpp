#include "mrhet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mrhet/errors.hpp"
#include "mrhet/kernels.hpp"
#include "mrhet/mr_wald.hpp"
#include "mrhet/parallel.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {
namespace {

// Stream layout under (cfg.seed, replicate, k).
enum Stream : std::uint64_t {
  kParameters = 0,
  kTreatmentGenotypes = 1,
  kTreatmentNoise = 2,
  kOutcomeGenotypes = 3,
  kOutcomeNoise = 4,
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint32_t maf_threshold(double maf) {
  const double t = std::round(maf * 4294967296.0);
  if (t >= 4294967295.0) return 0xffffffffu;
  return static_cast<std::uint32_t>(t);
}

// p columns of n genotypes, column-major.
class GenotypeMatrix {
 public:
  GenotypeMatrix(std::size_t n, std::size_t p) : n_(n), data_(n * p), bits_(n) {}

  void fill(Rng& rng, std::uint32_t threshold) {
    const std::size_t p = n_ == 0 ? 0 : data_.size() / n_;
    for (std::size_t j = 0; j < p; ++j) {
      for (auto& b : bits_) b = rng();
      kernels::bits_to_genotypes(bits_, column_mut(j), threshold);
    }
  }

  std::span<const std::uint8_t> column(std::size_t j) const {
    return {data_.data() + j * n_, n_};
  }

 private:
  std::span<std::uint8_t> column_mut(std::size_t j) { return {data_.data() + j * n_, n_}; }

  std::size_t n_;
  std::vector<std::uint8_t> data_;
  std::vector<std::uint64_t> bits_;
};

void add_normal(Rng& rng, std::vector<double>& v) {
  for (auto& x : v) x += rng.normal();
}

}  // namespace

GFunction::GFunction(Kind kind) : kind_(std::move(kind)) {
  if (const auto* t = std::get_if<Tabulated>(&kind_)) {
    if (t->knots.empty()) throw Error(ErrorKind::BadConfig, "tabulated g needs at least one knot");
    for (std::size_t i = 1; i < t->knots.size(); ++i) {
      if (!(t->knots[i].first > t->knots[i - 1].first)) {
        throw Error(ErrorKind::BadConfig, "tabulated g knots must be strictly increasing in x");
      }
    }
    for (const auto& [x, y] : t->knots) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw Error(ErrorKind::BadConfig, "tabulated g knots must be finite");
      }
    }
  }
}

GFunction GFunction::tabulated(std::vector<std::pair<double, double>> knots) {
  return GFunction(Tabulated{std::move(knots)});
}

GFunction GFunction::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open g table " + path.string());
  std::vector<std::pair<double, double>> knots;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double x = 0.0;
    double y = 0.0;
    if (!(fields >> x >> y)) {
      if (!header_skipped && knots.empty()) {
        header_skipped = true;
        continue;
      }
      throw Error(ErrorKind::BadConfig, "bad g table row in " + path.string() + ": " + line);
    }
    knots.emplace_back(x, y);
  }
  return tabulated(std::move(knots));
}

GFunction GFunction::from_shorthand(std::string_view text) {
  if (text == "identity") return identity();
  if (text == "shift") return shift(0.1, 0.5);
  if (text == "sine") return sinusoid(0.2, 5.0 * std::numbers::pi);
  if (text.starts_with("table:")) return load_table(std::string(text.substr(6)));
  throw Error(ErrorKind::BadConfig,
              "unknown g '" + std::string(text) + "' (identity, shift, sine, table:<path>)");
}

double GFunction::operator()(double x) const {
  return std::visit(
      Overloaded{
          [x](const Identity&) { return x; },
          [x](const AffineScaledShift& f) { return f.c * (x + f.a); },
          [x](const Sinusoid& f) { return f.amp * std::sin(f.freq * x); },
          [x](const Tabulated& f) {
            const auto& k = f.knots;
            if (x <= k.front().first) return k.front().second;
            if (x >= k.back().first) return k.back().second;
            const auto hi = std::upper_bound(k.begin(), k.end(), x,
                                             [](double v, const auto& kn) { return v < kn.first; });
            const auto lo = hi - 1;
            const double t = (x - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
          },
      },
      kind_);
}

void ScenarioConfig::validate() const {
  if (p < 1) throw Error(ErrorKind::BadConfig, "p must be at least 1");
  if (n < 1) throw Error(ErrorKind::BadConfig, "n must be at least 1");
  if (!(maf > 0.0 && maf < 1.0)) throw Error(ErrorKind::BadConfig, "maf must lie in (0, 1)");
  if (!(gamma_tr_low < gamma_tr_high)) {
    throw Error(ErrorKind::BadConfig, "gamma_tr_low must be below gamma_tr_high");
  }
  if (!std::isfinite(beta0)) throw Error(ErrorKind::BadConfig, "beta0 must be finite");
  if (const auto* m = std::get_if<IdiosyncraticMulti>(&pleiotropy); m && m->k > p) {
    throw Error(ErrorKind::BadConfig, "idiosyncratic pleiotropy k exceeds p");
  }
}

void ScenarioConfig::apply_scenario(std::string_view roman) {
  if (roman == "i") {
    pleiotropy = NoPleiotropy{};
  } else if (roman == "ii") {
    pleiotropy = BalancedPleiotropy{0.02};
  } else if (roman == "iii") {
    pleiotropy = IdiosyncraticSingle{0.1, 0.02};
  } else if (roman == "iv") {
    pleiotropy = IdiosyncraticMulti{0.1, 0.02, 5};
  } else if (roman == "v") {
    pleiotropy = DirectionalPleiotropy{0.05, 0.02};
    n = 100000;
  } else {
    throw Error(ErrorKind::BadConfig, "unknown scenario '" + std::string(roman) + "' (i..v)");
  }
}

InstrumentDraw draw_instruments(const ScenarioConfig& cfg, std::size_t replicate) {
  cfg.validate();
  Rng rng(cfg.seed, {replicate, kParameters});
  InstrumentDraw d;
  d.gamma_tr.resize(cfg.p);
  d.gamma_ou.resize(cfg.p);
  d.alpha.assign(cfg.p, 0.0);
  const double width = cfg.gamma_tr_high - cfg.gamma_tr_low;
  for (std::size_t j = 0; j < cfg.p; ++j) {
    d.gamma_tr[j] = cfg.gamma_tr_low + width * rng.uniform();
    d.gamma_ou[j] = cfg.g(d.gamma_tr[j]);
  }

  std::visit(
      Overloaded{
          [](const NoPleiotropy&) {},
          [&](const BalancedPleiotropy& b) {
            for (auto& a : d.alpha) a = b.tau0 * rng.normal();
          },
          [&](const IdiosyncraticSingle& s) {
            const auto top = static_cast<std::size_t>(
                std::max_element(d.gamma_tr.begin(), d.gamma_tr.end()) - d.gamma_tr.begin());
            for (std::size_t j = 0; j < cfg.p; ++j) {
              d.alpha[j] = (j == top ? s.mu : 0.0) + s.tau0 * rng.normal();
            }
          },
          [&](const IdiosyncraticMulti& m) {
            // Partial Fisher-Yates: the first k entries are a uniform sample.
            std::vector<std::size_t> idx(cfg.p);
            for (std::size_t j = 0; j < cfg.p; ++j) idx[j] = j;
            std::vector<double> mean(cfg.p, 0.0);
            for (std::size_t i = 0; i < m.k; ++i) {
              const std::size_t pick = i + rng.below(cfg.p - i);
              std::swap(idx[i], idx[pick]);
              mean[idx[i]] = m.mu;
            }
            for (std::size_t j = 0; j < cfg.p; ++j) d.alpha[j] = mean[j] + m.tau0 * rng.normal();
          },
          [&](const DirectionalPleiotropy& dp) {
            for (auto& a : d.alpha) a = dp.mu + dp.tau0 * rng.normal();
          },
      },
      cfg.pleiotropy);
  return d;
}

std::vector<HarmonizedTriple> simulate_summary_statistics(const ScenarioConfig& cfg,
                                                          std::size_t replicate,
                                                          const InstrumentDraw& instruments) {
  cfg.validate();
  if (instruments.gamma_tr.size() != cfg.p || instruments.gamma_ou.size() != cfg.p ||
      instruments.alpha.size() != cfg.p) {
    throw Error(ErrorKind::BadConfig, "instrument draw does not match p");
  }
  const std::uint32_t threshold = maf_threshold(cfg.maf);
  const std::size_t n = cfg.n;
  const std::size_t p = cfg.p;
  std::vector<HarmonizedTriple> out(p);
  for (std::size_t j = 0; j < p; ++j) out[j].snp_id = "snp" + std::to_string(j + 1);

  GenotypeMatrix z(n, p);

  // Treatment cohort: D = sum gamma_tr Z + U + e_d.
  {
    Rng geno(cfg.seed, {replicate, kTreatmentGenotypes});
    Rng noise(cfg.seed, {replicate, kTreatmentNoise});
    z.fill(geno, threshold);
    std::vector<double> d(n, 0.0);
    add_normal(noise, d);  // U
    add_normal(noise, d);  // e_d
    for (std::size_t j = 0; j < p; ++j) kernels::axpy_genotype(instruments.gamma_tr[j], z.column(j), d);
    const CenteredTrait dc = center_trait(d);
    for (std::size_t j = 0; j < p; ++j) {
      const auto r = marginal_regression(z.column(j), dc);
      out[j].gamma_tr = r.beta;
      out[j].se_gamma_tr = r.se;
    }
  }

  // Outcome cohort: D1 = sum gamma_ou Z + U + e_d, Y = beta0 D1 + U + e_y + sum alpha Z.
  {
    Rng geno(cfg.seed, {replicate, kOutcomeGenotypes});
    Rng noise(cfg.seed, {replicate, kOutcomeNoise});
    z.fill(geno, threshold);
    std::vector<double> u(n);
    for (auto& v : u) v = noise.normal();
    std::vector<double> d1 = u;
    add_normal(noise, d1);
    for (std::size_t j = 0; j < p; ++j) kernels::axpy_genotype(instruments.gamma_ou[j], z.column(j), d1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = cfg.beta0 * d1[i] + u[i];
    add_normal(noise, y);
    for (std::size_t j = 0; j < p; ++j) {
      if (instruments.alpha[j] != 0.0) kernels::axpy_genotype(instruments.alpha[j], z.column(j), y);
    }
    const CenteredTrait dc = center_trait(d1);
    const CenteredTrait yc = center_trait(y);
    for (std::size_t j = 0; j < p; ++j) {
      const auto rd = marginal_regression(z.column(j), dc);
      const auto ry = marginal_regression(z.column(j), yc);
      out[j].gamma_ou = rd.beta;
      out[j].se_gamma_ou = rd.se;
      out[j].capgamma_ou = ry.beta;
      out[j].se_capgamma_ou = ry.se;
    }
  }
  return out;
}

std::vector<HarmonizedTriple> simulate_replicate(const ScenarioConfig& cfg, std::size_t replicate) {
  return simulate_summary_statistics(cfg, replicate, draw_instruments(cfg, replicate));
}

InferenceSource default_inference(Method m) {
  return m == Method::Divw ? InferenceSource::Analytic : InferenceSource::Bootstrap;
}

namespace {

struct Interval {
  double beta = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool ok = false;
};

}  // namespace

ScenarioSummary run_scenario(const ScenarioConfig& cfg, std::span<const Method> methods,
                             const BootstrapConfig& boot, const RunOptions& options) {
  cfg.validate();
  if (cfg.n_replicates < 2) throw Error(ErrorKind::BadConfig, "n_replicates must be at least 2");
  if (cfg.beta0 == 0.0) throw Error(ErrorKind::BadConfig, "relative summaries need beta0 != 0");
  if (!(boot.level > 0.0 && boot.level < 1.0)) {
    throw Error(ErrorKind::BadConfig, "level must lie in (0, 1)");
  }
  const std::size_t m = methods.size();
  std::vector<InferenceSource> source(m);
  for (std::size_t k = 0; k < m; ++k) {
    source[k] = options.inference.value_or(default_inference(methods[k]));
  }
  std::vector<Estimator> boot_estimators;
  std::vector<std::size_t> boot_slot;
  for (std::size_t k = 0; k < m; ++k) {
    if (source[k] != InferenceSource::Bootstrap) continue;
    const Method method = methods[k];
    boot_estimators.emplace_back(
        [method](std::span<const HarmonizedTriple> t) { return estimate_beta(method, t); });
    boot_slot.push_back(k);
  }
  const double z = normal_quantile(0.5 * (1.0 + boot.level));

  // results[r * m + k]
  std::vector<Interval> results(cfg.n_replicates * m);
  std::vector<char> simulated(cfg.n_replicates, 0);

  parallel_for(cfg.n_replicates, std::max(1u, options.threads), [&](std::size_t r) {
    std::vector<HarmonizedTriple> triples;
    try {
      triples = simulate_replicate(cfg, r);
    } catch (const Error&) {
      return;
    }
    simulated[r] = 1;
    Interval* row = results.data() + r * m;

    for (std::size_t k = 0; k < m; ++k) {
      if (source[k] != InferenceSource::Analytic) continue;
      try {
        const MrEstimate e = point_estimate(methods[k], triples);
        if (!e.se) continue;
        row[k] = {e.beta, e.beta - z * *e.se, e.beta + z * *e.se, true};
      } catch (const Error&) {
      }
    }

    if (!boot_estimators.empty()) {
      BootstrapConfig rb = boot;
      rb.seed = stream_key(boot.seed, {r});
      std::vector<BootstrapOutcome> outcomes;
      try {
        outcomes = bootstrap_many(boot_estimators, triples, rb, 1);
      } catch (const Error&) {
        return;
      }
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].result) continue;
        const auto& b = *outcomes[i].result;
        row[boot_slot[i]] = {b.point, b.ci_low, b.ci_high, true};
      }
    }
  });

  ScenarioSummary summary;
  summary.n_replicates_used =
      static_cast<std::size_t>(std::count(simulated.begin(), simulated.end(), 1));
  const double scale = 100.0 / cfg.beta0;
  for (std::size_t k = 0; k < m; ++k) {
    MethodSummary s;
    s.method = methods[k];
    s.inference = source[k];
    double err_sum = 0.0;
    double sq_sum = 0.0;
    double len_sum = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < cfg.n_replicates; ++r) {
      const Interval& iv = results[r * m + k];
      if (!iv.ok) {
        ++s.n_failed;
        continue;
      }
      ++s.n_used;
      const double err = iv.beta - cfg.beta0;
      err_sum += err;
      sq_sum += err * err;
      len_sum += iv.high - iv.low;
      if (iv.low <= cfg.beta0 && cfg.beta0 <= iv.high) ++covered;
    }
    if (s.n_used > 0) {
      const double used = static_cast<double>(s.n_used);
      s.bias_pct = err_sum / used * scale;
      s.rmse_pct = std::sqrt(sq_sum / used) * std::abs(scale);
      s.ci_length_pct = len_sum / used * std::abs(scale);
      s.coverage_pct = 100.0 * static_cast<double>(covered) / used;
    } else {
      s.bias_pct = s.rmse_pct = s.ci_length_pct = s.coverage_pct =
          std::numeric_limits<double>::quiet_NaN();
    }
    summary.methods.push_back(s);
  }
  return summary;
}

}  // namespace mrhet
