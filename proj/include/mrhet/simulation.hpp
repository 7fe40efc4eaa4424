#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mrhet/inference.hpp"
#include "mrhet/rng.hpp"
#include "mrhet/types.hpp"

namespace mrhet {

// Map from treatment-cohort to outcome-cohort exposure effect.
class GFunction {
 public:
  struct Identity {};
  struct AffineScaledShift {
    double a = 0.0;  // g(x) = c (x + a)
    double c = 1.0;
  };
  struct Sinusoid {
    double amp = 1.0;  // g(x) = amp sin(freq x)
    double freq = 1.0;
  };
  struct Tabulated {
    std::vector<std::pair<double, double>> knots;  // strictly increasing x
  };
  using Kind = std::variant<Identity, AffineScaledShift, Sinusoid, Tabulated>;

  GFunction() = default;
  explicit GFunction(Kind kind);

  static GFunction identity() { return GFunction(Identity{}); }
  static GFunction shift(double a, double c) { return GFunction(AffineScaledShift{a, c}); }
  static GFunction sinusoid(double amp, double freq) { return GFunction(Sinusoid{amp, freq}); }
  static GFunction tabulated(std::vector<std::pair<double, double>> knots);
  // Two numeric columns (x, g(x)); blank lines, '#' comments and one header line are skipped.
  static GFunction load_table(const std::filesystem::path& path);
  // identity | shift | sine | table:<path>
  static GFunction from_shorthand(std::string_view text);

  double operator()(double x) const;
  const Kind& kind() const noexcept { return kind_; }

 private:
  Kind kind_ = Identity{};
};

struct NoPleiotropy {};
struct BalancedPleiotropy {
  double tau0 = 0.02;
};
struct IdiosyncraticSingle {
  double mu = 0.1;  // mean shift on the SNP with the largest treatment effect
  double tau0 = 0.02;
};
struct IdiosyncraticMulti {
  double mu = 0.1;  // mean shift on k SNPs drawn without replacement
  double tau0 = 0.02;
  std::size_t k = 5;
};
struct DirectionalPleiotropy {
  double mu = 0.05;
  double tau0 = 0.02;
};
using Pleiotropy = std::variant<NoPleiotropy, BalancedPleiotropy, IdiosyncraticSingle,
                                IdiosyncraticMulti, DirectionalPleiotropy>;

struct ScenarioConfig {
  std::size_t p = 200;
  std::size_t n = 10000;
  double beta0 = 0.5;
  double gamma_tr_low = 0.05;
  double gamma_tr_high = 0.10;
  double maf = 0.3;
  GFunction g;
  Pleiotropy pleiotropy = NoPleiotropy{};
  std::size_t n_replicates = 500;
  std::uint64_t seed = 1;

  // Throws BadConfig when an invariant fails.
  void validate() const;
  // Applies the named pleiotropy scenario "i".."v"; "v" also sets n = 100000.
  void apply_scenario(std::string_view roman);
};

// Parameters drawn once per replicate.
struct InstrumentDraw {
  std::vector<double> gamma_tr;
  std::vector<double> gamma_ou;
  std::vector<double> alpha;
};

InstrumentDraw draw_instruments(const ScenarioConfig& cfg, std::size_t replicate);

// Generates both individual-level samples for given instruments and returns
// the marginal summary statistics. Randomness comes from streams keyed by
// (cfg.seed, replicate).
std::vector<HarmonizedTriple> simulate_summary_statistics(const ScenarioConfig& cfg,
                                                          std::size_t replicate,
                                                          const InstrumentDraw& instruments);

std::vector<HarmonizedTriple> simulate_replicate(const ScenarioConfig& cfg, std::size_t replicate);

enum class InferenceSource { Bootstrap, Analytic };

// dIVW carries its own analytic standard error; everything else is bootstrapped.
InferenceSource default_inference(Method m);

struct MethodSummary {
  Method method = Method::MrWald;
  InferenceSource inference = InferenceSource::Bootstrap;
  double bias_pct = 0.0;
  double rmse_pct = 0.0;
  double ci_length_pct = 0.0;
  double coverage_pct = 0.0;
  std::size_t n_used = 0;
  std::size_t n_failed = 0;
};

struct ScenarioSummary {
  std::vector<MethodSummary> methods;
  std::size_t n_replicates_used = 0;
};

struct RunOptions {
  unsigned threads = 1;
  // Overrides default_inference() for every method when set.
  std::optional<InferenceSource> inference;
};

ScenarioSummary run_scenario(const ScenarioConfig& cfg, std::span<const Method> methods,
                             const BootstrapConfig& boot, const RunOptions& options = {});

}  // namespace mrhet
