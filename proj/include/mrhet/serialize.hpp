#pragma once

// JSON and TSV forms of the result types. Every emitted number is rounded to
// six significant figures, identically in both formats.

#include <string>
#include <vector>

#include <json.hpp>

#include "mrhet/heterogeneity.hpp"
#include "mrhet/inference.hpp"
#include "mrhet/simulation.hpp"
#include "mrhet/summary_data.hpp"
#include "mrhet/types.hpp"

namespace mrhet {

using Json = nlohmann::ordered_json;

double round_sig(double x, int digits = 6);
// "%.6g" of round_sig(x); NaN and infinities print as NA.
std::string format_number(double x);

Json to_json(const MrEstimate& e);
Json to_json(const HetTestResult& r);
Json to_json(const HarmonizationReport& r);
Json to_json(const ScenarioSummary& s);

std::string estimates_tsv(const std::vector<MrEstimate>& estimates);
std::string het_test_tsv(const HetTestResult& r);
std::string summary_tsv(const ScenarioSummary& s);

std::string_view inference_name(InferenceSource s);

// Simulation settings read from a JSON document. Unknown keys are rejected
// with BadConfig. Relative table paths resolve against `base_dir`.
struct SimulationRequest {
  ScenarioConfig scenario;
  std::vector<Method> methods;
  BootstrapConfig bootstrap;
};
SimulationRequest simulation_request_from_json(const Json& doc, const std::string& base_dir = ".");
SimulationRequest load_simulation_request(const std::string& path);

// Defaults used when no config file is given.
SimulationRequest default_simulation_request();

}  // namespace mrhet
