#pragma once

#include <json.hpp>

#include "srilab/bm_diagnostic.hpp"
#include "srilab/gradient_estimators.hpp"

namespace srilab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Diagnostic block of a scenario. T absent means auto-selection.
struct DiagnosticConfig {
    std::optional<double> T;
    std::optional<ConvexSet> candidate_set;
    std::optional<std::array<double, 4>> delta_chain;
    double radius_a = 1.0;
    DiagnosticThresholds thresholds;
    std::optional<ConvexSet> reference;  // target set for tail distances; default {0}
    double tail_fraction = 0.01;
};

struct SgdConfig {
    ObjectiveSpec objective;  // quadratic (the serializable case)
    EstimatorSpec estimator;
    std::optional<double> eps;
};

/// Complete, reproducible description of one experiment. The seed is
/// mandatory: runs never draw entropy from the environment.
struct ScenarioConfig {
    std::string name;
    std::size_t dimension = 0;
    std::optional<MapSpec> map;
    std::optional<double> map_bound_K;
    std::optional<double> map_lipschitz_L;
    std::optional<SgdConfig> sgd;
    StepSchedule schedule = StepSchedule::harmonic(1.0);
    NoiseModel noise = NoiseModel::gaussian(1, 0.0);
    SelectionPolicy policy;
    Vec x0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    DiagnosticConfig diagnostic;
    std::string output_dir;  // optional; CLI flag / SRILAB_OUT override
};

struct FlowConfig {
    explicit FlowConfig(MapSpec m) : map(std::move(m)) {}
    MapSpec map;
    std::string name;
    std::optional<double> map_bound_K;
    std::optional<double> map_lipschitz_L;
    Vec x0;
    double horizon = 1.0;
    double dt = 1e-3;
    SelectionPolicy policy;
    std::uint64_t seed = 0;
};

/// Map file for `check-map`: a serializable map plus optional declared
/// constants and check parameters.
struct CheckMapConfig {
    explicit CheckMapConfig(MapSpec m) : map(std::move(m)) {}
    MapSpec map;
    std::optional<double> bound_K;
    std::optional<double> lipschitz_L;
    std::size_t samples = 200;
    double sample_radius = 10.0;
    std::uint64_t seed = 0;
    std::optional<double> drift_eps;  // set when the root is drift_with_ball
};

ConvexSet parse_convex_set(const json& j, const std::string& path);
MapSpec parse_map_spec(const json& j, const std::string& path);
SelectionPolicy parse_selection(const json& j, const std::string& path);
StepSchedule parse_schedule(const json& j, const std::string& path);
NoiseModel parse_noise(const json& j, std::size_t dim, const std::string& path);

ScenarioConfig parse_scenario(const json& j);
FlowConfig parse_flow(const json& j);
CheckMapConfig parse_check_map(const json& j);

/// Builds the map (or descent assembly) a scenario describes.
struct ScenarioAssembly {
    MarchaudMap map;
    std::optional<SelectionOracle> oracle;  // present for sgd scenarios
    double total_noise_K = 0.0;             // model K + estimator fluctuation K
    double eps = 0.0;                       // drift ball radius, when meaningful
};
ScenarioAssembly assemble_scenario(const ScenarioConfig& cfg);

json load_json_file(const std::string& path);

}  // namespace srilab
