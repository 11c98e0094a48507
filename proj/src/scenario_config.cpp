#include "srilab/scenario_config.hpp"

#include <cmath>
#include <fstream>

#include "srilab/errors.hpp"

namespace srilab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError("config: " + path + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing field");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& path) {
    return number(field(j, key, path), path + "." + key);
}

std::string string_field(const json& j, const char* key, const std::string& path) {
    const json& f = field(j, key, path);
    if (!f.is_string()) fail(path + "." + key, "expected a string");
    return f.get<std::string>();
}

Vec vec(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vec v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Mat mat(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    Mat m;
    m.rows = j.size();
    const Vec first = vec(j[0], path + "[0]");
    m.cols = first.size();
    m.v.reserve(m.rows * m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const Vec row = vec(j[i], path + "[" + std::to_string(i) + "]");
        if (row.size() != m.cols) fail(path, "ragged matrix rows");
        m.v.insert(m.v.end(), row.begin(), row.end());
    }
    return m;
}

}  // namespace

ConvexSet parse_convex_set(const json& j, const std::string& path) {
    const std::string type = string_field(j, "type", path);
    if (type == "singleton")
        return ConvexSet::singleton(vec(field(j, "point", path), path + ".point"));
    if (type == "ball")
        return ConvexSet::ball(vec(field(j, "center", path), path + ".center"),
                               number_field(j, "radius", path));
    if (type == "polytope") {
        const json& vs = field(j, "vertices", path);
        if (!vs.is_array() || vs.empty()) fail(path + ".vertices", "expected a non-empty array");
        std::vector<Vec> vertices;
        for (std::size_t i = 0; i < vs.size(); ++i)
            vertices.push_back(vec(vs[i], path + ".vertices[" + std::to_string(i) + "]"));
        return ConvexSet::polytope(std::move(vertices));
    }
    if (type == "minkowski_sum")
        return ConvexSet::minkowski_sum(
            parse_convex_set(field(j, "left", path), path + ".left"),
            parse_convex_set(field(j, "right", path), path + ".right"));
    if (type == "scaled")
        return ConvexSet::scaled(parse_convex_set(field(j, "inner", path), path + ".inner"),
                                 number_field(j, "factor", path));
    fail(path + ".type", "unknown set type '" + type + "'");
}

MapSpec parse_map_spec(const json& j, const std::string& path) {
    const std::string type = string_field(j, "type", path);
    if (type == "affine")
        return MapSpec::affine(mat(field(j, "A", path), path + ".A"),
                               vec(field(j, "b", path), path + ".b"));
    if (type == "neg_grad_quadratic")
        return MapSpec::neg_grad_quadratic(mat(field(j, "A", path), path + ".A"),
                                           vec(field(j, "B", path), path + ".B"));
    if (type == "drift_with_ball")
        return MapSpec::drift_with_ball(parse_map_spec(field(j, "inner", path), path + ".inner"),
                                        number_field(j, "eps", path));
    if (type == "scaled_by")
        return MapSpec::scaled_by(parse_map_spec(field(j, "inner", path), path + ".inner"),
                                  number_field(j, "c", path));
    if (type == "closed_form_infinity")
        return MapSpec::closed_form_infinity(
            parse_map_spec(field(j, "inner", path), path + ".inner"));
    fail(path + ".type", "unknown map type '" + type + "'");
}

SelectionPolicy parse_selection(const json& j, const std::string& path) {
    const std::string p = string_field(j, "policy", path);
    if (p == "minimal_norm") return SelectionPolicy::minimal_norm();
    if (p == "support_point") {
        if (j.contains("direction"))
            return SelectionPolicy::support_point(vec(j["direction"], path + ".direction"));
        return SelectionPolicy::support_point_random();
    }
    if (p == "random_extreme") return SelectionPolicy::random_extreme();
    if (p == "centroid") return SelectionPolicy::centroid();
    fail(path + ".policy", "unknown selection policy '" + p + "'");
}

StepSchedule parse_schedule(const json& j, const std::string& path) {
    const std::string fam = string_field(j, "family", path);
    if (fam == "harmonic") return StepSchedule::harmonic(number_field(j, "a0", path));
    if (fam == "power")
        return StepSchedule::power(number_field(j, "a0", path), number_field(j, "gamma", path));
    if (fam == "custom")
        return StepSchedule::custom(vec(field(j, "values", path), path + ".values"));
    fail(path + ".family", "unknown schedule family '" + fam + "'");
}

NoiseModel parse_noise(const json& j, std::size_t dim, const std::string& path) {
    const std::string kind = string_field(j, "kind", path);
    std::optional<double> K;
    if (j.contains("K")) K = number(j["K"], path + ".K");
    if (kind == "bounded_iid")
        return NoiseModel::bounded_iid(dim, number_field(j, "half_width", path), K);
    if (kind == "gaussian") return NoiseModel::gaussian(dim, number_field(j, "sigma", path), K);
    if (kind == "state_scaled_gaussian")
        return NoiseModel::state_scaled_gaussian(dim, number_field(j, "sigma0", path), K);
    fail(path + ".kind", "unknown noise kind '" + kind + "'");
}

namespace {

DiagnosticConfig parse_diagnostic(const json& j, const std::string& path) {
    DiagnosticConfig d;
    if (!j.is_object()) fail(path, "expected an object");
    if (j.contains("T") && !j["T"].is_null()) {
        if (j["T"].is_string()) {
            if (j["T"].get<std::string>() != "auto")
                fail(path + ".T", "expected a number or \"auto\"");
        } else {
            d.T = number(j["T"], path + ".T");
        }
    }
    if (j.contains("radius_a")) d.radius_a = number(j["radius_a"], path + ".radius_a");
    if (j.contains("candidate"))
        d.candidate_set = parse_convex_set(j["candidate"], path + ".candidate");
    if (j.contains("delta_chain")) {
        const Vec c = vec(j["delta_chain"], path + ".delta_chain");
        if (c.size() != 4) fail(path + ".delta_chain", "expected exactly four deltas");
        d.delta_chain = {c[0], c[1], c[2], c[3]};
    }
    if (j.contains("stable_threshold"))
        d.thresholds.stable_sup_r = number(j["stable_threshold"], path + ".stable_threshold");
    if (j.contains("divergence_threshold"))
        d.thresholds.divergence_r =
            number(j["divergence_threshold"], path + ".divergence_threshold");
    if (j.contains("reference"))
        d.reference = parse_convex_set(j["reference"], path + ".reference");
    if (j.contains("tail_fraction")) {
        d.tail_fraction = number(j["tail_fraction"], path + ".tail_fraction");
        if (!(d.tail_fraction > 0.0) || d.tail_fraction > 1.0)
            fail(path + ".tail_fraction", "must lie in (0, 1]");
    }
    return d;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j) {
    const std::string path = "$";
    ScenarioConfig cfg;
    cfg.name = string_field(j, "name", path);
    const double dim = number_field(j, "dimension", path);
    if (dim < 1 || dim != std::floor(dim)) fail(path + ".dimension", "expected a positive integer");
    cfg.dimension = static_cast<std::size_t>(dim);

    if (j.contains("map") == j.contains("sgd"))
        fail(path, "exactly one of 'map' and 'sgd' is required");
    if (j.contains("map")) {
        cfg.map = parse_map_spec(j["map"], path + ".map");
        if (cfg.map->dim() != cfg.dimension)
            fail(path + ".map", "map dimension != scenario dimension");
        if (j["map"].contains("bound_K"))
            cfg.map_bound_K = number(j["map"]["bound_K"], path + ".map.bound_K");
        if (j["map"].contains("lipschitz_L"))
            cfg.map_lipschitz_L = number(j["map"]["lipschitz_L"], path + ".map.lipschitz_L");
    } else {
        const json& s = j["sgd"];
        const std::string spath = path + ".sgd";
        const json& obj = field(s, "objective", spath);
        Mat A = mat(field(obj, "A", spath + ".objective"), spath + ".objective.A");
        Vec B = vec(field(obj, "B", spath + ".objective"), spath + ".objective.B");
        const double c0 = obj.contains("c") ? number(obj["c"], spath + ".objective.c") : 0.0;
        ObjectiveSpec F = ObjectiveSpec::quadratic(std::move(A), std::move(B), c0);
        if (F.dim() != cfg.dimension)
            fail(spath + ".objective", "objective dimension != scenario dimension");
        const json& e = field(s, "estimator", spath);
        const std::string kind = string_field(e, "kind", spath + ".estimator");
        const double pc = number_field(e, "c", spath + ".estimator");
        const std::size_t spc =
            e.contains("samples_per_call")
                ? static_cast<std::size_t>(
                      number(e["samples_per_call"], spath + ".estimator.samples_per_call"))
                : 1;
        EstimatorSpec est;
        if (kind == "kw_forward") est = EstimatorSpec::kw_forward(pc);
        else if (kind == "kw_central") est = EstimatorSpec::kw_central(pc);
        else if (kind == "spsa") est = EstimatorSpec::spsa(pc, spc);
        else if (kind == "smoothed_functional") est = EstimatorSpec::smoothed_functional(pc, spc);
        else fail(spath + ".estimator.kind", "unknown estimator kind '" + kind + "'");
        std::optional<double> eps;
        if (s.contains("eps") && !s["eps"].is_null()) eps = number(s["eps"], spath + ".eps");
        cfg.sgd = SgdConfig{std::move(F), est, eps};
    }

    cfg.schedule = parse_schedule(field(j, "schedule", path), path + ".schedule");
    cfg.noise = parse_noise(field(j, "noise", path), cfg.dimension, path + ".noise");
    if (j.contains("selection")) cfg.policy = parse_selection(j["selection"], path + ".selection");
    else if (cfg.map) fail(path + ".selection", "missing field (required for map scenarios)");

    cfg.x0 = vec(field(j, "x0", path), path + ".x0");
    if (cfg.x0.size() != cfg.dimension) fail(path + ".x0", "x0 dimension != scenario dimension");

    const double N = number_field(j, "N", path);
    if (N < 1 || N != std::floor(N)) fail(path + ".N", "expected a positive integer");
    cfg.N = static_cast<std::size_t>(N);

    if (!j.contains("seed")) fail(path + ".seed", "seed required (runs must be reproducible)");
    const double seed = number(j["seed"], path + ".seed");
    if (seed < 0 || seed != std::floor(seed)) fail(path + ".seed", "expected a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (j.contains("diagnostic"))
        cfg.diagnostic = parse_diagnostic(j["diagnostic"], path + ".diagnostic");
    if (j.contains("output_dir")) cfg.output_dir = string_field(j, "output_dir", path);
    return cfg;
}

FlowConfig parse_flow(const json& j) {
    const std::string path = "$";
    FlowConfig cfg{parse_map_spec(field(j, "map", path), path + ".map")};
    cfg.name = j.contains("name") ? string_field(j, "name", path) : "flow";
    if (j["map"].contains("bound_K"))
        cfg.map_bound_K = number(j["map"]["bound_K"], path + ".map.bound_K");
    if (j["map"].contains("lipschitz_L"))
        cfg.map_lipschitz_L = number(j["map"]["lipschitz_L"], path + ".map.lipschitz_L");
    cfg.x0 = vec(field(j, "x0", path), path + ".x0");
    if (cfg.x0.size() != cfg.map.dim()) fail(path + ".x0", "x0 dimension != map dimension");
    cfg.horizon = number_field(j, "T", path);
    cfg.dt = number_field(j, "dt", path);
    cfg.policy = parse_selection(field(j, "selection", path), path + ".selection");
    if (!j.contains("seed")) fail(path + ".seed", "seed required (runs must be reproducible)");
    cfg.seed = static_cast<std::uint64_t>(number(j["seed"], path + ".seed"));
    return cfg;
}

CheckMapConfig parse_check_map(const json& j) {
    const std::string path = "$";
    CheckMapConfig cfg{parse_map_spec(field(j, "map", path), path + ".map")};
    if (j["map"].contains("bound_K"))
        cfg.bound_K = number(j["map"]["bound_K"], path + ".map.bound_K");
    if (j["map"].contains("lipschitz_L"))
        cfg.lipschitz_L = number(j["map"]["lipschitz_L"], path + ".map.lipschitz_L");
    if (j.contains("samples"))
        cfg.samples = static_cast<std::size_t>(number(j["samples"], path + ".samples"));
    if (j.contains("sample_radius"))
        cfg.sample_radius = number(j["sample_radius"], path + ".sample_radius");
    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(number(j["seed"], path + ".seed"));
    if (cfg.map.kind() == MapSpec::Kind::DriftWithBall) cfg.drift_eps = cfg.map.eps();
    return cfg;
}

ScenarioAssembly assemble_scenario(const ScenarioConfig& cfg) {
    if (cfg.map) {
        MarchaudMap map = MarchaudMap::from_spec(*cfg.map, cfg.map_bound_K, cfg.map_lipschitz_L);
        const double eps = cfg.map->kind() == MapSpec::Kind::DriftWithBall ? cfg.map->eps() : 0.0;
        return ScenarioAssembly{std::move(map), std::nullopt, cfg.noise.bound_K(), eps};
    }
    SgdAssembly sgd = assemble_sgd(cfg.sgd->objective, cfg.sgd->estimator, cfg.sgd->eps);
    return ScenarioAssembly{std::move(sgd.map), std::move(sgd.oracle),
                            cfg.noise.bound_K() + sgd.extra_noise_K, sgd.eps};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("config: " + path + ": invalid JSON: " + e.what());
    }
    return j;
}

}  // namespace srilab
