#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srilab/errors.hpp"
#include "srilab/lab_runner.hpp"

using namespace srilab;
namespace fs = std::filesystem;

namespace {

const char* kDriftScenario = R"({
  "name": "drift-unit",
  "dimension": 1,
  "map": {"type": "drift_with_ball", "eps": 0.1,
          "inner": {"type": "affine", "A": [[-1.0]], "b": [0.0]}},
  "schedule": {"family": "harmonic", "a0": 1.0},
  "noise": {"kind": "bounded_iid", "half_width": 1.0},
  "selection": {"policy": "minimal_norm"},
  "x0": [5.0],
  "N": 400,
  "seed": 77,
  "diagnostic": {"T": "auto", "tail_fraction": 0.05}
})";

ScenarioConfig drift_scenario() { return parse_scenario(json::parse(kDriftScenario)); }

fs::path test_tmp() {
    const fs::path dir = SRILAB_TEST_TMP;
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    const fs::path log = test_tmp() / "cli_output.txt";
    const std::string cmd = std::string(SRILAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        std::ostringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing and field-level errors") {
    const ScenarioConfig cfg = drift_scenario();
    CHECK(cfg.name == "drift-unit");
    CHECK(cfg.dimension == 1);
    CHECK(cfg.N == 400);
    CHECK(cfg.seed == 77);
    REQUIRE(cfg.map.has_value());
    CHECK(cfg.map->kind() == MapSpec::Kind::DriftWithBall);

    SUBCASE("missing seed is rejected by name") {
        json j = json::parse(kDriftScenario);
        j.erase("seed");
        CHECK_THROWS_WITH_AS((void)parse_scenario(j), doctest::Contains("seed required"),
                             ValidationError);
    }

    SUBCASE("bad field types name their path") {
        json j = json::parse(kDriftScenario);
        j["x0"] = "nope";
        CHECK_THROWS_WITH_AS((void)parse_scenario(j), doctest::Contains("$.x0"), ValidationError);
    }

    SUBCASE("map and sgd are mutually exclusive") {
        json j = json::parse(kDriftScenario);
        j["sgd"] = {{"objective", {{"A", {{1.0}}}, {"B", {0.0}}}},
                    {"estimator", {{"kind", "kw_central"}, {"c", 0.1}}}};
        CHECK_THROWS_WITH_AS((void)parse_scenario(j), doctest::Contains("exactly one"),
                             ValidationError);
    }

    SUBCASE("dimension mismatches are caught") {
        json j = json::parse(kDriftScenario);
        j["x0"] = {1.0, 2.0};
        CHECK_THROWS_AS((void)parse_scenario(j), ValidationError);
    }
}

TEST_CASE("trajectory tables round-trip bit-exactly") {
    const ScenarioConfig cfg = drift_scenario();
    const RunOutcome outcome = run_scenario(cfg, cfg.seed);
    const std::string csv = trajectory_csv(outcome.trajectory);

    const Trajectory back = parse_trajectory_csv(csv, cfg.dimension);
    REQUIRE(back.x.size() == outcome.trajectory.x.size());
    for (std::size_t n = 0; n < back.x.size(); ++n) CHECK(back.x[n] == outcome.trajectory.x[n]);
    for (std::size_t n = 0; n < back.steps(); ++n) {
        CHECK(back.y[n] == outcome.trajectory.y[n]);
        CHECK(back.M[n] == outcome.trajectory.M[n]);
        CHECK(back.a[n] == outcome.trajectory.a[n]);
        CHECK(back.t[n] == outcome.trajectory.t[n]);
    }
    CHECK(trajectory_csv(back) == csv);

    SUBCASE("header is the fixed contract") {
        std::istringstream in(csv);
        std::string header;
        std::getline(in, header);
        CHECK(header == "n,t,x_0,y_0,M_0,a");
    }

    SUBCASE("same config and seed give byte-identical tables") {
        const RunOutcome again = run_scenario(cfg, cfg.seed);
        CHECK(trajectory_csv(again.trajectory) == csv);
    }

    SUBCASE("header mismatch is rejected") {
        CHECK_THROWS_AS((void)parse_trajectory_csv(csv, 2), ValidationError);
    }
}

TEST_CASE("summary values are recomputable from the table") {
    const ScenarioConfig cfg = drift_scenario();
    const RunOutcome outcome = run_scenario(cfg, cfg.seed);
    const Trajectory back = parse_trajectory_csv(trajectory_csv(outcome.trajectory), 1);
    double sup = 0.0;
    for (const auto& x : back.x) sup = std::max(sup, norm(x));
    CHECK(sup == outcome.summary.sup_norm);
    CHECK(norm(back.x.back()) == outcome.summary.final_distance);  // reference is the origin
}

TEST_CASE("verify catches tampering") {
    const ScenarioConfig cfg = drift_scenario();
    RunOutcome outcome = run_scenario(cfg, cfg.seed);
    CHECK(verify_trajectory(cfg, outcome.trajectory).empty());

    SUBCASE("perturbed iterate breaks the identity") {
        Trajectory bad = outcome.trajectory;
        bad.x[5][0] += 1e-6;
        const auto violations = verify_trajectory(cfg, bad);
        CHECK_FALSE(violations.empty());
    }

    SUBCASE("selection outside the drift set is reported") {
        Trajectory bad = outcome.trajectory;
        bad.y[3][0] += 1.0;
        bad.x[4] = bad.x[3] + bad.a[3] * (bad.y[3] + bad.M[3]);
        const auto violations = verify_trajectory(cfg, bad);
        REQUIRE_FALSE(violations.empty());
        bool found = false;
        for (const auto& v : violations) found = found || v.find("selection") != std::string::npos;
        CHECK(found);
    }
}

TEST_CASE("map checks consolidate the property probes") {
    SUBCASE("well-formed drift map corroborates everything") {
        json j = {{"map",
                   {{"type", "drift_with_ball"},
                    {"eps", 0.5},
                    {"inner", {{"type", "affine"}, {"A", {{-1.0, 0.0}, {0.0, -1.0}}}, {"b", {1.0, 1.0}}}}}},
                  {"samples", 64},
                  {"seed", 5}};
        const auto reports = check_map(parse_check_map(j));
        REQUIRE(reports.size() >= 3);
        for (const auto& rep : reports) CHECK(rep.ok());
    }

    SUBCASE("understated growth constant is falsified with a witness") {
        json j = {{"map", {{"type", "affine"}, {"A", {{-3.0}}}, {"b", {0.0}}, {"bound_K", 1.0}}},
                  {"samples", 64},
                  {"sample_radius", 20.0},
                  {"seed", 6}};
        const auto reports = check_map(parse_check_map(j));
        bool falsified = false;
        for (const auto& rep : reports)
            if (rep.property == "pointwise_bound") {
                falsified = !rep.ok();
                CHECK(rep.witness.has_value());
            }
        CHECK(falsified);
    }
}

TEST_CASE("sweep grows the tail radius with the drift ball") {
    ScenarioConfig cfg = drift_scenario();
    cfg.N = 20000;
    cfg.policy = SelectionPolicy::support_point({1.0});
    const auto rows = sweep_scenario(cfg, {0.05, 0.2}, 2, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].eps == 0.05);
    CHECK(rows[1].delta_hat >= rows[0].delta_hat);
    CHECK_FALSE(rows[1].monotonicity_flag);
    for (const auto& row : rows) CHECK(row.verdict == StabilityVerdict::StableEvidence);
}

TEST_CASE("cli round trip through the filesystem") {
    const fs::path dir = test_tmp() / "cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "scenario.json";
    {
        std::ofstream out(cfg_path);
        out << kDriftScenario;
    }

    std::string output;
    const int code =
        run_cli("run --config " + cfg_path.string() + " --out " + (dir / "out").string() + " --svg",
                &output);
    REQUIRE(code == 0);
    CHECK(output.find("\"verdict\"") != std::string::npos);

    const fs::path csv = dir / "out" / "drift-unit_seed77.csv";
    const fs::path report = dir / "out" / "drift-unit_seed77_report.json";
    const fs::path svg = dir / "out" / "drift-unit_seed77.svg";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(report));
    REQUIRE(fs::exists(svg));

    SUBCASE("rerun is byte-identical") {
        const std::string first = slurp(csv);
        REQUIRE(run_cli("run --config " + cfg_path.string() + " --out " + (dir / "out").string()) ==
                0);
        CHECK(slurp(csv) == first);
    }

    SUBCASE("verify accepts the recorded table and rejects a tampered one") {
        CHECK(run_cli("verify --config " + cfg_path.string() + " --trajectory " + csv.string()) ==
              0);
        Trajectory tampered = parse_trajectory_csv(slurp(csv), 1);
        tampered.x[5][0] += 1e-6;
        const fs::path bad = dir / "tampered.csv";
        {
            std::ofstream out(bad);
            out << trajectory_csv(tampered);
        }
        CHECK(run_cli("verify --config " + cfg_path.string() + " --trajectory " + bad.string()) ==
              4);
    }

    SUBCASE("diagnose reproduces the stored verdict") {
        std::string diag_out;
        REQUIRE(run_cli("diagnose --config " + cfg_path.string() + " --trajectory " + csv.string() +
                            " --out " + (dir / "diag").string(),
                        &diag_out) == 0);
        const json stored = json::parse(slurp(report));
        CHECK(diag_out.find(stored["verdict"].get<std::string>()) != std::string::npos);
    }

    SUBCASE("validation failures exit with code 2") {
        const fs::path bad_cfg = dir / "bad.json";
        {
            json j = json::parse(kDriftScenario);
            j.erase("seed");
            std::ofstream out(bad_cfg);
            out << j.dump();
        }
        std::string err;
        CHECK(run_cli("run --config " + bad_cfg.string(), &err) == 2);
        CHECK(err.find("seed") != std::string::npos);
    }

    SUBCASE("missing files exit with code 3") {
        CHECK(run_cli("run --config " + (dir / "absent.json").string()) == 3);
    }
}

TEST_CASE("shipped sample configs reproduce their documented verdicts") {
    const fs::path cfgdir = SRILAB_CONFIG_DIR;
    const fs::path out = test_tmp() / "shipped";
    fs::remove_all(out);

    SUBCASE("approximate drift is judged stable") {
        const ScenarioConfig cfg =
            parse_scenario(load_json_file((cfgdir / "approximate_drift.json").string()));
        const RunOutcome outcome = run_scenario(cfg, cfg.seed);
        CHECK(outcome.summary.verdict == StabilityVerdict::StableEvidence);
    }

    SUBCASE("repeller is judged unstable") {
        const ScenarioConfig cfg =
            parse_scenario(load_json_file((cfgdir / "repeller.json").string()));
        const RunOutcome outcome = run_scenario(cfg, cfg.seed);
        CHECK(outcome.summary.verdict == StabilityVerdict::UnstableEvidence);
    }

    SUBCASE("descent scenario is judged stable") {
        const ScenarioConfig cfg =
            parse_scenario(load_json_file((cfgdir / "sgd_quadratic_kw.json").string()));
        const RunOutcome outcome = run_scenario(cfg, cfg.seed);
        CHECK(outcome.summary.verdict == StabilityVerdict::StableEvidence);
    }

    SUBCASE("map checks on the shipped drift spec corroborate") {
        std::string txt;
        REQUIRE(run_cli("check-map --config " + (cfgdir / "check_drift_map.json").string() +
                            " --out " + out.string(),
                        &txt) == 0);
        CHECK(txt.find("falsified") == std::string::npos);
    }
}

TEST_CASE("cli sweep and flow subcommands") {
    const fs::path dir = test_tmp() / "cli2";
    fs::remove_all(dir);
    fs::create_directories(dir);

    json scenario = json::parse(kDriftScenario);
    scenario["N"] = 5000;
    scenario["selection"] = {{"policy", "support_point"}, {"direction", {1.0}}};
    const fs::path cfg_path = dir / "scenario.json";
    {
        std::ofstream out(cfg_path);
        out << scenario.dump();
    }
    std::string sweep_out;
    REQUIRE(run_cli("sweep --config " + cfg_path.string() + " --eps-grid 0.05,0.2 --out " +
                        dir.string(),
                    &sweep_out) == 0);
    CHECK(sweep_out.find("eps,delta_hat,verdict,monotonicity_flag") != std::string::npos);
    REQUIRE(fs::exists(dir / "drift-unit_sweep.csv"));

    json flow = {{"name", "flow-unit"},
                 {"map", {{"type", "affine"}, {"A", {{-1.0}}}, {"b", {0.0}}}},
                 {"x0", {1.0}},
                 {"T", 1.0},
                 {"dt", 0.001},
                 {"selection", {{"policy", "minimal_norm"}}},
                 {"seed", 3}};
    const fs::path flow_path = dir / "flow.json";
    {
        std::ofstream out(flow_path);
        out << flow.dump();
    }
    std::string flow_out;
    REQUIRE(run_cli("flow --config " + flow_path.string() + " --out " + dir.string(), &flow_out) ==
            0);
    const std::string table = slurp(dir / "flow-unit.csv");
    CHECK(table.rfind("k,t,x_0,y_0,diverged", 0) == 0);
    // final state tracks e^{-1}
    const json meta = json::parse(flow_out);
    CHECK(std::abs(meta["final_state"][0].get<double>() - std::exp(-1.0)) <= 2e-4);

    SUBCASE("divergence trips the flag column on the truncated row") {
        json runaway = flow;
        runaway["name"] = "flow-runaway";
        runaway["map"] = {{"type", "affine"}, {"A", {{30.0}}}, {"b", {0.0}}};
        runaway["T"] = 10.0;
        runaway["dt"] = 0.5;
        const fs::path p = dir / "runaway.json";
        {
            std::ofstream out(p);
            out << runaway.dump();
        }
        std::string meta_out;
        REQUIRE(run_cli("flow --config " + p.string() + " --out " + dir.string(), &meta_out) == 0);
        CHECK(json::parse(meta_out)["diverged"].get<bool>());
        const std::string runaway_table = slurp(dir / "flow-runaway.csv");
        CHECK(runaway_table.find(",1\n") != std::string::npos);
        // truncated well before the 20 requested steps
        CHECK(json::parse(meta_out)["steps"].get<int>() < 20);
    }

    SUBCASE("SRILAB_OUT provides the default output directory") {
        const fs::path envdir = dir / "envout";
        const std::string cmd = "SRILAB_OUT=" + envdir.string() + " " + SRILAB_CLI_PATH +
                                " flow --config " + flow_path.string() + " > /dev/null 2>&1";
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        CHECK(fs::exists(envdir / "flow-unit.csv"));
    }
}
