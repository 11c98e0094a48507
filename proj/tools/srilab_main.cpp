// srilab — batch front end for stochastic recursive inclusion experiments.
//
// Subcommands: run, sweep, diagnose, check-map, flow, verify.
// Exit codes: 0 completion (verdicts are data, not errors), 2 validation,
// 3 I/O, 4 invariant violation.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "srilab/errors.hpp"
#include "srilab/lab_runner.hpp"

namespace {

using namespace srilab;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

std::string resolve_out_dir(const std::string& flag_value, const ScenarioConfig* cfg) {
    if (!flag_value.empty()) return flag_value;
    if (cfg && !cfg->output_dir.empty()) return cfg->output_dir;
    if (const char* env = std::getenv("SRILAB_OUT"); env && *env) return env;
    return "out";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            grid.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("--eps-grid: bad number '" + item + "'");
        }
    }
    if (grid.empty()) throw ValidationError("--eps-grid: empty grid");
    return grid;
}

void print_summary(const RunSummary& s) {
    ordered_json j;
    j["scenario"] = s.scenario;
    j["seed"] = s.seed;
    j["verdict"] = to_string(s.verdict);
    j["sup_norm"] = s.sup_norm;
    j["sup_r"] = s.sup_r;
    j["final_distance"] = s.final_distance;
    j["tail_distance"] = s.tail_distance;
    j["wall_seconds"] = s.wall_seconds;
    std::cout << j.dump() << "\n";
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
            std::size_t seeds, std::size_t jobs, const std::string& out_flag, bool svg) {
    ScenarioConfig cfg = parse_scenario(load_json_file(config_path));
    if (seed_flag) cfg.seed = *seed_flag;
    const std::string out_dir = resolve_out_dir(out_flag, &cfg);

    const WindowChoice window =
        choose_window_length(assemble_scenario(cfg).map, diagnostic_options(cfg));
    std::vector<RunBundle> bundles(seeds);
    parallel_for(seeds, jobs, [&](std::size_t i) {
        const RunOutcome outcome = run_scenario(cfg, cfg.seed + i, &window);
        bundles[i] = write_run_bundle(outcome, cfg, out_dir, svg);
    });
    for (const auto& b : bundles) print_summary(b.summary);
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_csv, std::size_t seeds,
              std::size_t jobs, const std::string& out_flag) {
    ScenarioConfig cfg = parse_scenario(load_json_file(config_path));
    const std::vector<double> grid = parse_grid(grid_csv);
    const auto rows = sweep_scenario(cfg, grid, seeds, jobs);

    std::string csv = "eps,delta_hat,verdict,monotonicity_flag\n";
    for (const auto& row : rows) {
        csv += fmt_double(row.eps);
        csv += ',';
        csv += fmt_double(row.delta_hat);
        csv += ',';
        csv += to_string(row.verdict);
        csv += ',';
        csv += row.monotonicity_flag ? '1' : '0';
        csv += '\n';
    }
    const std::string out_dir = resolve_out_dir(out_flag, &cfg);
    const std::string path = out_dir + "/" + cfg.name + "_sweep.csv";
    write_text_atomic(path, csv);
    std::cout << csv;
    std::cerr << "sweep table written to " << path << "\n";
    return kExitOk;
}

int cmd_diagnose(const std::string& config_path, const std::string& traj_path,
                 const std::string& out_flag) {
    ScenarioConfig cfg = parse_scenario(load_json_file(config_path));
    Trajectory traj = parse_trajectory_csv(read_file(traj_path), cfg.dimension);
    traj.scenario_id = cfg.name;
    traj.seed = cfg.seed;

    const ScenarioAssembly assembly = assemble_scenario(cfg);
    DiagnosticOptions opts;
    opts.T_override = cfg.diagnostic.T;
    opts.thresholds = cfg.diagnostic.thresholds;
    const RescalingReport report = run_diagnostic(traj, assembly.map, opts);

    RunSummary summary;
    summary.scenario = cfg.name;
    summary.seed = cfg.seed;
    summary.verdict = report.verdict;
    summary.sup_r = report.sup_r;
    for (const auto& x : traj.x) summary.sup_norm = std::max(summary.sup_norm, norm(x));

    const std::string out_dir = resolve_out_dir(out_flag, &cfg);
    const std::string path = out_dir + "/" + cfg.name + "_diagnose_report.json";
    write_text_atomic(path, report_to_json(report, summary).dump(2) + "\n");
    print_summary(summary);
    return kExitOk;
}

int cmd_check_map(const std::string& config_path, const std::string& out_flag) {
    const CheckMapConfig cfg = parse_check_map(load_json_file(config_path));
    const auto reports = check_map(cfg);
    ordered_json j = ordered_json::array();
    bool all_ok = true;
    for (const auto& rep : reports) {
        j.push_back(property_report_to_json(rep));
        all_ok = all_ok && rep.ok();
    }
    const std::string out_dir = resolve_out_dir(out_flag, nullptr);
    const std::string path = out_dir + "/map_checks.json";
    write_text_atomic(path, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    std::cerr << (all_ok ? "all checks corroborated" : "some checks falsified") << "\n";
    return kExitOk;
}

int cmd_flow(const std::string& config_path, const std::string& out_flag) {
    const FlowConfig cfg = parse_flow(load_json_file(config_path));
    MarchaudMap map = MarchaudMap::from_spec(cfg.map, cfg.map_bound_K, cfg.map_lipschitz_L);
    RngStream rng(cfg.seed);
    const FlowTrajectory traj = integrate(map, cfg.x0, cfg.horizon, cfg.dt, cfg.policy, rng);
    const std::string out_dir = resolve_out_dir(out_flag, nullptr);
    const std::string path = out_dir + "/" + cfg.name + ".csv";
    write_text_atomic(path, flow_csv(traj, map.dim()));
    ordered_json j;
    j["name"] = cfg.name;
    j["steps"] = traj.selections.size();
    j["final_state"] = traj.states.back();
    j["diverged"] = traj.diverged;
    j["table"] = path;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& traj_path) {
    ScenarioConfig cfg = parse_scenario(load_json_file(config_path));
    const Trajectory traj = parse_trajectory_csv(read_file(traj_path), cfg.dimension);
    const auto violations = verify_trajectory(cfg, traj);
    if (violations.empty()) {
        std::cout << "verify: all recorded invariants hold (" << traj.steps() << " steps)\n";
        return kExitOk;
    }
    for (const auto& v : violations) std::cerr << "verify: " << v << "\n";
    return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic recursive inclusion laboratory"};
    app.require_subcommand(1);

    std::string config_path, traj_path, out_dir, eps_grid;
    std::optional<std::uint64_t> seed_flag;
    std::size_t seeds = 1, jobs = 1;
    bool svg = false;

    auto add_common = [&](CLI::App* sub, bool with_seed_batch) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory (default: config, $SRILAB_OUT, ./out)");
        if (with_seed_batch) {
            sub->add_option("--seed", seed_flag, "override the config seed");
            sub->add_option("--seeds", seeds, "number of consecutive seeds to run");
            sub->add_option("--jobs", jobs, "parallel workers");
        }
    };

    CLI::App* run = app.add_subcommand("run", "execute a scenario and its diagnostics");
    add_common(run, true);
    run->add_flag("--svg", svg, "also write a small SVG chart");

    CLI::App* sweep = app.add_subcommand("sweep", "rerun a drift scenario across an eps grid");
    add_common(sweep, true);
    sweep->add_option("--eps-grid", eps_grid, "comma-separated eps values")->required();

    CLI::App* diagnose = app.add_subcommand("diagnose", "diagnose a stored trajectory table");
    add_common(diagnose, false);
    diagnose->add_option("--trajectory", traj_path, "trajectory CSV")->required();

    CLI::App* check = app.add_subcommand("check-map", "run the map property checks");
    add_common(check, false);

    CLI::App* flow = app.add_subcommand("flow", "integrate the inclusion flow of a map");
    add_common(flow, false);

    CLI::App* verify = app.add_subcommand("verify", "re-validate a trajectory table");
    verify->add_option("--config", config_path, "JSON config file")->required();
    verify->add_option("--trajectory", traj_path, "trajectory CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, seed_flag, seeds, jobs, out_dir, svg);
        if (sweep->parsed()) return cmd_sweep(config_path, eps_grid, seeds, jobs, out_dir);
        if (diagnose->parsed()) return cmd_diagnose(config_path, traj_path, out_dir);
        if (check->parsed()) return cmd_check_map(config_path, out_dir);
        if (flow->parsed()) return cmd_flow(config_path, out_dir);
        if (verify->parsed()) return cmd_verify(config_path, traj_path);
    } catch (const srilab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const srilab::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const srilab::InvariantViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
