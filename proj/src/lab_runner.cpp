#include "srilab/lab_runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "srilab/errors.hpp"
#include "srilab/scaling.hpp"

namespace srilab {

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

DiagnosticOptions diagnostic_options(const ScenarioConfig& cfg) {
    DiagnosticOptions opts;
    opts.T_override = cfg.diagnostic.T;
    opts.thresholds = cfg.diagnostic.thresholds;
    if (cfg.diagnostic.candidate_set) {
        opts.candidate = cfg.diagnostic.delta_chain
                             ? AttractorSpec(*cfg.diagnostic.candidate_set, cfg.diagnostic.radius_a,
                                             *cfg.diagnostic.delta_chain)
                             : AttractorSpec::with_default_chain(*cfg.diagnostic.candidate_set,
                                                                 cfg.diagnostic.radius_a);
    } else if (cfg.diagnostic.delta_chain || cfg.diagnostic.radius_a != 1.0) {
        ConvexSet origin = ConvexSet::singleton(zeros(cfg.dimension));
        opts.candidate = cfg.diagnostic.delta_chain
                             ? AttractorSpec(std::move(origin), cfg.diagnostic.radius_a,
                                             *cfg.diagnostic.delta_chain)
                             : AttractorSpec::with_default_chain(std::move(origin),
                                                                 cfg.diagnostic.radius_a);
    }
    return opts;
}

RunOutcome run_scenario(const ScenarioConfig& cfg, std::uint64_t seed, const WindowChoice* window) {
    const auto t_start = std::chrono::steady_clock::now();
    const ScenarioAssembly assembly = assemble_scenario(cfg);

    RngStream rng(seed);
    Trajectory traj =
        assembly.oracle
            ? iterate_with_oracle(assembly.map, cfg.schedule, cfg.noise, *assembly.oracle, cfg.x0,
                                  cfg.N, rng, cfg.name)
            : iterate(assembly.map, cfg.schedule, cfg.noise, cfg.policy, cfg.x0, cfg.N, rng,
                      cfg.name);

    DiagnosticOptions opts = diagnostic_options(cfg);
    if (window) opts.window = *window;
    RescalingReport report = run_diagnostic(traj, assembly.map, opts);

    RunOutcome out{std::move(traj), std::move(report), {}};
    out.summary.scenario = cfg.name;
    out.summary.seed = seed;
    out.summary.verdict = out.report.verdict;
    out.summary.sup_r = out.report.sup_r;
    double sup = 0.0;
    for (const auto& x : out.trajectory.x) sup = std::max(sup, norm(x));
    out.summary.sup_norm = sup;

    const ConvexSet reference = cfg.diagnostic.reference
                                    ? *cfg.diagnostic.reference
                                    : ConvexSet::singleton(zeros(cfg.dimension));
    out.summary.final_distance = reference.distance(out.trajectory.x.back());
    const std::size_t count = out.trajectory.x.size();
    const auto tail_start = static_cast<std::size_t>(
        std::floor(static_cast<double>(count) * (1.0 - cfg.diagnostic.tail_fraction)));
    double tail = 0.0;
    for (std::size_t n = std::min(tail_start, count - 1); n < count; ++n)
        tail = std::max(tail, reference.distance(out.trajectory.x[n]));
    out.summary.tail_distance = tail;

    out.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

RunBundle write_run_bundle(const RunOutcome& outcome, const ScenarioConfig& cfg,
                           const std::string& out_dir, bool svg) {
    RunBundle bundle;
    bundle.summary = outcome.summary;
    const std::string stem =
        out_dir + "/" + cfg.name + "_seed" + std::to_string(outcome.summary.seed);
    bundle.trajectory_path = stem + ".csv";
    bundle.report_path = stem + "_report.json";
    write_text_atomic(bundle.trajectory_path, trajectory_csv(outcome.trajectory));
    write_text_atomic(bundle.report_path,
                      report_to_json(outcome.report, outcome.summary).dump(2) + "\n");
    if (svg) {
        bundle.svg_path = stem + ".svg";
        write_text_atomic(bundle.svg_path, run_svg(outcome.trajectory, outcome.report));
    }
    return bundle;
}

namespace {

/// Rewrites a scenario so its drift ball has the requested radius. Plain
/// drift maps swap the eps; forward-difference quadratic descent scenarios
/// re-derive the perturbation size from the requested bias norm.
ScenarioConfig scenario_with_eps(const ScenarioConfig& base, double eps) {
    ScenarioConfig cfg = base;
    if (cfg.map) {
        if (cfg.map->kind() != MapSpec::Kind::DriftWithBall)
            throw ValidationError("sweep: scenario map must be drift_with_ball");
        cfg.map = MapSpec::drift_with_ball(cfg.map->inner(), eps);
        return cfg;
    }
    if (!cfg.sgd) throw ValidationError("sweep: scenario has neither map nor sgd");
    if (eps == 0.0) {
        cfg.sgd->eps = 0.0;
        return cfg;
    }
    if (cfg.sgd->estimator.kind == EstimatorSpec::Kind::KwForward) {
        const double diag_norm = norm(cfg.sgd->objective.A().diagonal());
        if (diag_norm == 0.0)
            throw ValidationError("sweep: forward-difference bias is identically zero");
        cfg.sgd->estimator.c = eps / diag_norm;
        cfg.sgd->eps.reset();  // re-derive from the new perturbation
        return cfg;
    }
    throw ValidationError(
        "sweep: eps is only adjustable for drift_with_ball maps and forward-difference descent");
}

}  // namespace

std::vector<SweepRow> sweep_scenario(const ScenarioConfig& cfg, const std::vector<double>& eps_grid,
                                     std::size_t seeds, std::size_t jobs) {
    if (eps_grid.empty()) throw ValidationError("sweep: empty eps grid");
    if (seeds == 0) throw ValidationError("sweep: need at least one seed");

    std::vector<SweepRow> rows(eps_grid.size());
    struct Cell {
        double delta_hat = 0.0;
        StabilityVerdict verdict = StabilityVerdict::Inconclusive;
    };
    std::vector<Cell> cells(eps_grid.size() * seeds);

    std::vector<ScenarioConfig> variants;
    std::vector<WindowChoice> windows;
    variants.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        variants.push_back(scenario_with_eps(cfg, eps));
        const ScenarioAssembly assembly = assemble_scenario(variants.back());
        windows.push_back(choose_window_length(assembly.map, diagnostic_options(variants.back())));
    }

    parallel_for(eps_grid.size() * seeds, jobs, [&](std::size_t idx) {
        const std::size_t e = idx / seeds;
        const std::size_t s = idx % seeds;
        const RunOutcome outcome = run_scenario(variants[e], cfg.seed + s, &windows[e]);
        cells[idx] = Cell{outcome.summary.tail_distance, outcome.summary.verdict};
    });

    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        SweepRow& row = rows[e];
        row.eps = eps_grid[e];
        row.verdict = StabilityVerdict::StableEvidence;
        for (std::size_t s = 0; s < seeds; ++s) {
            const Cell& c = cells[e * seeds + s];
            row.delta_hat = std::max(row.delta_hat, c.delta_hat);
            if (c.verdict == StabilityVerdict::UnstableEvidence)
                row.verdict = StabilityVerdict::UnstableEvidence;
            else if (c.verdict == StabilityVerdict::Inconclusive &&
                     row.verdict == StabilityVerdict::StableEvidence)
                row.verdict = StabilityVerdict::Inconclusive;
        }
        // Flag a drop beyond the noise band; the radius should grow with eps.
        constexpr double noise_band = 0.01;
        if (e > 0 && row.delta_hat < rows[e - 1].delta_hat - noise_band)
            row.monotonicity_flag = true;
    }
    return rows;
}

std::vector<PropertyReport> check_map(const CheckMapConfig& cfg) {
    std::vector<PropertyReport> reports;
    MarchaudMap map = MarchaudMap::from_spec(cfg.map, cfg.bound_K, cfg.lipschitz_L);
    RngStream rng(cfg.seed);

    std::vector<Vec> xs;
    xs.reserve(cfg.samples);
    for (std::size_t i = 0; i < cfg.samples; ++i)
        xs.push_back(rng.ball_point(map.dim(), cfg.sample_radius));
    reports.push_back(check_pointwise_bound(map, xs));

    std::vector<Vec> centers(xs.begin(), xs.begin() + std::min<std::size_t>(xs.size(), 32));
    reports.push_back(check_usc(map, centers, 20, rng));

    if (map.lipschitz_L() && map.single_valued()) {
        std::vector<std::pair<Vec, Vec>> pairs;
        for (std::size_t i = 0; i < cfg.samples; ++i)
            pairs.emplace_back(rng.ball_point(map.dim(), cfg.sample_radius),
                               rng.ball_point(map.dim(), cfg.sample_radius));
        reports.push_back(check_lipschitz_preservation(map, {1.0, 10.0, 100.0}, pairs));
    }

    if (cfg.drift_eps) {
        MarchaudMap inner = MarchaudMap::from_spec(cfg.map.inner());
        std::vector<Vec> probe_xs(xs.begin(), xs.begin() + std::min<std::size_t>(xs.size(), 16));
        reports.push_back(check_drift_equivalence(inner, *cfg.drift_eps, probe_xs, 1e-4));
    }
    return reports;
}

std::vector<std::string> verify_trajectory(const ScenarioConfig& cfg, const Trajectory& traj) {
    std::vector<std::string> violations;
    auto complain = [&violations](const std::string& m) { violations.push_back(m); };
    const ScenarioAssembly assembly = assemble_scenario(cfg);
    const std::size_t N = traj.steps();

    if (traj.x.empty() || traj.t.front() != 0.0) complain("t(0) != 0");
    if (!traj.x.empty() && norm(traj.x.front() - cfg.x0) != 0.0)
        complain("first iterate differs from the configured x0");
    if (N > cfg.N) complain("more steps recorded than configured");

    for (std::size_t n = 0; n < N; ++n) {
        if (!(traj.t[n + 1] > traj.t[n])) {
            complain("times not strictly increasing at step " + std::to_string(n));
            break;
        }
        if (std::abs((traj.t[n + 1] - traj.t[n]) - traj.a[n]) > 1e-12 * std::max(1.0, traj.t[n + 1])) {
            complain("time increments disagree with recorded steps at " + std::to_string(n));
            break;
        }
    }
    for (std::size_t n = 0; n < N; ++n) {
        const double expected = cfg.schedule.at(n);
        if (std::abs(traj.a[n] - expected) > 1e-15 * std::max(1.0, expected)) {
            complain("recorded step a(" + std::to_string(n) + ") disagrees with the schedule");
            break;
        }
        if (traj.a[n] > 1.0 + 1e-15) {
            complain("step size above 1 at " + std::to_string(n));
            break;
        }
    }

    // Recursion identity, exactly recomputable from the table.
    for (std::size_t n = 0; n < N; ++n) {
        const Vec rhs = traj.x[n] + traj.a[n] * (traj.y[n] + traj.M[n]);
        const double scale = std::max(1.0, norm(traj.x[n + 1]));
        if (norm(traj.x[n + 1] - rhs) > 1e-12 * scale) {
            complain("recursion identity fails at step " + std::to_string(n));
            break;
        }
    }

    // Selection membership.
    for (std::size_t n = 0; n < N; ++n) {
        const double dist = assembly.map.evaluate(traj.x[n]).distance(traj.y[n]);
        if (dist > 1e-7) {
            complain("selection leaves h(x_n) at step " + std::to_string(n) + " (distance " +
                     std::to_string(dist) + ")");
            break;
        }
    }

    // Empirical conditional second moment of the noise.
    if (N >= 10000) {
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n)
            acc += dot(traj.M[n], traj.M[n]) / (1.0 + dot(traj.x[n], traj.x[n]));
        const double mean = acc / static_cast<double>(N);
        if (mean > assembly.total_noise_K * 1.05 + 1e-15)
            complain("empirical noise moment " + std::to_string(mean) +
                     " exceeds 1.05 * declared K = " + std::to_string(assembly.total_noise_K));
    }
    return violations;
}

}  // namespace srilab
