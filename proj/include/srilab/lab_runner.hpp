#pragma once

#include "srilab/lab_io.hpp"

namespace srilab {

struct RunOutcome {
    Trajectory trajectory;
    RescalingReport report;
    RunSummary summary;
};

/// Diagnostic options a scenario config describes (thresholds, candidate,
/// T policy).
DiagnosticOptions diagnostic_options(const ScenarioConfig& cfg);

/// Executes a scenario end to end: recursion, diagnostics, summary. Seed
/// batches precompute the window choice once and pass it in; a null window
/// lets the diagnostic probe for itself.
RunOutcome run_scenario(const ScenarioConfig& cfg, std::uint64_t seed,
                        const WindowChoice* window = nullptr);

struct RunBundle {
    std::string trajectory_path;
    std::string report_path;
    std::string svg_path;  // empty unless requested
    RunSummary summary;
};

/// Writes the trajectory table and report (and optional SVG) for a run.
RunBundle write_run_bundle(const RunOutcome& outcome, const ScenarioConfig& cfg,
                           const std::string& out_dir, bool svg);

struct SweepRow {
    double eps = 0.0;
    double delta_hat = 0.0;  // max tail distance to the reference set across seeds
    StabilityVerdict verdict = StabilityVerdict::Inconclusive;
    bool monotonicity_flag = false;  // set when delta_hat dropped below the previous row
};

/// One seed batch per eps. The scenario must carry a drift ball (or a
/// forward-difference quadratic descent scenario, whose perturbation is
/// re-derived from eps).
std::vector<SweepRow> sweep_scenario(const ScenarioConfig& cfg, const std::vector<double>& eps_grid,
                                     std::size_t seeds, std::size_t jobs);

/// Consolidated map property checks; one report per applicable check.
std::vector<PropertyReport> check_map(const CheckMapConfig& cfg);

/// Re-validates every recorded invariant of a trajectory table against its
/// scenario: header and times, the recursion identity, selection membership,
/// schedule agreement, and the noise second moment. Returns violations.
std::vector<std::string> verify_trajectory(const ScenarioConfig& cfg, const Trajectory& traj);

/// Runs fn(i) for i in [0, count) on up to `jobs` worker threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace srilab
