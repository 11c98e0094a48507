#pragma once

#include "srilab/di_integrator.hpp"
#include "srilab/scenario_config.hpp"

namespace srilab {

/// Shortest decimal form of a double that parses back to the same bits.
std::string fmt_double(double v);

/// Writes through a temp file and renames, so readers never see a torn file.
void write_text_atomic(const std::string& path, const std::string& content);

/// Trajectory table. Header is the fixed contract
/// n,t,x_0..x_{d-1},y_0..y_{d-1},M_0..M_{d-1},a
/// with one row per iterate; the final row carries the last state and leaves
/// the step fields empty. Byte-identical for identical (config, seed).
std::string trajectory_csv(const Trajectory& traj);
Trajectory parse_trajectory_csv(const std::string& content, std::size_t dim);

/// Flow table: k,t,x_0..x_{d-1},y_0..y_{d-1}.
std::string flow_csv(const FlowTrajectory& traj, std::size_t dim);

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    StabilityVerdict verdict = StabilityVerdict::Inconclusive;
    double sup_norm = 0.0;
    double sup_r = 0.0;
    double final_distance = 0.0;  // distance of x_N to the reference set
    double tail_distance = 0.0;   // max distance over the tail fraction
    double wall_seconds = 0.0;
};

ordered_json report_to_json(const RescalingReport& report, const RunSummary& summary);
ordered_json property_report_to_json(const PropertyReport& rep);

/// Minimal two-panel SVG: ||x_n|| against t, and r(n) against the window
/// index. Plot-ready data lives in the CSV; this is a convenience view.
std::string run_svg(const Trajectory& traj, const RescalingReport& report);

}  // namespace srilab
