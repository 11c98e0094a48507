#pragma once

#include <array>
#include <optional>

#include "srilab/setvalued_map.hpp"

namespace srilab {

/// Euler trajectory of the inclusion dx/dt in h(x): at each step one element
/// of h(x_k) is selected and followed for dt. states[k+1] = states[k] +
/// dt * selections[k] holds exactly by construction.
struct FlowTrajectory {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> selections;
    bool diverged = false;
};

/// State-norm guard: beyond this the trajectory is truncated and flagged as
/// divergence evidence instead of overflowing.
inline constexpr double kOverflowGuard = 1e12;

FlowTrajectory integrate(const MarchaudMap& map, const Vec& x0, double horizon, double dt,
                         const SelectionPolicy& policy, RngStream& rng);

/// Candidate attracting set with the ball radius its neighborhood lives in
/// and the delta chain delta1 < delta2 < delta3 < delta4 < 1 (in units of
/// radius_a) used by the rescaling diagnostic.
struct AttractorSpec {
    ConvexSet set;
    double radius_a = 1.0;
    std::array<double, 4> deltas{};

    AttractorSpec(ConvexSet a, double radius, std::array<double, 4> chain);

    /// delta1 = sup-norm of A (scaled), remaining deltas equally spaced
    /// toward 1.
    static AttractorSpec with_default_chain(ConvexSet a, double radius = 1.0);
};

struct ProbeResult {
    bool attracting = false;
    double T_eps = 0.0;  // earliest probed time after which all runs stay in the eps-neighborhood
    double horizon = 0.0;
    std::optional<FlowTrajectory> witness;  // escaping / diverging trajectory
};

/// Integrates from every grid point under every policy and measures the time
/// after which all trajectories remain within eps of the candidate set. A
/// trajectory that diverges, or sits outside the eps-neighborhood for the
/// whole final tenth of the horizon, is returned as a not-attracting witness.
/// Corroboration covers only the sampled selections and starts.
ProbeResult probe_attractor(const MarchaudMap& map, const AttractorSpec& candidate, double eps,
                            const std::vector<Vec>& init_grid,
                            const std::vector<SelectionPolicy>& policies, RngStream& rng,
                            double horizon, double dt);

struct LimitSetEstimate {
    std::vector<Vec> tail_points;
    double bounding_radius = 0.0;  // max distance of a tail point to the reference set
};

LimitSetEstimate limit_set_estimate(const std::vector<FlowTrajectory>& trajectories,
                                    double tail_fraction, const ConvexSet& reference);

/// Deterministic probe starts: origin, +/- radius e_i, and a few seeded
/// interior points.
std::vector<Vec> default_init_grid(std::size_t dim, double radius, RngStream& rng);

}  // namespace srilab
