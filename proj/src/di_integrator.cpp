#include "srilab/di_integrator.hpp"

#include <cmath>

#include "srilab/errors.hpp"

namespace srilab {

FlowTrajectory integrate(const MarchaudMap& map, const Vec& x0, double horizon, double dt,
                         const SelectionPolicy& policy, RngStream& rng) {
    if (!(dt > 0.0)) throw ValidationError("integrate: dt must be positive");
    if (horizon < dt) throw ValidationError("integrate: horizon must be at least dt");
    if (x0.size() != map.dim()) throw ValidationError("integrate: x0 dimension mismatch");

    const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-12));
    FlowTrajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.selections.reserve(steps);

    Vec x = x0;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (std::size_t k = 0; k < steps; ++k) {
        const Vec y = select(policy, map.evaluate(x), rng);
        x = x + dt * y;
        traj.selections.push_back(y);
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.states.push_back(x);
        if (norm(x) > kOverflowGuard) {
            traj.diverged = true;
            break;
        }
    }
    return traj;
}

AttractorSpec::AttractorSpec(ConvexSet a, double radius, std::array<double, 4> chain)
    : set(std::move(a)), radius_a(radius), deltas(chain) {
    if (!(radius_a > 0.0)) throw ValidationError("AttractorSpec: radius_a must be positive");
    for (std::size_t i = 1; i < 4; ++i)
        if (!(deltas[i] > deltas[i - 1]))
            throw ValidationError("AttractorSpec: delta chain must be strictly increasing");
    if (!(deltas[3] < 1.0)) throw ValidationError("AttractorSpec: delta4 must be < 1");
    if (deltas[0] < 0.0) throw ValidationError("AttractorSpec: delta1 must be nonnegative");
    if (set.sup_norm() > deltas[0] * radius_a + 1e-12)
        throw ValidationError("AttractorSpec: candidate set exceeds delta1 * radius_a");
}

AttractorSpec AttractorSpec::with_default_chain(ConvexSet a, double radius) {
    const double d1 = a.sup_norm() / radius;
    if (d1 >= 1.0)
        throw ValidationError("AttractorSpec: candidate set does not fit inside the unit-scale ball");
    std::array<double, 4> chain{};
    for (std::size_t i = 0; i < 4; ++i)
        chain[i] = d1 + static_cast<double>(i) * (1.0 - d1) / 4.0;
    return AttractorSpec(std::move(a), radius, chain);
}

ProbeResult probe_attractor(const MarchaudMap& map, const AttractorSpec& candidate, double eps,
                            const std::vector<Vec>& init_grid,
                            const std::vector<SelectionPolicy>& policies, RngStream& rng,
                            double horizon, double dt) {
    if (!(eps > 0.0)) throw ValidationError("probe_attractor: eps must be positive");
    if (init_grid.empty()) throw ValidationError("probe_attractor: empty init grid");
    if (policies.empty()) throw ValidationError("probe_attractor: no selection policies");
    for (const auto& x0 : init_grid)
        if (norm(x0) > candidate.radius_a + 1e-12)
            throw ValidationError("probe_attractor: init point outside the radius_a ball");

    ProbeResult result;
    result.horizon = horizon;
    double t_eps = 0.0;

    std::size_t stream = 0;
    for (const auto& x0 : init_grid) {
        for (const auto& policy : policies) {
            RngStream sub = rng.split(stream++);
            FlowTrajectory traj = integrate(map, x0, horizon, dt, policy, sub);
            if (traj.diverged) {
                result.attracting = false;
                result.witness = std::move(traj);
                return result;
            }
            // last time the trajectory sits outside the eps-neighborhood
            double last_exit = -1.0;
            for (std::size_t k = 0; k < traj.states.size(); ++k) {
                if (candidate.set.distance(traj.states[k]) >= eps) last_exit = traj.times[k];
            }
            if (last_exit >= 0.9 * horizon) {
                // still outside through the final stretch: persistent escape
                result.attracting = false;
                result.witness = std::move(traj);
                return result;
            }
            if (last_exit >= 0.0) t_eps = std::max(t_eps, last_exit + traj.dt);
        }
    }
    result.attracting = true;
    result.T_eps = t_eps;
    return result;
}

LimitSetEstimate limit_set_estimate(const std::vector<FlowTrajectory>& trajectories,
                                    double tail_fraction, const ConvexSet& reference) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw ValidationError("limit_set_estimate: tail_fraction must lie in (0, 1]");
    LimitSetEstimate est;
    for (const auto& traj : trajectories) {
        const std::size_t n = traj.states.size();
        if (n == 0) continue;
        const auto start = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * (1.0 - tail_fraction)));
        for (std::size_t k = std::min(start, n - 1); k < n; ++k) {
            est.tail_points.push_back(traj.states[k]);
            est.bounding_radius = std::max(est.bounding_radius, reference.distance(traj.states[k]));
        }
    }
    return est;
}

std::vector<Vec> default_init_grid(std::size_t dim, double radius, RngStream& rng) {
    std::vector<Vec> grid;
    grid.push_back(zeros(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        Vec e = zeros(dim);
        e[i] = radius;
        grid.push_back(e);
        e[i] = -radius;
        grid.push_back(e);
    }
    for (int k = 0; k < 6; ++k) grid.push_back(rng.ball_point(dim, radius));
    return grid;
}

}  // namespace srilab
