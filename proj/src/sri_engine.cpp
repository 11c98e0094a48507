#include "srilab/sri_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srilab/di_integrator.hpp"
#include "srilab/errors.hpp"

namespace srilab {

StepSchedule StepSchedule::power(double a0, double gamma) {
    if (!(a0 > 0.0) || a0 > 1.0)
        throw ValidationError("power schedule: a0 must lie in (0, 1] so that sup a(n) <= 1");
    if (gamma <= 0.5)
        throw ValidationError(
            "power schedule: gamma <= 0.5 rejected; sum a(n)^2 diverges (needs 2*gamma > 1)");
    if (gamma > 1.0)
        throw ValidationError(
            "power schedule: gamma > 1 rejected; sum a(n) converges (needs gamma <= 1)");
    StepSchedule s;
    s.family_ = Family::Power;
    s.a0_ = a0;
    s.gamma_ = gamma;
    return s;
}

StepSchedule StepSchedule::harmonic(double a0) {
    if (!(a0 > 0.0) || a0 > 1.0)
        throw ValidationError("harmonic schedule: a0 must lie in (0, 1] so that sup a(n) <= 1");
    StepSchedule s;
    s.family_ = Family::Harmonic;
    s.a0_ = a0;
    return s;
}

StepSchedule StepSchedule::custom(std::vector<double> values) {
    if (values.empty()) throw ValidationError("custom schedule: empty step list");
    for (double v : values)
        if (!(v > 0.0) || v > 1.0)
            throw ValidationError("custom schedule: every step must lie in (0, 1]");
    StepSchedule s;
    s.family_ = Family::Custom;
    s.values_ = std::move(values);
    return s;
}

double StepSchedule::at(std::size_t n) const {
    switch (family_) {
        case Family::Power:
            return a0_ / std::pow(static_cast<double>(n + 1), gamma_);
        case Family::Harmonic:
            return a0_ / static_cast<double>(n + 1);
        case Family::Custom:
            if (n >= values_.size())
                throw ValidationError("custom schedule: step index beyond the supplied list");
            return values_[n];
    }
    throw ValidationError("schedule: unknown family");
}

std::size_t StepSchedule::capacity() const {
    return family_ == Family::Custom ? values_.size() : std::numeric_limits<std::size_t>::max();
}

NoiseModel NoiseModel::bounded_iid(std::size_t dim, double half_width, std::optional<double> K) {
    if (half_width < 0.0) throw ValidationError("bounded_iid: negative half width");
    const double floor = static_cast<double>(dim) * half_width * half_width / 3.0;
    const double k = K.value_or(floor);
    if (k < floor - 1e-15)
        throw ValidationError("bounded_iid: declared K below d * half_width^2 / 3");
    return NoiseModel(Kind::BoundedIid, dim, half_width, k);
}

NoiseModel NoiseModel::gaussian(std::size_t dim, double sigma, std::optional<double> K) {
    if (sigma < 0.0) throw ValidationError("gaussian: negative sigma");
    const double floor = static_cast<double>(dim) * sigma * sigma;
    const double k = K.value_or(floor);
    if (k < floor - 1e-15) throw ValidationError("gaussian: declared K below d * sigma^2");
    return NoiseModel(Kind::Gaussian, dim, sigma, k);
}

NoiseModel NoiseModel::state_scaled_gaussian(std::size_t dim, double sigma0,
                                             std::optional<double> K) {
    if (sigma0 < 0.0) throw ValidationError("state_scaled_gaussian: negative sigma0");
    const double floor = static_cast<double>(dim) * sigma0 * sigma0;
    const double k = K.value_or(floor);
    if (k < floor - 1e-15)
        throw ValidationError("state_scaled_gaussian: declared K below d * sigma0^2");
    return NoiseModel(Kind::StateScaledGaussian, dim, sigma0, k);
}

Vec NoiseModel::sample(const Vec& x, RngStream& rng) const {
    Vec m(dim_, 0.0);
    switch (kind_) {
        case Kind::BoundedIid:
            for (auto& e : m) e = rng.uniform(-param_, param_);
            return m;
        case Kind::Gaussian:
            if (param_ == 0.0) return m;
            for (auto& e : m) e = param_ * rng.gaussian();
            return m;
        case Kind::StateScaledGaussian: {
            if (param_ == 0.0) return m;
            const double scale = param_ * std::sqrt(1.0 + dot(x, x));
            for (auto& e : m) e = scale * rng.gaussian();
            return m;
        }
    }
    throw ValidationError("noise: unknown kind");
}

namespace {

Trajectory run_recursion(const MarchaudMap& map, const StepSchedule& schedule,
                         const NoiseModel& noise, const Vec& x0, std::size_t N, RngStream& rng,
                         std::string scenario_id,
                         const std::function<StepDraw(const Vec&, RngStream&)>& draw) {
    if (N < 1) throw ValidationError("iterate: N must be at least 1");
    if (x0.size() != map.dim()) throw ValidationError("iterate: x0 dimension mismatch");
    if (noise.dim() != map.dim()) throw ValidationError("iterate: noise dimension mismatch");
    if (schedule.capacity() < N)
        throw ValidationError("iterate: schedule does not cover N steps");

    Trajectory traj;
    traj.dim = map.dim();
    traj.seed = rng.seed();
    traj.scenario_id = std::move(scenario_id);
    traj.x.reserve(N + 1);
    traj.y.reserve(N);
    traj.M.reserve(N);
    traj.a.reserve(N);
    traj.t.reserve(N + 1);

    Vec x = x0;
    traj.x.push_back(x);
    traj.t.push_back(0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const double an = schedule.at(n);
        StepDraw d = draw(x, rng);
        Vec m = noise.sample(x, rng);
        if (!d.extra_noise.empty()) m += d.extra_noise;
        x = x + an * (d.y + m);
        traj.y.push_back(std::move(d.y));
        traj.M.push_back(std::move(m));
        traj.a.push_back(an);
        traj.t.push_back(traj.t.back() + an);
        traj.x.push_back(x);
        if (norm(x) > kOverflowGuard) {
            traj.diverged = true;
            break;
        }
    }
    return traj;
}

}  // namespace

Trajectory iterate(const MarchaudMap& map, const StepSchedule& schedule, const NoiseModel& noise,
                   const SelectionPolicy& policy, const Vec& x0, std::size_t N, RngStream& rng,
                   std::string scenario_id) {
    return run_recursion(map, schedule, noise, x0, N, rng, std::move(scenario_id),
                         [&map, &policy](const Vec& x, RngStream& r) {
                             return StepDraw{select(policy, map.evaluate(x), r), {}};
                         });
}

Trajectory iterate_with_oracle(const MarchaudMap& map, const StepSchedule& schedule,
                               const NoiseModel& noise, const SelectionOracle& oracle,
                               const Vec& x0, std::size_t N, RngStream& rng,
                               std::string scenario_id) {
    return run_recursion(map, schedule, noise, x0, N, rng, std::move(scenario_id), oracle);
}

Vec interpolate(const Trajectory& traj, double t) {
    if (t < 0.0 || t > traj.t.back() + 1e-12)
        throw ValidationError("interpolate: t outside [0, t(N)]");
    const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), t);
    if (it == traj.t.end()) return traj.x.back();
    const auto hi = static_cast<std::size_t>(it - traj.t.begin());
    if (hi == 0) return traj.x.front();
    const std::size_t lo = hi - 1;
    const double t0 = traj.t[lo], t1 = traj.t[hi];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * traj.x[lo] + w * traj.x[hi];
}

Vec piecewise_y(const Trajectory& traj, double t) {
    if (t < 0.0 || t > traj.t.back() + 1e-12)
        throw ValidationError("piecewise_y: t outside [0, t(N)]");
    const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), t);
    auto hi = static_cast<std::size_t>(it - traj.t.begin());
    if (hi == 0) hi = 1;
    const std::size_t n = std::min(hi - 1, traj.y.size() - 1);
    return traj.y[n];
}

}  // namespace srilab
