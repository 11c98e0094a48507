#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "srilab/setvalued_map.hpp"

namespace srilab {

/// Step sizes a(n) in (0, 1]. The power and harmonic families satisfy
/// sum a(n) = infinity and sum a(n)^2 < infinity by construction (hence the
/// gamma window); custom lists are validated for range only.
class StepSchedule {
public:
    enum class Family { Power, Harmonic, Custom };

    static StepSchedule power(double a0, double gamma);
    static StepSchedule harmonic(double a0);
    static StepSchedule custom(std::vector<double> values);

    double at(std::size_t n) const;
    Family family() const { return family_; }
    double a0() const { return a0_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& values() const { return values_; }
    /// Largest n + 1 the schedule can serve (unbounded for closed forms).
    std::size_t capacity() const;

private:
    StepSchedule() = default;
    Family family_ = Family::Harmonic;
    double a0_ = 1.0;
    double gamma_ = 1.0;
    std::vector<double> values_;
};

/// Martingale-difference noise: mean zero given the past, with conditional
/// second moment at most K (1 + ||x||^2). The declared K may exceed but
/// never undercut the closed-form floor of the kind.
class NoiseModel {
public:
    enum class Kind { BoundedIid, Gaussian, StateScaledGaussian };

    static NoiseModel bounded_iid(std::size_t dim, double half_width,
                                  std::optional<double> K = {});
    static NoiseModel gaussian(std::size_t dim, double sigma, std::optional<double> K = {});
    static NoiseModel state_scaled_gaussian(std::size_t dim, double sigma0,
                                            std::optional<double> K = {});

    Vec sample(const Vec& x, RngStream& rng) const;
    double bound_K() const { return K_; }
    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    std::size_t dim() const { return dim_; }

private:
    NoiseModel(Kind k, std::size_t d, double p, double K) : kind_(k), dim_(d), param_(p), K_(K) {}
    Kind kind_;
    std::size_t dim_;
    double param_;
    double K_;
};

/// Full record of one run of x_{n+1} = x_n + a(n) [y_n + M_{n+1}]:
/// iterates, selections, noise, steps and the cumulative times
/// t(n) = sum_{i<n} a(i). The recursion identity is re-verifiable from the
/// record alone.
struct Trajectory {
    std::size_t dim = 0;
    std::vector<Vec> x;   // size N+1
    std::vector<Vec> y;   // size N
    std::vector<Vec> M;   // size N; M[n] is the noise applied between n and n+1
    std::vector<double> a;  // size N
    std::vector<double> t;  // size N+1, t[0] = 0
    std::uint64_t seed = 0;
    std::string scenario_id;
    bool diverged = false;

    std::size_t steps() const { return y.size(); }
    double horizon() const { return t.back(); }
};

/// Per-step source that produces the selection and an extra zero-mean noise
/// component (used by gradient-estimator runs, where the estimator's own
/// fluctuation rides the noise channel).
struct StepDraw {
    Vec y;
    Vec extra_noise;
};
using SelectionOracle = std::function<StepDraw(const Vec& x, RngStream& rng)>;

/// Runs the recursion for N steps. A state norm beyond the overflow guard
/// truncates the run and sets the diverged flag; it is data, not an error.
Trajectory iterate(const MarchaudMap& map, const StepSchedule& schedule, const NoiseModel& noise,
                   const SelectionPolicy& policy, const Vec& x0, std::size_t N, RngStream& rng,
                   std::string scenario_id = {});

Trajectory iterate_with_oracle(const MarchaudMap& map, const StepSchedule& schedule,
                               const NoiseModel& noise, const SelectionOracle& oracle,
                               const Vec& x0, std::size_t N, RngStream& rng,
                               std::string scenario_id = {});

/// Piecewise-linear interpolation through the iterates; exact at the knots.
Vec interpolate(const Trajectory& traj, double t);

/// Right-continuous step function through the selections.
Vec piecewise_y(const Trajectory& traj, double t);

}  // namespace srilab
