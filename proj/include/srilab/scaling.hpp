#pragma once

#include <vector>

#include "srilab/setvalued_map.hpp"

namespace srilab {

/// The family h_c(x) = {y | cy in h(cx)} evaluated along an increasing grid
/// of scales c >= 1. Used to probe the behavior of the map at large norms.
struct ScalingFamily {
    MarchaudMap base;
    std::vector<double> c_grid;

    ScalingFamily(MarchaudMap base_map, std::vector<double> grid);
};

/// Geometric grid from 1 to 1e4 with 40 points.
std::vector<double> default_c_grid();

/// h_c as a map: x -> (1/c) h(cx). Growth constant and Lipschitz constant
/// carry over unchanged. Requires c >= 1.
MarchaudMap scaled_map(const MarchaudMap& base, double c);

enum class InfinityMode { Liminf, LimsupHull, ClosedForm };

/// Finite-grid estimate of the limit of h_c(x) as c grows.
///
/// Per direction u the point estimate is the support of h_c(x) at the largest
/// grid scale; the mode-dependent envelope records the min (Liminf) or max
/// (LimsupHull) of the supports over the tail half of the grid, which is what
/// distinguishes oscillating families from convergent ones. The residual is
/// the largest support variation across the last decade of the grid; when it
/// exceeds the caller's tolerance the estimate is flagged, never rejected.
struct InfinityEstimate {
    InfinityMode mode = InfinityMode::LimsupHull;
    Vec x;
    std::vector<Vec> directions;
    std::vector<double> limit_support;     // support at the largest c
    std::vector<double> envelope_support;  // tail-half min/max per mode
    double residual = 0.0;
    bool converged = true;
    double c_max = 0.0;

    double support_at(std::size_t dir_index) const { return limit_support[dir_index]; }
};

InfinityEstimate estimate_h_infinity(const ScalingFamily& family, const Vec& x, InfinityMode mode,
                                     const std::vector<Vec>& directions,
                                     double nonconvergence_tol = 1e-3);

/// Estimate with residual 0 taken from a closed-form limit map.
InfinityEstimate closed_form_estimate(const MarchaudMap& limit_map, const Vec& x,
                                      const std::vector<Vec>& directions);

/// Closed-form limit map for the supported spec families; rejects specs that
/// need the numerical estimator.
MarchaudMap closed_form_h_infinity(const MapSpec& spec);

/// Max direction-wise difference of the point estimates (same directions).
double hausdorff_estimate(const InfinityEstimate& a, const InfinityEstimate& b);

/// Max direction-wise gap between the point estimate and a concrete set.
double distance_to_set(const InfinityEstimate& est, const ConvexSet& s);

/// ||h_c(x) - h_c(y)|| <= L ||x - y|| for every c in c_list over sample pairs.
/// Defined for single-valued maps with a declared Lipschitz constant.
PropertyReport check_lipschitz_preservation(const MarchaudMap& base,
                                            const std::vector<double>& c_list,
                                            const std::vector<std::pair<Vec, Vec>>& sample_pairs);

/// Compares the limit estimates of `inner` and of inner + eps-ball at each x.
/// Corroborated when they agree within tolerance + eps / c_max.
PropertyReport check_drift_equivalence(const MarchaudMap& inner, double eps,
                                       const std::vector<Vec>& xs, double tolerance);

}  // namespace srilab
