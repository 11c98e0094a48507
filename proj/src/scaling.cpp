#include "srilab/scaling.hpp"

#include <cmath>
#include <limits>

#include "srilab/errors.hpp"

namespace srilab {

ScalingFamily::ScalingFamily(MarchaudMap base_map, std::vector<double> grid)
    : base(std::move(base_map)), c_grid(std::move(grid)) {
    if (c_grid.empty()) throw ValidationError("ScalingFamily: empty c grid");
    if (c_grid.front() < 1.0) throw ValidationError("ScalingFamily: grid must start at c >= 1");
    for (std::size_t i = 1; i < c_grid.size(); ++i)
        if (c_grid[i] <= c_grid[i - 1])
            throw ValidationError("ScalingFamily: grid must be strictly increasing");
}

std::vector<double> default_c_grid() {
    constexpr std::size_t n = 40;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = std::pow(10.0, 4.0 * static_cast<double>(i) / static_cast<double>(n - 1));
    grid.front() = 1.0;
    return grid;
}

MarchaudMap scaled_map(const MarchaudMap& base, double c) {
    if (c < 1.0) throw ValidationError("scaled_map: requires c >= 1");
    std::optional<MapSpec> spec;
    if (base.spec()) spec = MapSpec::scaled_by(*base.spec(), c);
    return MarchaudMap(
        base.dim(), base.bound_K(), base.lipschitz_L(),
        [base, c](const Vec& x) { return ConvexSet::scaled(base.evaluate(c * x), 1.0 / c); },
        spec, base.single_valued());
}

InfinityEstimate estimate_h_infinity(const ScalingFamily& family, const Vec& x, InfinityMode mode,
                                     const std::vector<Vec>& directions,
                                     double nonconvergence_tol) {
    if (mode == InfinityMode::ClosedForm)
        throw ValidationError("estimate_h_infinity: use closed_form_estimate for closed forms");
    if (directions.empty()) throw ValidationError("estimate_h_infinity: empty direction list");
    if (x.size() != family.base.dim())
        throw ValidationError("estimate_h_infinity: dimension mismatch");

    const std::size_t nc = family.c_grid.size();
    const std::size_t nd = directions.size();

    // supports[i][j] = support of h_{c_i}(x) in direction j
    std::vector<std::vector<double>> supports(nc, std::vector<double>(nd));
    for (std::size_t i = 0; i < nc; ++i) {
        const double c = family.c_grid[i];
        const ConvexSet hc = ConvexSet::scaled(family.base.evaluate(c * x), 1.0 / c);
        for (std::size_t j = 0; j < nd; ++j) supports[i][j] = hc.support(directions[j]);
    }

    InfinityEstimate est;
    est.mode = mode;
    est.x = x;
    est.directions = directions;
    est.c_max = family.c_grid.back();
    est.limit_support = supports.back();
    est.envelope_support.assign(nd, 0.0);

    const std::size_t tail_begin = nc / 2;
    for (std::size_t j = 0; j < nd; ++j) {
        double env = supports[tail_begin][j];
        for (std::size_t i = tail_begin; i < nc; ++i) {
            env = mode == InfinityMode::LimsupHull ? std::max(env, supports[i][j])
                                                   : std::min(env, supports[i][j]);
        }
        est.envelope_support[j] = env;
    }

    // Residual: largest support swing across the last decade of scales.
    const double decade_start = est.c_max / 10.0;
    double residual = 0.0;
    for (std::size_t j = 0; j < nd; ++j) {
        double lo = supports.back()[j], hi = supports.back()[j];
        for (std::size_t i = 0; i < nc; ++i) {
            if (family.c_grid[i] < decade_start) continue;
            lo = std::min(lo, supports[i][j]);
            hi = std::max(hi, supports[i][j]);
        }
        residual = std::max(residual, hi - lo);
    }
    est.residual = residual;
    est.converged = residual <= nonconvergence_tol;
    return est;
}

InfinityEstimate closed_form_estimate(const MarchaudMap& limit_map, const Vec& x,
                                      const std::vector<Vec>& directions) {
    if (directions.empty()) throw ValidationError("closed_form_estimate: empty direction list");
    InfinityEstimate est;
    est.mode = InfinityMode::ClosedForm;
    est.x = x;
    est.directions = directions;
    est.c_max = std::numeric_limits<double>::infinity();
    const ConvexSet value = limit_map.evaluate(x);
    est.limit_support.reserve(directions.size());
    for (const auto& u : directions) est.limit_support.push_back(value.support(u));
    est.envelope_support = est.limit_support;
    est.residual = 0.0;
    est.converged = true;
    return est;
}

MarchaudMap closed_form_h_infinity(const MapSpec& spec) {
    switch (spec.kind()) {
        case MapSpec::Kind::Affine:
            return MarchaudMap::from_spec(MapSpec::affine(spec.A(), zeros(spec.dim())));
        case MapSpec::Kind::NegGradQuadratic:
            return MarchaudMap::from_spec(
                MapSpec::affine(spec.A().scaled(-2.0), zeros(spec.dim())));
        case MapSpec::Kind::DriftWithBall:
        case MapSpec::Kind::ScaledBy:
        case MapSpec::Kind::ClosedFormInfinity:
            // The added ball vanishes at scale, and rescaling commutes with
            // the limit, so the limit of the inner family is the answer.
            return closed_form_h_infinity(spec.inner());
    }
    throw ValidationError(
        "closed_form_h_infinity: unsupported spec; use estimate_h_infinity instead");
}

double hausdorff_estimate(const InfinityEstimate& a, const InfinityEstimate& b) {
    if (a.limit_support.size() != b.limit_support.size())
        throw ValidationError("hausdorff_estimate: direction grids differ");
    double best = 0.0;
    for (std::size_t j = 0; j < a.limit_support.size(); ++j)
        best = std::max(best, std::abs(a.limit_support[j] - b.limit_support[j]));
    return best;
}

double distance_to_set(const InfinityEstimate& est, const ConvexSet& s) {
    double best = 0.0;
    for (std::size_t j = 0; j < est.directions.size(); ++j)
        best = std::max(best, std::abs(est.limit_support[j] - s.support(est.directions[j])));
    return best;
}

PropertyReport check_lipschitz_preservation(const MarchaudMap& base,
                                            const std::vector<double>& c_list,
                                            const std::vector<std::pair<Vec, Vec>>& sample_pairs) {
    if (!base.single_valued())
        throw ValidationError("check_lipschitz_preservation: defined for single-valued maps");
    if (!base.lipschitz_L())
        throw ValidationError("check_lipschitz_preservation: base has no declared Lipschitz constant");
    PropertyReport rep;
    rep.property = "lipschitz_preservation";
    rep.tolerance = 1e-9;
    const double L = *base.lipschitz_L();

    auto value_at = [](const MarchaudMap& m, const Vec& x) {
        auto p = m.evaluate(x).as_singleton();
        if (!p) throw ValidationError("check_lipschitz_preservation: map value is not a point");
        return *p;
    };

    for (double c : c_list) {
        const MarchaudMap hc = scaled_map(base, c);
        for (const auto& [x, y] : sample_pairs) {
            const double lhs = norm(value_at(hc, x) - value_at(hc, y));
            const double rhs = L * norm(x - y) * (1.0 + rep.tolerance);
            ++rep.samples_tested;
            if (lhs > rhs) {
                rep.verdict = Verdict::Falsified;
                rep.witness = PropertyWitness{x, y, lhs};
                rep.note = "Lipschitz bound violated at scale c=" + std::to_string(c);
                return rep;
            }
        }
    }
    rep.note = "same Lipschitz constant held at every tested scale";
    return rep;
}

PropertyReport check_drift_equivalence(const MarchaudMap& inner, double eps,
                                       const std::vector<Vec>& xs, double tolerance) {
    if (eps < 0.0) throw ValidationError("check_drift_equivalence: eps must be nonnegative");
    PropertyReport rep;
    rep.property = "drift_equivalence";
    rep.tolerance = tolerance;

    const ScalingFamily plain(inner, default_c_grid());
    const ScalingFamily drifted(approximate_drift(inner, eps), default_c_grid());
    const auto dirs = sphere_directions(inner.dim(), default_direction_count(inner.dim()));
    const double allowance = tolerance + eps / default_c_grid().back() + 1e-12;

    for (const auto& x : xs) {
        const auto a = estimate_h_infinity(plain, x, InfinityMode::LimsupHull, dirs);
        const auto b = estimate_h_infinity(drifted, x, InfinityMode::LimsupHull, dirs);
        const double gap = hausdorff_estimate(a, b);
        ++rep.samples_tested;
        if (gap > allowance) {
            rep.verdict = Verdict::Falsified;
            rep.witness = PropertyWitness{x, std::nullopt, gap};
            rep.note = "limit maps of h and h + eps-ball disagree";
            return rep;
        }
    }
    rep.note = "limit maps agree within tolerance + eps/c_max on all samples";
    return rep;
}

}  // namespace srilab
