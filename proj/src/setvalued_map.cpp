#include "srilab/setvalued_map.hpp"

#include <cmath>

#include "srilab/errors.hpp"

namespace srilab {

struct MapSpec::Node {
    Kind kind;
    std::size_t dim = 0;
    Mat A;
    Vec b;
    double eps = 0.0;
    double c = 1.0;
    std::shared_ptr<const Node> inner;
};

MapSpec MapSpec::affine(Mat A, Vec b) {
    if (A.rows != A.cols) throw ValidationError("affine: A must be square");
    if (A.rows != b.size()) throw ValidationError("affine: A and b dimensions differ");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Affine;
    n->dim = b.size();
    n->A = std::move(A);
    n->b = std::move(b);
    return MapSpec(std::move(n));
}

MapSpec MapSpec::neg_grad_quadratic(Mat A, Vec B) {
    if (A.rows != A.cols) throw ValidationError("neg_grad_quadratic: A must be square");
    if (A.rows != B.size()) throw ValidationError("neg_grad_quadratic: A and B dimensions differ");
    if (!A.symmetric(1e-12)) throw ValidationError("neg_grad_quadratic: A must be symmetric");
    auto n = std::make_shared<Node>();
    n->kind = Kind::NegGradQuadratic;
    n->dim = B.size();
    n->A = std::move(A);
    n->b = std::move(B);
    return MapSpec(std::move(n));
}

MapSpec MapSpec::drift_with_ball(MapSpec inner, double eps) {
    if (eps < 0.0) throw ValidationError("drift_with_ball: eps must be nonnegative");
    auto n = std::make_shared<Node>();
    n->kind = Kind::DriftWithBall;
    n->dim = inner.dim();
    n->eps = eps;
    n->inner = inner.node_;
    return MapSpec(std::move(n));
}

MapSpec MapSpec::scaled_by(MapSpec inner, double c) {
    if (!(c > 0.0)) throw ValidationError("scaled_by: c must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Kind::ScaledBy;
    n->dim = inner.dim();
    n->c = c;
    n->inner = inner.node_;
    return MapSpec(std::move(n));
}

MapSpec MapSpec::closed_form_infinity(MapSpec inner) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::ClosedFormInfinity;
    n->dim = inner.dim();
    n->inner = inner.node_;
    return MapSpec(std::move(n));
}

MapSpec::Kind MapSpec::kind() const { return node_->kind; }
std::size_t MapSpec::dim() const { return node_->dim; }
const Mat& MapSpec::A() const { return node_->A; }
const Vec& MapSpec::b() const { return node_->b; }
double MapSpec::eps() const { return node_->eps; }
double MapSpec::c() const { return node_->c; }
MapSpec MapSpec::inner() const {
    if (!node_->inner) throw ValidationError("MapSpec: no inner spec");
    return MapSpec(node_->inner);
}

MarchaudMap::MarchaudMap(std::size_t dim, double bound_K, std::optional<double> lipschitz_L,
                         Evaluator evaluator, std::optional<MapSpec> spec, bool single_valued)
    : dim_(dim),
      bound_K_(bound_K),
      lipschitz_L_(lipschitz_L),
      evaluator_(std::move(evaluator)),
      spec_(std::move(spec)),
      single_valued_(single_valued) {
    if (dim_ == 0) throw ValidationError("MarchaudMap: dimension must be positive");
    if (!(bound_K_ > 0.0)) throw ValidationError("MarchaudMap: bound_K must be positive");
    if (lipschitz_L_ && !(*lipschitz_L_ > 0.0))
        throw ValidationError("MarchaudMap: lipschitz_L must be positive");
}

ConvexSet MarchaudMap::evaluate(const Vec& x) const {
    if (x.size() != dim_) throw ValidationError("evaluate: dimension mismatch");
    return evaluator_(x);
}

namespace {

double affine_K(const Mat& A, const Vec& b) {
    return std::max({A.frobenius(), norm(b), 1e-12});
}

}  // namespace

MarchaudMap MarchaudMap::from_spec(const MapSpec& spec, std::optional<double> bound_K,
                                   std::optional<double> lipschitz_L) {
    const std::size_t d = spec.dim();
    switch (spec.kind()) {
        case MapSpec::Kind::Affine: {
            const Mat A = spec.A();
            const Vec b = spec.b();
            const double K = bound_K.value_or(affine_K(A, b));
            const double L = lipschitz_L.value_or(std::max(A.frobenius(), 1e-12));
            return MarchaudMap(
                d, K, L,
                [A, b](const Vec& x) { return ConvexSet::singleton(A.apply(x) + b); }, spec, true);
        }
        case MapSpec::Kind::NegGradQuadratic: {
            const Mat G = spec.A().scaled(-2.0);
            const Vec b = -1.0 * spec.b();
            const double K = bound_K.value_or(affine_K(G, b));
            const double L = lipschitz_L.value_or(std::max(G.frobenius(), 1e-12));
            return MarchaudMap(
                d, K, L,
                [G, b](const Vec& x) { return ConvexSet::singleton(G.apply(x) + b); }, spec, true);
        }
        case MapSpec::Kind::DriftWithBall: {
            MarchaudMap inner = from_spec(spec.inner());
            MarchaudMap wrapped = approximate_drift(inner, spec.eps());
            return MarchaudMap(d, bound_K.value_or(wrapped.bound_K()),
                               lipschitz_L ? lipschitz_L : wrapped.lipschitz_L(),
                               [inner, e = spec.eps()](const Vec& x) {
                                   return minkowski_ball(inner.evaluate(x), e);
                               },
                               spec, inner.single_valued() && spec.eps() == 0.0);
        }
        case MapSpec::Kind::ScaledBy: {
            MarchaudMap inner = from_spec(spec.inner());
            const double c = spec.c();
            return MarchaudMap(d, bound_K.value_or(inner.bound_K()),
                               lipschitz_L ? lipschitz_L : inner.lipschitz_L(),
                               [inner, c](const Vec& x) {
                                   return ConvexSet::scaled(inner.evaluate(c * x), 1.0 / c);
                               },
                               spec, inner.single_valued());
        }
        case MapSpec::Kind::ClosedFormInfinity: {
            // Resolve the limit spec of the inner family.
            std::function<MapSpec(const MapSpec&)> limit = [&](const MapSpec& s) -> MapSpec {
                switch (s.kind()) {
                    case MapSpec::Kind::Affine:
                        return MapSpec::affine(s.A(), zeros(s.dim()));
                    case MapSpec::Kind::NegGradQuadratic:
                        return MapSpec::affine(s.A().scaled(-2.0), zeros(s.dim()));
                    case MapSpec::Kind::DriftWithBall:
                    case MapSpec::Kind::ScaledBy:
                    case MapSpec::Kind::ClosedFormInfinity:
                        return limit(s.inner());
                }
                throw ValidationError("closed_form_infinity: unsupported inner spec");
            };
            MapSpec lim = limit(spec.inner());
            MarchaudMap m = from_spec(lim, bound_K, lipschitz_L);
            return MarchaudMap(d, m.bound_K(), m.lipschitz_L(),
                               [m](const Vec& x) { return m.evaluate(x); }, spec, true);
        }
    }
    throw ValidationError("from_spec: unknown map spec");
}

MarchaudMap approximate_drift(const MarchaudMap& inner, double eps) {
    if (eps < 0.0) throw ValidationError("approximate_drift: eps must be nonnegative");
    double K;
    if (inner.lipschitz_L()) {
        const double h0 = inner.evaluate(zeros(inner.dim())).sup_norm();
        K = std::max(h0 + eps, *inner.lipschitz_L());
    } else {
        K = inner.bound_K() + eps;
    }
    std::optional<MapSpec> spec;
    if (inner.spec()) spec = MapSpec::drift_with_ball(*inner.spec(), eps);
    return MarchaudMap(
        inner.dim(), K, inner.lipschitz_L(),
        [inner, eps](const Vec& x) { return minkowski_ball(inner.evaluate(x), eps); }, spec,
        inner.single_valued() && eps == 0.0);
}

PropertyReport check_pointwise_bound(const MarchaudMap& map, const std::vector<Vec>& xs) {
    if (xs.empty()) throw ValidationError("check_pointwise_bound: no sample points");
    PropertyReport rep;
    rep.property = "pointwise_bound";
    rep.tolerance = 1e-9;
    const auto dirs = sphere_directions(map.dim(), default_direction_count(map.dim()));
    for (const auto& x : xs) {
        const ConvexSet hx = map.evaluate(x);
        double measured = 0.0;
        for (const auto& u : dirs) measured = std::max(measured, hx.support(u));
        const double cap = map.bound_K() * (1.0 + norm(x)) * (1.0 + rep.tolerance);
        ++rep.samples_tested;
        if (measured > cap) {
            rep.verdict = Verdict::Falsified;
            rep.witness = PropertyWitness{x, std::nullopt, measured};
            rep.note = "sup ||h(x)|| exceeds K(1+||x||)";
            return rep;
        }
    }
    rep.note = "bound held on all samples (sampling evidence only)";
    return rep;
}

PropertyReport check_usc(const MarchaudMap& map, const std::vector<Vec>& centers,
                         std::size_t shrink_steps, RngStream& rng) {
    if (shrink_steps < 2) throw ValidationError("check_usc: shrink_steps must be >= 2");
    PropertyReport rep;
    rep.property = "upper_semicontinuity";
    rep.tolerance = 1e-3;
    for (const auto& x : centers) {
        const Vec ray = rng.unit_vector(map.dim());
        const Vec u = rng.unit_vector(map.dim());
        Vec y_prev, y_last;
        for (std::size_t k = 1; k <= shrink_steps; ++k) {
            const double rho = std::pow(2.0, -static_cast<double>(k));
            const Vec xk = x + rho * ray;
            y_prev = y_last;
            y_last = map.evaluate(xk).support_point(u);
        }
        ++rep.samples_tested;
        const bool settled = !y_prev.empty() && norm(y_last - y_prev) <= 1e-4 * (1.0 + norm(y_last));
        if (!settled) continue;  // no limit candidate; probe is inconclusive here
        const double dist = map.evaluate(x).distance(y_last);
        if (dist > rep.tolerance) {
            rep.verdict = Verdict::Falsified;
            rep.witness = PropertyWitness{x, y_last, dist};
            rep.note = "limit of selections misses h(center)";
            return rep;
        }
    }
    rep.note = "no discontinuity found (falsification probe, not a proof)";
    return rep;
}

double estimate_bound_K(const MarchaudMap::Evaluator& eval, std::size_t dim, RngStream& rng) {
    double best = 1e-12;
    const auto dirs = sphere_directions(dim, default_direction_count(dim));
    for (int shell = 0; shell <= 10; ++shell) {
        const double radius = shell == 0 ? 0.0 : std::pow(2.0, shell - 1);
        for (int rep = 0; rep < 8; ++rep) {
            Vec x = shell == 0 ? zeros(dim) : radius * rng.unit_vector(dim);
            const ConvexSet hx = eval(x);
            double sup = 0.0;
            for (const auto& u : dirs) sup = std::max(sup, hx.support(u));
            best = std::max(best, sup / (1.0 + norm(x)));
            if (shell == 0) break;
        }
    }
    return 1.1 * best;
}

Vec select(const SelectionPolicy& policy, const ConvexSet& s, RngStream& rng) {
    switch (policy.kind) {
        case SelectionPolicy::Kind::MinimalNorm:
            return s.project(zeros(s.dim()));
        case SelectionPolicy::Kind::SupportPoint: {
            const Vec u = policy.direction ? *policy.direction : rng.unit_vector(s.dim());
            if (u.size() != s.dim()) throw ValidationError("select: direction dimension mismatch");
            return s.support_point(u);
        }
        case SelectionPolicy::Kind::RandomExtreme:
            return s.support_point(rng.unit_vector(s.dim()));
        case SelectionPolicy::Kind::Centroid:
            return s.centroid();
    }
    throw ValidationError("select: unknown policy");
}

}  // namespace srilab
