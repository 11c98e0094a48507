#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "srilab/convex_set.hpp"
#include "srilab/rng.hpp"

namespace srilab {

/// Serializable description of a map x -> h(x). The algebra is closed under
/// the constructions the library needs, so every experiment driven through
/// the CLI can be reconstructed from its config alone.
class MapSpec {
public:
    enum class Kind { Affine, NegGradQuadratic, DriftWithBall, ScaledBy, ClosedFormInfinity };

    /// x -> {Ax + b}
    static MapSpec affine(Mat A, Vec b);
    /// x -> {-(2Ax + B)}, the negated gradient of x'Ax + Bx + c (A symmetric).
    static MapSpec neg_grad_quadratic(Mat A, Vec B);
    /// x -> inner(x) + closed ball of radius eps.
    static MapSpec drift_with_ball(MapSpec inner, double eps);
    /// x -> (1/c) inner(cx).
    static MapSpec scaled_by(MapSpec inner, double c);
    /// The large-scale limit of inner, in closed form.
    static MapSpec closed_form_infinity(MapSpec inner);

    Kind kind() const;
    std::size_t dim() const;
    const Mat& A() const;
    const Vec& b() const;
    double eps() const;
    double c() const;
    MapSpec inner() const;

private:
    struct Node;
    explicit MapSpec(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Set-valued map x -> h(x) with nonempty convex compact values, carrying the
/// linear-growth constant K (sup_{w in h(x)} ||w|| <= K(1+||x||)) and, when
/// known, a Lipschitz constant for the single-valued case.
class MarchaudMap {
public:
    using Evaluator = std::function<ConvexSet(const Vec&)>;

    MarchaudMap(std::size_t dim, double bound_K, std::optional<double> lipschitz_L,
                Evaluator evaluator, std::optional<MapSpec> spec, bool single_valued);

    /// h(x). Throws on dimension mismatch.
    ConvexSet evaluate(const Vec& x) const;
    ConvexSet operator()(const Vec& x) const { return evaluate(x); }

    std::size_t dim() const { return dim_; }
    double bound_K() const { return bound_K_; }
    std::optional<double> lipschitz_L() const { return lipschitz_L_; }
    bool single_valued() const { return single_valued_; }
    const std::optional<MapSpec>& spec() const { return spec_; }

    /// Builds the evaluator for a serializable spec. K and L default to
    /// closed-form constants of the family unless overridden.
    static MarchaudMap from_spec(const MapSpec& spec, std::optional<double> bound_K = {},
                                 std::optional<double> lipschitz_L = {});

private:
    std::size_t dim_;
    double bound_K_;
    std::optional<double> lipschitz_L_;
    Evaluator evaluator_;
    std::optional<MapSpec> spec_;
    bool single_valued_;
};

/// x -> h(x) + closed eps-ball. Stays serializable when the inner map is.
/// The growth constant follows (||h(0)|| + eps) max L for Lipschitz inner
/// maps, and K + eps otherwise.
MarchaudMap approximate_drift(const MarchaudMap& inner, double eps);

enum class Verdict { Corroborated, Falsified };

struct PropertyWitness {
    Vec x;
    std::optional<Vec> y;
    double measured = 0.0;
};

/// Outcome of a sampling-based property probe. "Corroborated" means the
/// sampler failed to falsify; it is never a proof.
struct PropertyReport {
    std::string property;
    Verdict verdict = Verdict::Corroborated;
    std::optional<PropertyWitness> witness;
    std::size_t samples_tested = 0;
    double tolerance = 0.0;
    std::string note;

    bool ok() const { return verdict == Verdict::Corroborated; }
};

/// Checks sup_{w in h(x)} ||w|| <= K(1+||x||) over a direction grid at each x.
PropertyReport check_pointwise_bound(const MarchaudMap& map, const std::vector<Vec>& xs);

/// Falsification probe for upper semicontinuity: approaches each center along
/// a random ray with geometrically shrinking radii and tracks a support point
/// in a fixed random direction. Falsified when the tracked points settle but
/// stay bounded away from h(center).
PropertyReport check_usc(const MarchaudMap& map, const std::vector<Vec>& centers,
                         std::size_t shrink_steps, RngStream& rng);

/// Estimates the growth constant by sampling a radius ladder; inflated 10%.
double estimate_bound_K(const MarchaudMap::Evaluator& eval, std::size_t dim, RngStream& rng);

struct SelectionPolicy {
    enum class Kind { MinimalNorm, SupportPoint, RandomExtreme, Centroid };
    Kind kind = Kind::MinimalNorm;
    std::optional<Vec> direction;  // SupportPoint with a fixed direction

    static SelectionPolicy minimal_norm() { return {Kind::MinimalNorm, {}}; }
    static SelectionPolicy support_point(Vec u) { return {Kind::SupportPoint, std::move(u)}; }
    static SelectionPolicy support_point_random() { return {Kind::SupportPoint, {}}; }
    static SelectionPolicy random_extreme() { return {Kind::RandomExtreme, {}}; }
    static SelectionPolicy centroid() { return {Kind::Centroid, {}}; }
};

/// Draws one element of S under the policy. Always a member of S.
Vec select(const SelectionPolicy& policy, const ConvexSet& s, RngStream& rng);

}  // namespace srilab
