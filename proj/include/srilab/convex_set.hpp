#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "srilab/linalg.hpp"

namespace srilab {

/// Compact convex subset of R^d, represented symbolically as a constructor
/// tree over five variants: a single point, a closed ball, the convex hull of
/// finitely many vertices, a Minkowski sum, and a positive rescaling. Values
/// are immutable and cheap to share. Support functions are exact for every
/// variant; projections are closed-form except for genuine polytopes, which
/// go through a small simplex-constrained QP.
class ConvexSet {
public:
    enum class Kind { Singleton, Ball, Polytope, MinkowskiSum, Scaled };

    static ConvexSet singleton(Vec point);
    static ConvexSet ball(Vec center, double radius);
    static ConvexSet polytope(std::vector<Vec> vertices);
    static ConvexSet minkowski_sum(ConvexSet left, ConvexSet right);
    static ConvexSet scaled(ConvexSet inner, double factor);

    Kind kind() const;
    std::size_t dim() const;

    /// sup_{y in S} <u, y>. Exact for all variants.
    double support(const Vec& u) const;

    /// A point of S attaining support(u). For u = 0 an arbitrary member.
    Vec support_point(const Vec& u) const;

    /// argmin_{z in S} ||z - y||.
    Vec project(const Vec& y) const;

    /// ||y - project(y)||; zero iff y lies in S (up to projection tolerance).
    double distance(const Vec& y) const;

    /// Deterministic interior point (convex combination fixed by the tree).
    Vec centroid() const;

    /// max_{y in S} ||y||, exact through the canonical form.
    double sup_norm() const;

    /// Collapses the tree to conv(vertices) + ball(center, radius).
    struct Canonical {
        std::vector<Vec> vertices;
        Vec ball_center;
        double ball_radius = 0.0;
    };
    Canonical canonical() const;

    /// The point, when the set is a single point.
    std::optional<Vec> as_singleton() const;

    struct Node;  // opaque representation

private:
    explicit ConvexSet(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// S + closed ball of radius r around the origin.
ConvexSet minkowski_ball(const ConvexSet& s, double r);

/// max over the supplied directions of |support(S1,u) - support(S2,u)|.
/// A lower bound on the Hausdorff distance, exact as the directions densify.
double hausdorff(const ConvexSet& s1, const ConvexSet& s2, const std::vector<Vec>& directions);

/// Deterministic quasi-uniform directions on the unit sphere. The default
/// count used throughout the library is 64*d.
std::vector<Vec> sphere_directions(std::size_t dim, std::size_t count);

inline std::size_t default_direction_count(std::size_t dim) { return 64 * dim; }

}  // namespace srilab
