#include "srilab/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "srilab/errors.hpp"

namespace srilab {

struct ConvexSet::Node {
    Kind kind;
    std::size_t dim = 0;
    Vec point;                    // Singleton point / Ball center
    double radius = 0.0;          // Ball
    double factor = 1.0;          // Scaled
    std::vector<Vec> vertices;    // Polytope
    std::shared_ptr<const Node> left, right, inner;
};

namespace {

void require_dim(const Vec& v, std::size_t d, const char* what) {
    if (v.size() != d) throw ValidationError(std::string(what) + ": dimension mismatch");
}

}  // namespace

ConvexSet ConvexSet::singleton(Vec point) {
    if (point.empty()) throw ValidationError("singleton: empty point");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Singleton;
    n->dim = point.size();
    n->point = std::move(point);
    return ConvexSet(std::move(n));
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
    if (center.empty()) throw ValidationError("ball: empty center");
    if (radius < 0.0) throw ValidationError("ball: negative radius");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Ball;
    n->dim = center.size();
    n->point = std::move(center);
    n->radius = radius;
    return ConvexSet(std::move(n));
}

ConvexSet ConvexSet::polytope(std::vector<Vec> vertices) {
    if (vertices.empty()) throw ValidationError("polytope: needs at least one vertex");
    const std::size_t d = vertices.front().size();
    if (d == 0) throw ValidationError("polytope: empty vertex");
    for (const auto& v : vertices) require_dim(v, d, "polytope");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Polytope;
    n->dim = d;
    n->vertices = std::move(vertices);
    return ConvexSet(std::move(n));
}

ConvexSet ConvexSet::minkowski_sum(ConvexSet left, ConvexSet right) {
    if (left.dim() != right.dim()) throw ValidationError("minkowski_sum: dimension mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::MinkowskiSum;
    n->dim = left.dim();
    n->left = left.node_;
    n->right = right.node_;
    return ConvexSet(std::move(n));
}

ConvexSet ConvexSet::scaled(ConvexSet inner, double factor) {
    if (!(factor > 0.0)) throw ValidationError("scaled: factor must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Scaled;
    n->dim = inner.dim();
    n->factor = factor;
    n->inner = inner.node_;
    return ConvexSet(std::move(n));
}

ConvexSet::Kind ConvexSet::kind() const { return node_->kind; }
std::size_t ConvexSet::dim() const { return node_->dim; }

namespace {

double support_rec(const ConvexSet::Node* n, const Vec& u);

double support_rec(const ConvexSet::Node* n, const Vec& u) {
    using Kind = ConvexSet::Kind;
    switch (n->kind) {
        case Kind::Singleton:
            return dot(u, n->point);
        case Kind::Ball:
            return dot(u, n->point) + n->radius * norm(u);
        case Kind::Polytope: {
            double best = dot(u, n->vertices.front());
            for (std::size_t i = 1; i < n->vertices.size(); ++i)
                best = std::max(best, dot(u, n->vertices[i]));
            return best;
        }
        case Kind::MinkowskiSum:
            return support_rec(n->left.get(), u) + support_rec(n->right.get(), u);
        case Kind::Scaled:
            return n->factor * support_rec(n->inner.get(), u);
    }
    throw ValidationError("support: unknown variant");
}

Vec support_point_rec(const ConvexSet::Node* n, const Vec& u) {
    using Kind = ConvexSet::Kind;
    switch (n->kind) {
        case Kind::Singleton:
            return n->point;
        case Kind::Ball: {
            const double nu = norm(u);
            if (nu == 0.0) return n->point;
            return n->point + (n->radius / nu) * u;
        }
        case Kind::Polytope: {
            std::size_t best = 0;
            double bv = dot(u, n->vertices.front());
            for (std::size_t i = 1; i < n->vertices.size(); ++i) {
                const double v = dot(u, n->vertices[i]);
                if (v > bv) {
                    bv = v;
                    best = i;
                }
            }
            return n->vertices[best];
        }
        case Kind::MinkowskiSum:
            return support_point_rec(n->left.get(), u) + support_point_rec(n->right.get(), u);
        case Kind::Scaled:
            return n->factor * support_point_rec(n->inner.get(), u);
    }
    throw ValidationError("support_point: unknown variant");
}

Vec centroid_rec(const ConvexSet::Node* n) {
    using Kind = ConvexSet::Kind;
    switch (n->kind) {
        case Kind::Singleton:
        case Kind::Ball:
            return n->point;
        case Kind::Polytope: {
            Vec c = zeros(n->dim);
            for (const auto& v : n->vertices) c += v;
            return (1.0 / static_cast<double>(n->vertices.size())) * c;
        }
        case Kind::MinkowskiSum:
            return centroid_rec(n->left.get()) + centroid_rec(n->right.get());
        case Kind::Scaled:
            return n->factor * centroid_rec(n->inner.get());
    }
    throw ValidationError("centroid: unknown variant");
}

// Vertex-count guard for polytope-polytope Minkowski sums.
constexpr std::size_t kMaxCanonicalVertices = 10000;

ConvexSet::Canonical canonical_rec(const ConvexSet::Node* n) {
    using Kind = ConvexSet::Kind;
    ConvexSet::Canonical c;
    switch (n->kind) {
        case Kind::Singleton:
            c.vertices = {n->point};
            c.ball_center = zeros(n->dim);
            return c;
        case Kind::Ball:
            c.vertices = {zeros(n->dim)};
            c.ball_center = n->point;
            c.ball_radius = n->radius;
            return c;
        case Kind::Polytope:
            c.vertices = n->vertices;
            c.ball_center = zeros(n->dim);
            return c;
        case Kind::Scaled: {
            ConvexSet::Canonical in = canonical_rec(n->inner.get());
            for (auto& v : in.vertices) v = n->factor * v;
            in.ball_center = n->factor * in.ball_center;
            in.ball_radius *= n->factor;
            return in;
        }
        case Kind::MinkowskiSum: {
            ConvexSet::Canonical a = canonical_rec(n->left.get());
            ConvexSet::Canonical b = canonical_rec(n->right.get());
            c.ball_center = a.ball_center + b.ball_center;
            c.ball_radius = a.ball_radius + b.ball_radius;
            if (a.vertices.size() * b.vertices.size() > kMaxCanonicalVertices)
                throw ValidationError("minkowski_sum: vertex product exceeds canonicalization cap");
            if (a.vertices.size() == 1) {
                c.vertices = std::move(b.vertices);
                for (auto& v : c.vertices) v += a.vertices.front();
            } else if (b.vertices.size() == 1) {
                c.vertices = std::move(a.vertices);
                for (auto& v : c.vertices) v += b.vertices.front();
            } else {
                c.vertices.reserve(a.vertices.size() * b.vertices.size());
                for (const auto& va : a.vertices)
                    for (const auto& vb : b.vertices) c.vertices.push_back(va + vb);
            }
            return c;
        }
    }
    throw ValidationError("canonical: unknown variant");
}

// Euclidean projection of w onto the probability simplex (Held et al.).
void project_simplex(std::vector<double>& w) {
    std::vector<double> u = w;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            theta = t;
            k = i + 1;
        }
    }
    if (k == 0) theta = (css - 1.0) / static_cast<double>(u.size());
    for (auto& e : w) e = std::max(0.0, e - theta);
}

// min_{lambda in simplex} 0.5 || V lambda - y ||^2 via FISTA with adaptive
// restart; the Frank-Wolfe gap certifies optimality. Returns V lambda*.
Vec project_hull(const std::vector<Vec>& verts, const Vec& y) {
    const std::size_t m = verts.size();
    const std::size_t d = y.size();

    if (m == 1) return verts.front();
    if (d == 1) {
        double lo = verts.front()[0], hi = lo;
        for (const auto& v : verts) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        return {std::clamp(y[0], lo, hi)};
    }
    if (m == 2) {
        const Vec e = verts[1] - verts[0];
        const double ee = dot(e, e);
        if (ee == 0.0) return verts[0];
        const double t = std::clamp(dot(y - verts[0], e) / ee, 0.0, 1.0);
        return verts[0] + t * e;
    }

    // Lipschitz constant of the gradient: ||V||_2^2 <= ||V||_F^2.
    double lip = 0.0;
    for (const auto& v : verts) lip += dot(v, v);
    lip = std::max(lip, 1e-12);

    auto image = [&](const std::vector<double>& lam) {
        Vec z = zeros(d);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < d; ++i) z[i] += lam[j] * verts[j][i];
        return z;
    };

    std::vector<double> lam(m, 1.0 / static_cast<double>(m));
    std::vector<double> prev = lam, look = lam;
    std::vector<double> grad(m);
    double t_mom = 1.0;
    double f_prev = std::numeric_limits<double>::infinity();

    double vmax = 0.0;
    for (const auto& v : verts) vmax = std::max(vmax, dot(v, v));
    const double scale = std::max(1.0, dot(y, y) + vmax);
    const double gap_tol = 1e-15 * scale;
    const double gap_accept = 1e-8 * scale;
    const std::size_t max_iters = 10000;

    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < max_iters; ++it) {
        // FISTA step from the extrapolated point
        const Vec z_look = image(look);
        for (std::size_t j = 0; j < m; ++j) grad[j] = dot(verts[j], z_look - y);
        prev = lam;
        lam = look;
        for (std::size_t j = 0; j < m; ++j) lam[j] -= grad[j] / lip;
        project_simplex(lam);

        // Frank-Wolfe certificate at the feasible iterate
        const Vec z = image(lam);
        for (std::size_t j = 0; j < m; ++j) grad[j] = dot(verts[j], z - y);
        double gmin = grad[0], glam = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            gmin = std::min(gmin, grad[j]);
            glam += grad[j] * lam[j];
        }
        gap = glam - gmin;
        if (gap <= gap_tol) return z;

        const double f = 0.5 * dot(z - y, z - y);
        if (f > f_prev) {
            // restart the momentum when the objective increases
            t_mom = 1.0;
            look = lam;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
            const double beta = (t_mom - 1.0) / t_next;
            for (std::size_t j = 0; j < m; ++j) look[j] = lam[j] + beta * (lam[j] - prev[j]);
            t_mom = t_next;
        }
        f_prev = f;
    }

    if (gap > gap_accept)
        throw NumericalError("project: polytope projection did not converge", gap);
    return image(lam);
}

}  // namespace

double ConvexSet::support(const Vec& u) const {
    require_dim(u, dim(), "support");
    return support_rec(node_.get(), u);
}

Vec ConvexSet::support_point(const Vec& u) const {
    require_dim(u, dim(), "support_point");
    return support_point_rec(node_.get(), u);
}

Vec ConvexSet::centroid() const { return centroid_rec(node_.get()); }

ConvexSet::Canonical ConvexSet::canonical() const { return canonical_rec(node_.get()); }

std::optional<Vec> ConvexSet::as_singleton() const {
    Canonical c = canonical();
    if (c.ball_radius == 0.0 && c.vertices.size() == 1) return c.vertices.front() + c.ball_center;
    return std::nullopt;
}

Vec ConvexSet::project(const Vec& y) const {
    require_dim(y, dim(), "project");
    Canonical c = canonical();
    const Vec target = y - c.ball_center;
    const Vec p = project_hull(c.vertices, target);
    const Vec gap = target - p;
    const double g = norm(gap);
    if (g <= c.ball_radius) return y;  // inside the rounded hull
    return p + (c.ball_radius / g) * gap + c.ball_center;
}

double ConvexSet::distance(const Vec& y) const { return norm(y - project(y)); }

double ConvexSet::sup_norm() const {
    Canonical c = canonical();
    double best = 0.0;
    for (const auto& v : c.vertices) best = std::max(best, norm(v + c.ball_center));
    return best + c.ball_radius;
}

ConvexSet minkowski_ball(const ConvexSet& s, double r) {
    if (r < 0.0) throw ValidationError("minkowski_ball: negative radius");
    return ConvexSet::minkowski_sum(s, ConvexSet::ball(zeros(s.dim()), r));
}

double hausdorff(const ConvexSet& s1, const ConvexSet& s2, const std::vector<Vec>& directions) {
    if (s1.dim() != s2.dim()) throw ValidationError("hausdorff: dimension mismatch");
    if (directions.empty()) throw ValidationError("hausdorff: empty direction list");
    double best = 0.0;
    for (const auto& u : directions)
        best = std::max(best, std::abs(s1.support(u) - s2.support(u)));
    return best;
}

std::vector<Vec> sphere_directions(std::size_t dim, std::size_t count) {
    if (dim == 0) throw ValidationError("sphere_directions: dim must be positive");
    if (count == 0) throw ValidationError("sphere_directions: count must be positive");
    std::vector<Vec> dirs;
    if (dim == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
        return dirs;
    }
    dirs.reserve(count);
    if (dim == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    if (dim == 3) {
        // Fibonacci sphere
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = ga * static_cast<double>(k);
            dirs.push_back({r * std::cos(th), r * std::sin(th), z});
        }
        return dirs;
    }
    // Higher dimensions: fixed-seed normalized Gaussians, reproducible.
    std::mt19937_64 eng(0x5EEDDA7A5EEDDA7Aull);
    auto g01 = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    while (dirs.size() < count) {
        Vec x(dim);
        double s = 0.0;
        for (auto& e : x) {
            double u1 = g01(), u2 = g01();
            while (u1 <= 0.0) u1 = g01();
            e = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            s += e * e;
        }
        if (s > 1e-12) dirs.push_back((1.0 / std::sqrt(s)) * x);
    }
    return dirs;
}

}  // namespace srilab
