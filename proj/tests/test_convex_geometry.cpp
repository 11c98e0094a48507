#include <doctest.h>

#include <cmath>

#include "srilab/convex_set.hpp"
#include "srilab/errors.hpp"
#include "srilab/rng.hpp"

using namespace srilab;

namespace {

// Independent oracle: projection onto a segment by dense parameter search
// with local refinement.
Vec segment_projection_oracle(const Vec& a, const Vec& b, const Vec& y) {
    double best_t = 0.0, best = norm(a - y);
    for (int refine = 0; refine < 4; ++refine) {
        const double width = std::pow(10.0, -2.0 * refine);
        const double lo = std::max(0.0, best_t - width), hi = std::min(1.0, best_t + width);
        for (int i = 0; i <= 1000; ++i) {
            const double t = lo + (hi - lo) * i / 1000.0;
            const Vec p = a + t * (b - a);
            const double d = norm(p - y);
            if (d < best) {
                best = d;
                best_t = t;
            }
        }
    }
    return a + best_t * (b - a);
}

ConvexSet random_set(RngStream& rng, std::size_t dim, int depth) {
    const double pick = rng.uniform01();
    if (depth == 0 || pick < 0.3) {
        if (pick < 0.15) return ConvexSet::singleton(rng.ball_point(dim, 3.0));
        return ConvexSet::ball(rng.ball_point(dim, 3.0), rng.uniform(0.0, 2.0));
    }
    if (pick < 0.55) {
        std::vector<Vec> verts;
        const int count = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        for (int i = 0; i < count; ++i) verts.push_back(rng.ball_point(dim, 3.0));
        return ConvexSet::polytope(std::move(verts));
    }
    if (pick < 0.8)
        return ConvexSet::minkowski_sum(random_set(rng, dim, depth - 1),
                                        random_set(rng, dim, depth - 1));
    return ConvexSet::scaled(random_set(rng, dim, depth - 1), rng.uniform(0.1, 3.0));
}

}  // namespace

TEST_CASE("support function closed forms") {
    const ConvexSet ball = ConvexSet::ball({1.0, 0.0}, 2.0);
    CHECK(ball.support({0.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));

    const ConvexSet point = ConvexSet::singleton({3.0, 4.0});
    CHECK(point.support({1.0, 0.0}) == doctest::Approx(3.0).epsilon(1e-15));

    const std::vector<Vec> tri{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    const ConvexSet poly = ConvexSet::polytope(tri);
    double oracle = -1e300;
    for (const auto& v : tri) oracle = std::max(oracle, v[0] + v[1]);
    CHECK(oracle == 1.0);
    CHECK(poly.support({1.0, 1.0}) == doctest::Approx(oracle).epsilon(1e-15));
}

TEST_CASE("support dimension mismatch is a usage error") {
    const ConvexSet ball = ConvexSet::ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS((void)ball.support({1.0}), ValidationError);
    CHECK_THROWS_AS((void)ball.project({1.0, 2.0, 3.0}), ValidationError);
}

TEST_CASE("projection closed forms and the segment oracle") {
    const ConvexSet ball = ConvexSet::ball({3.0, 4.0}, 1.0);
    const Vec p = ball.project({0.0, 0.0});
    CHECK(p[0] == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(3.2).epsilon(1e-12));

    const ConvexSet point = ConvexSet::singleton({1.0, 1.0});
    const Vec q = point.project({5.0, 5.0});
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 1.0);

    const Vec a{1.0, 0.0}, b{2.0, 0.0}, y{0.0, 0.0};
    const Vec oracle = segment_projection_oracle(a, b, y);
    CHECK(oracle[0] == doctest::Approx(1.0).epsilon(1e-6));
    const ConvexSet seg = ConvexSet::polytope({a, b});
    const Vec got = seg.project(y);
    CHECK(norm(got - oracle) <= 1e-6);
    CHECK(got[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(got[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection onto a triangle matches a dense-grid oracle") {
    const std::vector<Vec> tri{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}};
    const ConvexSet poly = ConvexSet::polytope(tri);
    RngStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec y = rng.ball_point(2, 4.0);
        // brute force over barycentric samples
        double best = 1e300;
        Vec best_p;
        const int grid = 300;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j + i <= grid; ++j) {
                const double l1 = static_cast<double>(i) / grid;
                const double l2 = static_cast<double>(j) / grid;
                const double l0 = 1.0 - l1 - l2;
                const Vec p = l0 * tri[0] + l1 * tri[1] + l2 * tri[2];
                const double d = norm(p - y);
                if (d < best) {
                    best = d;
                    best_p = p;
                }
            }
        }
        const Vec got = poly.project(y);
        CHECK(norm(got - best_p) <= 2e-2);          // oracle grid resolution
        CHECK(norm(got - y) <= best + 1e-9);        // never worse than the oracle
        CHECK(poly.distance(got) <= 1e-8);          // feasible
    }
}

TEST_CASE("distance examples") {
    CHECK(ConvexSet::ball({0.0, 0.0}, 1.0).distance({0.0, 0.0}) == 0.0);
    CHECK(ConvexSet::ball({0.0, 0.0}, 1.0).distance({2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));

    const ConvexSet seg = ConvexSet::polytope({{0.0, 0.0}, {0.0, 1.0}});
    const Vec oracle = segment_projection_oracle({0.0, 0.0}, {0.0, 1.0}, {0.0, 3.0});
    CHECK(norm(Vec{0.0, 3.0} - oracle) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(seg.distance({0.0, 3.0}) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("hausdorff over sampled directions") {
    const auto dirs = sphere_directions(2, 128);
    const ConvexSet b1 = ConvexSet::ball({0.0, 0.0}, 1.0);
    CHECK(hausdorff(b1, b1, dirs) == 0.0);

    const ConvexSet b2 = ConvexSet::ball({0.0, 0.0}, 1.5);
    CHECK(hausdorff(b1, b2, dirs) == doctest::Approx(0.5).epsilon(1e-12));

    const std::vector<Vec> axes{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    const ConvexSet s1 = ConvexSet::singleton({1.0, 0.0});
    const ConvexSet s0 = ConvexSet::singleton({0.0, 0.0});
    double oracle = 0.0;
    for (const auto& u : axes) oracle = std::max(oracle, std::abs(u[0]));
    CHECK(oracle == 1.0);
    CHECK(hausdorff(s1, s0, axes) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS((void)hausdorff(b1, b2, {}), ValidationError);
}

TEST_CASE("minkowski_ball support arithmetic") {
    const ConvexSet grown = minkowski_ball(ConvexSet::singleton({1.0, 1.0}), 0.5);
    CHECK(grown.support({1.0, 0.0}) == doctest::Approx(1.5).epsilon(1e-15));

    const auto dirs = sphere_directions(2, 64);
    const ConvexSet base = ConvexSet::ball({0.3, -0.2}, 0.7);
    CHECK(hausdorff(base, minkowski_ball(base, 0.0), dirs) == 0.0);

    const ConvexSet wide = minkowski_ball(ConvexSet::ball({0.0, 0.0}, 1.0), 1.0);
    CHECK(wide.support({1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS((void)minkowski_ball(base, -0.1), ValidationError);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS((void)ConvexSet::ball({0.0}, -1.0), ValidationError);
    CHECK_THROWS_AS((void)ConvexSet::polytope({}), ValidationError);
    CHECK_THROWS_AS((void)ConvexSet::polytope({{1.0, 0.0}, {1.0}}), ValidationError);
    CHECK_THROWS_AS((void)ConvexSet::scaled(ConvexSet::singleton({1.0}), 0.0), ValidationError);
    CHECK_THROWS_AS(
        (void)ConvexSet::minkowski_sum(ConvexSet::singleton({1.0}), ConvexSet::singleton({1.0, 2.0})),
        ValidationError);
}

TEST_CASE("support function is positively homogeneous and subadditive") {
    RngStream rng(42);
    for (std::size_t dim : {1u, 2u, 3u}) {
        for (int trial = 0; trial < 40; ++trial) {
            const ConvexSet s = random_set(rng, dim, 2);
            const Vec u = rng.gaussian_vector(dim);
            const Vec v = rng.gaussian_vector(dim);
            const double lambda = rng.uniform(0.0, 5.0);
            const double su = s.support(u);
            CHECK(s.support(lambda * u) ==
                  doctest::Approx(lambda * su).epsilon(1e-12).scale(std::abs(su) + 1.0));
            CHECK(s.support(u + v) <= s.support(u) + s.support(v) + 1e-12 * (1.0 + std::abs(su)));
        }
    }
}

TEST_CASE("projections land inside the set") {
    RngStream rng(7);
    for (std::size_t dim : {1u, 2u, 3u}) {
        for (int trial = 0; trial < 30; ++trial) {
            const ConvexSet s = random_set(rng, dim, 2);
            const Vec y = rng.ball_point(dim, 6.0);
            const Vec p = s.project(y);
            CHECK(s.distance(p) <= 1e-8);
        }
    }
}

TEST_CASE("interior points have distance zero") {
    RngStream rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 1 + trial % 3;
        const ConvexSet s = random_set(rng, dim, 2);
        // random convex combination of extreme points
        Vec y = zeros(dim);
        double total = 0.0;
        const int terms = 3;
        std::vector<Vec> pts;
        std::vector<double> ws;
        for (int i = 0; i < terms; ++i) {
            pts.push_back(s.support_point(rng.unit_vector(dim)));
            ws.push_back(rng.uniform(0.0, 1.0) + 1e-3);
            total += ws.back();
        }
        for (int i = 0; i < terms; ++i) y += (ws[i] / total) * pts[i];
        CHECK(s.distance(y) <= 1e-8);
    }
}

TEST_CASE("hausdorff of a set with itself vanishes for every variant") {
    RngStream rng(33);
    for (std::size_t dim : {1u, 2u, 3u}) {
        const auto dirs = sphere_directions(dim, default_direction_count(dim));
        for (int trial = 0; trial < 20; ++trial) {
            const ConvexSet s = random_set(rng, dim, 2);
            CHECK(hausdorff(s, s, dirs) == 0.0);
        }
    }
}

TEST_CASE("sphere directions are unit and deterministic") {
    const auto d1 = sphere_directions(1, 64);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0][0] == 1.0);
    CHECK(d1[1][0] == -1.0);

    for (std::size_t dim : {2u, 3u, 5u}) {
        const auto dirs = sphere_directions(dim, 64 * dim);
        CHECK(dirs.size() == 64 * dim);
        for (const auto& u : dirs) CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
        const auto again = sphere_directions(dim, 64 * dim);
        CHECK(dirs[5] == again[5]);
    }
}

TEST_CASE("sup_norm is exact through the canonical form") {
    CHECK(ConvexSet::singleton({3.0, 4.0}).sup_norm() == doctest::Approx(5.0));
    CHECK(ConvexSet::ball({3.0, 4.0}, 2.0).sup_norm() == doctest::Approx(7.0));
    const ConvexSet sum =
        ConvexSet::minkowski_sum(ConvexSet::singleton({1.0, 0.0}), ConvexSet::ball({0.0, 0.0}, 0.5));
    CHECK(sum.sup_norm() == doctest::Approx(1.5));
    const ConvexSet sc = ConvexSet::scaled(ConvexSet::ball({0.0, 1.0}, 1.0), 2.0);
    CHECK(sc.sup_norm() == doctest::Approx(4.0));
}
