#include <doctest.h>

#include <cmath>

#include "srilab/bm_diagnostic.hpp"
#include "srilab/errors.hpp"
#include "srilab/scaling.hpp"

using namespace srilab;

namespace {

MarchaudMap scalar_map(double slope) {
    return MarchaudMap::from_spec(MapSpec::affine(Mat{1, 1, {slope}}, {0.0}));
}

Trajectory quiet_run(const MarchaudMap& map, const StepSchedule& sched, double x0, std::size_t N,
                     std::uint64_t seed = 1) {
    RngStream rng(seed);
    return iterate(map, sched, NoiseModel::gaussian(1, 0.0), SelectionPolicy::minimal_norm(), {x0},
                   N, rng);
}

}  // namespace

TEST_CASE("anchors on harmonic partial sums") {
    // t(n): 1, 3/2, 11/6, 25/12, ...
    const Trajectory traj = quiet_run(scalar_map(-0.1), StepSchedule::harmonic(1.0), 1.0, 12);
    const AnchorSeq anchors = compute_anchors(traj, 2.0);
    REQUIRE(anchors.count() >= 2);
    CHECK(anchors.T_n[0] == 0.0);
    CHECK(anchors.m[1] == 4);
    CHECK(anchors.T_n[1] == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK_FALSE(anchors.degenerate);
}

TEST_CASE("anchors on a constant grid hit exact multiples") {
    const Trajectory traj =
        quiet_run(scalar_map(-0.1), StepSchedule::custom(std::vector<double>(40, 0.5)), 1.0, 40);
    const AnchorSeq anchors = compute_anchors(traj, 2.0);
    REQUIRE(anchors.count() >= 5);
    for (std::size_t n = 0; n < anchors.count(); ++n) {
        CHECK(anchors.T_n[n] == doctest::Approx(2.0 * n).epsilon(1e-15));
        CHECK(anchors.m[n] == 4 * n);
    }
}

TEST_CASE("horizon shorter than the window degenerates to one anchor") {
    const Trajectory traj = quiet_run(scalar_map(-0.1), StepSchedule::harmonic(1.0), 1.0, 3);
    const AnchorSeq anchors = compute_anchors(traj, 50.0);
    CHECK(anchors.count() == 1);
    CHECK(anchors.degenerate);
    CHECK_THROWS_AS((void)compute_anchors(traj, 0.0), ValidationError);
}

TEST_CASE("rescaling clamps at one and normalizes window starts") {
    SUBCASE("norm below one leaves the window unscaled") {
        const Trajectory traj = quiet_run(scalar_map(-0.1), StepSchedule::harmonic(0.5), 0.5, 50);
        const AnchorSeq anchors = compute_anchors(traj, 1.0);
        const Rescaling rs = rescale(traj, anchors);
        CHECK(rs.r[0] == 1.0);
        CHECK(xhat(traj, rs, 0) == traj.x[0]);
    }

    SUBCASE("norm three rescales the start onto the unit sphere") {
        const Trajectory traj = quiet_run(scalar_map(-0.1), StepSchedule::harmonic(0.5), 3.0, 50);
        const AnchorSeq anchors = compute_anchors(traj, 1.0);
        const Rescaling rs = rescale(traj, anchors);
        CHECK(rs.r[0] == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(norm(xhat(traj, rs, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("rescaled selections satisfy the scaled-map membership") {
    // hand-built window: h(x) = x, one unit step from 3 to 6
    Trajectory traj;
    traj.dim = 1;
    traj.x = {{3.0}, {6.0}};
    traj.y = {{3.0}};
    traj.M = {{0.0}};
    traj.a = {1.0};
    traj.t = {0.0, 1.0};
    const AnchorSeq anchors = compute_anchors(traj, 1.0);
    const Rescaling rs = rescale(traj, anchors);
    REQUIRE(rs.windows() == 2);
    CHECK(rs.r[0] == doctest::Approx(3.0));
    CHECK(xhat(traj, rs, 0)[0] == doctest::Approx(1.0));
    CHECK(rs.xhat_end[0][0] == doctest::Approx(2.0));

    const MarchaudMap base = scalar_map(1.0);
    const MarchaudMap h3 = scaled_map(base, rs.r[0]);
    CHECK(h3.evaluate(xhat(traj, rs, 0)).distance(yhat(traj, rs, 0)) <= 1e-12);
}

TEST_CASE("martingale partial sums") {
    SUBCASE("zero noise gives identically zero sums") {
        const Trajectory traj = quiet_run(scalar_map(-0.5), StepSchedule::harmonic(1.0), 2.0, 100);
        const Rescaling rs = rescale(traj, compute_anchors(traj, 1.5));
        const MartingaleStats stats = martingale_partial_sums(traj, rs);
        CHECK(stats.cauchy_stat == 0.0);
        CHECK(stats.m_omega == 0.0);
        for (const auto& z : stats.zeta) CHECK(norm(z) == 0.0);
    }

    SUBCASE("single step is a(0) times the rescaled noise") {
        Trajectory traj;
        traj.dim = 1;
        traj.x = {{0.5}, {1.3}};
        traj.y = {{0.0}};
        traj.M = {{0.8}};
        traj.a = {1.0};
        traj.t = {0.0, 1.0};
        const Rescaling rs = rescale(traj, compute_anchors(traj, 2.0));
        const MartingaleStats stats = martingale_partial_sums(traj, rs);
        REQUIRE(stats.zeta.size() == 2);
        CHECK(stats.zeta[1][0] == doctest::Approx(0.8).epsilon(1e-15));  // r(0) = 1
    }

    SUBCASE("long bounded-noise run has a tiny Cauchy tail") {
        const MarchaudMap map = MarchaudMap::from_spec(
            MapSpec::drift_with_ball(MapSpec::affine(Mat{1, 1, {-1.0}}, {0.0}), 0.1));
        RngStream rng(9);
        const Trajectory traj =
            iterate(map, StepSchedule::harmonic(1.0), NoiseModel::bounded_iid(1, 1.0),
                    SelectionPolicy::minimal_norm(), {5.0}, 100000, rng);
        const Rescaling rs = rescale(traj, compute_anchors(traj, 2.0));
        const MartingaleStats stats = martingale_partial_sums(traj, rs);
        CHECK(stats.cauchy_stat <= 0.1);
        CHECK(stats.cauchy_stat <= zeta_cauchy_oracle(traj, rs, 1.0 / 3.0));
        CHECK(stats.m_omega > 0.0);
    }
}

TEST_CASE("contraction ratios through the window sequence") {
    SUBCASE("linear decay contracts every tested window") {
        const auto sched = StepSchedule::custom(std::vector<double>(2000, 0.01));
        const Trajectory traj = quiet_run(scalar_map(-1.0), sched, 10.0, 2000);
        const double T = std::log(2.0) + 1.0;
        const Rescaling rs = rescale(traj, compute_anchors(traj, T));
        const ContractionData data =
            contraction_report(traj, rs, {0.1, 0.4, 0.65, 0.9});
        REQUIRE(data.tested_count >= 1);
        CHECK(data.all_tested_pass);
        for (std::size_t n = 0; n < data.ratios.size(); ++n) {
            if (data.tested[n]) CHECK(data.ratios[n] <= std::exp(-T) + 0.05);
        }
    }

    SUBCASE("ratios fall as the window start norm falls, down to the r floor") {
        const auto sched = StepSchedule::custom(std::vector<double>(3000, 0.01));
        const Trajectory traj = quiet_run(scalar_map(-1.0), sched, 50.0, 3000);
        const Rescaling rs = rescale(traj, compute_anchors(traj, 2.0));
        const ContractionData data = contraction_report(traj, rs, {0.1, 0.4, 0.65, 0.9});
        for (std::size_t n = 1; n < data.ratios.size(); ++n) {
            if (data.tested[n] && data.tested[n - 1])
                CHECK(data.ratios[n] <= data.ratios[n - 1] + 1e-9);
        }
    }

    SUBCASE("repeller fails every window with a big start") {
        const Trajectory traj = quiet_run(scalar_map(1.0), StepSchedule::harmonic(1.0), 1.0, 10000);
        const Rescaling rs = rescale(traj, compute_anchors(traj, 2.0));
        const ContractionData data = contraction_report(traj, rs, {0.1, 0.4, 0.65, 0.9});
        for (double ratio : data.ratios) CHECK(ratio > 1.0);
    }

    SUBCASE("windows at the floor are exempt") {
        const Trajectory traj = quiet_run(scalar_map(-0.5), StepSchedule::harmonic(1.0), 0.5, 2000);
        const Rescaling rs = rescale(traj, compute_anchors(traj, 2.0));
        const ContractionData data =
            contraction_report(traj, rs, {0.1, 0.4, 0.65, 0.9}, 1.0);
        for (std::size_t n = 0; n < data.ratios.size(); ++n) CHECK_FALSE(data.tested[n]);
    }
}

TEST_CASE("full diagnostic pipeline") {
    SUBCASE("contracting drift scenario yields stable evidence") {
        const MarchaudMap map = MarchaudMap::from_spec(
            MapSpec::drift_with_ball(MapSpec::affine(Mat{1, 1, {-1.0}}, {0.0}), 0.1));
        RngStream rng(11);
        const Trajectory traj =
            iterate(map, StepSchedule::harmonic(1.0), NoiseModel::bounded_iid(1, 1.0),
                    SelectionPolicy::minimal_norm(), {5.0}, 100000, rng);
        const RescalingReport report = run_diagnostic(traj, map, {});
        CHECK(report.verdict == StabilityVerdict::StableEvidence);
        CHECK(report.T_auto);
        CHECK(report.T == doctest::Approx(std::log(4.0) + 1.0).epsilon(0.05));
        CHECK(check_rescaling_invariants(traj, map, report).empty());
    }

    SUBCASE("repeller yields unstable evidence and clean invariants") {
        const MarchaudMap map = scalar_map(1.0);
        RngStream rng(12);
        const Trajectory traj =
            iterate(map, StepSchedule::harmonic(1.0), NoiseModel::bounded_iid(1, 1.0),
                    SelectionPolicy::minimal_norm(), {1.0}, 10000, rng);
        const RescalingReport report = run_diagnostic(traj, map, {});
        CHECK(report.verdict == StabilityVerdict::UnstableEvidence);
        CHECK(report.sup_r > report.thresholds.divergence_r);
        // auto-T probe rejects the origin candidate for the repeller
        REQUIRE_FALSE(report.warnings.empty());
        CHECK(report.T == 2.0);
        CHECK(check_rescaling_invariants(traj, map, report).empty());
    }

    SUBCASE("too short a horizon is inconclusive") {
        const MarchaudMap map = scalar_map(-1.0);
        RngStream rng(13);
        const Trajectory traj =
            iterate(map, StepSchedule::harmonic(1.0), NoiseModel::gaussian(1, 0.0),
                    SelectionPolicy::minimal_norm(), {1.0}, 3, rng);
        DiagnosticOptions opts;
        opts.T_override = 50.0;
        const RescalingReport report = run_diagnostic(traj, map, opts);
        CHECK(report.verdict == StabilityVerdict::Inconclusive);
    }
}

TEST_CASE("sample-path envelope constant") {
    // (1 + M + (T+1) K) e^{K (T+1)} at M = 1, T = 2, K = 1
    CHECK((1.0 + 1.0 + 3.0) * std::exp(3.0) == doctest::Approx(100.4276846).epsilon(1e-9));

    // with zero noise the measured M_omega vanishes and the report constant
    // reduces to the closed form in T and K
    const MarchaudMap map = scalar_map(-1.0);
    const Trajectory traj = quiet_run(map, StepSchedule::harmonic(1.0), 2.0, 5000);
    DiagnosticOptions opts;
    opts.T_override = 2.0;
    const RescalingReport report = run_diagnostic(traj, map, opts);
    CHECK(report.zeta.m_omega == 0.0);
    const double expected = (1.0 + 3.0 * map.bound_K()) * std::exp(3.0 * map.bound_K());
    CHECK(report.K_omega == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("anchor spacing stays within one step of the window length") {
    const MarchaudMap map = scalar_map(-0.3);
    RngStream rng(14);
    const Trajectory traj = iterate(map, StepSchedule::power(1.0, 0.7), NoiseModel::gaussian(1, 0.0),
                                    SelectionPolicy::minimal_norm(), {2.0}, 20000, rng);
    DiagnosticOptions opts;
    opts.T_override = 1.7;
    const RescalingReport report = run_diagnostic(traj, map, opts);
    for (std::size_t n = 0; n + 1 < report.anchors.count(); ++n) {
        const double gap = report.anchors.T_n[n + 1] - report.anchors.T_n[n];
        CHECK(gap >= 1.7 - 1e-12);
        CHECK(gap <= 2.7 + 1e-12);
    }
}
