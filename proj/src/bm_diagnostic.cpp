#include "srilab/bm_diagnostic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srilab/errors.hpp"
#include "srilab/scaling.hpp"

namespace srilab {

AnchorSeq compute_anchors(const Trajectory& traj, double T) {
    if (!(T > 0.0)) throw ValidationError("compute_anchors: T must be positive");
    if (traj.t.empty()) throw ValidationError("compute_anchors: empty trajectory");
    AnchorSeq seq;
    seq.T = T;
    seq.m.push_back(0);
    seq.T_n.push_back(0.0);
    double next = T;
    std::size_t k = 1;
    while (k < traj.t.size()) {
        if (traj.t[k] >= next) {
            seq.m.push_back(k);
            seq.T_n.push_back(traj.t[k]);
            next = traj.t[k] + T;
        }
        ++k;
    }
    seq.degenerate = seq.m.size() < 2;
    return seq;
}

std::size_t Rescaling::window_of_step(std::size_t k) const {
    // window n covers steps [window_start[n], window_start[n+1])
    auto it = std::upper_bound(window_start.begin(), window_start.end(), k);
    return static_cast<std::size_t>(it - window_start.begin()) - 1;
}

double Rescaling::sup_r() const {
    double s = 0.0;
    for (double v : r) s = std::max(s, v);
    return s;
}

Rescaling rescale(const Trajectory& traj, const AnchorSeq& anchors, double radius_a) {
    if (!(radius_a > 0.0)) throw ValidationError("rescale: radius_a must be positive");
    if (anchors.m.empty() || anchors.m.front() != 0)
        throw ValidationError("rescale: anchors must start at the first iterate");
    Rescaling rs;
    rs.radius_a = radius_a;
    const std::size_t q = anchors.m.size();
    rs.r.reserve(q);
    rs.window_start = anchors.m;
    for (std::size_t n = 0; n < q; ++n)
        rs.r.push_back(std::max(1.0, norm(traj.x[anchors.m[n]]) / radius_a));
    rs.xhat_end.reserve(q - 1);
    for (std::size_t n = 0; n + 1 < q; ++n)
        rs.xhat_end.push_back((1.0 / rs.r[n]) * traj.x[anchors.m[n + 1]]);
    return rs;
}

Vec xhat(const Trajectory& traj, const Rescaling& rs, std::size_t k) {
    return (1.0 / rs.r[rs.window_of_step(k)]) * traj.x[k];
}

Vec yhat(const Trajectory& traj, const Rescaling& rs, std::size_t k) {
    return (1.0 / rs.r[rs.window_of_step(k)]) * traj.y[k];
}

Vec mhat(const Trajectory& traj, const Rescaling& rs, std::size_t k) {
    return (1.0 / rs.r[rs.window_of_step(k)]) * traj.M[k];
}

MartingaleStats martingale_partial_sums(const Trajectory& traj, const Rescaling& rs) {
    MartingaleStats stats;
    const std::size_t N = traj.steps();
    stats.zeta.reserve(N + 1);
    stats.zeta.push_back(zeros(traj.dim));
    Vec acc = zeros(traj.dim);
    for (std::size_t k = 0; k < N; ++k) {
        acc += traj.a[k] * mhat(traj, rs, k);
        stats.zeta.push_back(acc);
    }

    // Cauchy statistic over the last quarter: bounding-box diagonal, an upper
    // bound on the largest pairwise gap.
    const std::size_t q0 = (3 * N) / 4;
    Vec lo = stats.zeta[q0], hi = stats.zeta[q0];
    for (std::size_t n = q0; n <= N; ++n) {
        for (std::size_t i = 0; i < traj.dim; ++i) {
            lo[i] = std::min(lo[i], stats.zeta[n][i]);
            hi[i] = std::max(hi[i], stats.zeta[n][i]);
        }
    }
    stats.cauchy_stat = norm(hi - lo);

    // Within-window increment extremes.
    for (std::size_t n = 0; n < rs.windows(); ++n) {
        const std::size_t k0 = rs.window_start[n];
        const std::size_t k1 = n + 1 < rs.windows() ? rs.window_start[n + 1] : N;
        const Vec& base = stats.zeta[k0];
        double prev = 0.0;
        for (std::size_t k = k0; k < k1; ++k) {
            const double cur = norm(stats.zeta[k + 1] - base);
            stats.m_omega = std::max(stats.m_omega, cur);
            stats.aux_gap = std::max(stats.aux_gap, prev + norm(stats.zeta[k + 1] - stats.zeta[k]));
            prev = cur;
        }
    }
    return stats;
}

double zeta_cauchy_oracle(const Trajectory& traj, const Rescaling& rs, double noise_K) {
    const std::size_t N = traj.steps();
    const std::size_t q0 = (3 * N) / 4;
    double tail = 0.0;
    for (std::size_t k = q0; k < N; ++k) {
        const Vec xh = xhat(traj, rs, k);
        tail += traj.a[k] * traj.a[k] * noise_K * (1.0 + dot(xh, xh));
    }
    // Doob L2 with generous slack, doubled because the statistic is a
    // diameter rather than a deviation from one endpoint.
    return 12.0 * std::sqrt(tail) + 1e-12;
}

ContractionData contraction_report(const Trajectory& traj, const Rescaling& rs,
                                   const std::array<double, 4>& deltas, std::optional<double> R0) {
    ContractionData data;
    const double delta4 = deltas[3];
    const std::size_t full = rs.windows() == 0 ? 0 : rs.windows() - 1;
    data.ratios.reserve(full);
    for (std::size_t n = 0; n < full; ++n) {
        const double start = norm(traj.x[rs.window_start[n]]);
        const double end = norm(traj.x[rs.window_start[n + 1]]);
        data.ratios.push_back(start > 0.0 ? end / start
                                          : std::numeric_limits<double>::infinity());
    }

    auto all_pass_above = [&](double threshold) {
        for (std::size_t n = 0; n < full; ++n)
            if (rs.r[n] > threshold * (1.0 + 1e-12) && !(data.ratios[n] < delta4)) return false;
        return true;
    };

    if (R0) {
        data.R0_estimate = *R0;
    } else {
        std::vector<double> candidates{1.0};
        for (std::size_t n = 0; n < full; ++n) candidates.push_back(rs.r[n]);
        std::sort(candidates.begin(), candidates.end());
        data.R0_estimate = std::numeric_limits<double>::infinity();
        for (double cand : candidates) {
            if (all_pass_above(cand)) {
                data.R0_estimate = cand;
                break;
            }
        }
    }

    for (std::size_t n = 0; n < full; ++n) {
        const bool tested = rs.r[n] > data.R0_estimate * (1.0 + 1e-12);
        const bool pass = data.ratios[n] < delta4;
        data.tested.push_back(tested);
        data.passed.push_back(pass);
        if (tested) {
            ++data.tested_count;
            if (!pass) data.all_tested_pass = false;
        }
    }
    return data;
}

const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::StableEvidence: return "stable_evidence";
        case StabilityVerdict::UnstableEvidence: return "unstable_evidence";
        case StabilityVerdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

StabilityVerdict stability_verdict(const RescalingReport& report, std::string& rationale) {
    std::ostringstream why;
    const auto& c = report.contraction;
    if (report.overflow) {
        why << "overflow guard tripped: norm blow-up is divergence evidence";
        rationale = why.str();
        return StabilityVerdict::UnstableEvidence;
    }
    if (report.sup_r > report.thresholds.divergence_r) {
        why << "sup r(n) = " << report.sup_r << " exceeds the divergence threshold "
            << report.thresholds.divergence_r;
        rationale = why.str();
        return StabilityVerdict::UnstableEvidence;
    }
    if (report.anchors.count() < 2) {
        why << "horizon too short for a full window: no contraction evidence";
        rationale = why.str();
        return StabilityVerdict::Inconclusive;
    }
    const bool bounded = report.sup_r <= report.thresholds.stable_sup_r;
    if (bounded && c.all_tested_pass && c.tested_count >= 1) {
        why << "sup r(n) = " << report.sup_r << " within threshold; " << c.tested_count
            << " window(s) above R0 = " << c.R0_estimate << " all contracted below delta4 = "
            << report.deltas[3] << " (empirical evidence, not a proof)";
        rationale = why.str();
        return StabilityVerdict::StableEvidence;
    }
    if (bounded && c.tested_count == 0 && report.sup_r <= 1.0 + 1e-9) {
        why << "iterates never left the reference ball (sup r(n) = " << report.sup_r
            << "); contraction test vacuous (empirical evidence, not a proof)";
        rationale = why.str();
        return StabilityVerdict::StableEvidence;
    }
    if (!c.all_tested_pass) {
        why << "window(s) above R0 = " << c.R0_estimate
            << " failed the contraction test while sup r(n) = " << report.sup_r
            << " stayed below the divergence threshold";
    } else {
        why << "no contraction evidence available (sup r(n) = " << report.sup_r << ")";
    }
    rationale = why.str();
    return StabilityVerdict::Inconclusive;
}

namespace {

AttractorSpec resolve_candidate(const MarchaudMap& map, const DiagnosticOptions& options) {
    if (options.candidate) return *options.candidate;
    return AttractorSpec::with_default_chain(ConvexSet::singleton(zeros(map.dim())), 1.0);
}

}  // namespace

WindowChoice choose_window_length(const MarchaudMap& map, const DiagnosticOptions& options) {
    WindowChoice choice;
    if (options.T_override) {
        if (!(*options.T_override > 0.0))
            throw ValidationError("choose_window_length: T override must be positive");
        choice.T = *options.T_override;
        choice.auto_chosen = false;
        return choice;
    }
    const AttractorSpec candidate = resolve_candidate(map, options);
    constexpr double fallback = 2.0;
    if (!map.spec()) {
        choice.warnings.push_back("auto T: map has no serializable spec; fell back to T = 2");
        choice.T = fallback;
        return choice;
    }
    std::optional<MarchaudMap> limit;
    try {
        limit = closed_form_h_infinity(*map.spec());
    } catch (const ValidationError&) {
        choice.warnings.push_back("auto T: no closed-form scale limit; fell back to T = 2");
        choice.T = fallback;
        return choice;
    }

    const double eps = (candidate.deltas[1] - candidate.deltas[0]) * candidate.radius_a;
    RngStream probe_rng(0);  // auto-T is part of the scenario, not of the seed
    const auto grid = default_init_grid(map.dim(), candidate.radius_a, probe_rng);
    // closed-form limits are single-valued, so one policy covers the flow
    const std::vector<SelectionPolicy> policies =
        limit->single_valued()
            ? std::vector<SelectionPolicy>{SelectionPolicy::minimal_norm()}
            : std::vector<SelectionPolicy>{SelectionPolicy::minimal_norm(),
                                           SelectionPolicy::centroid(),
                                           SelectionPolicy::random_extreme()};
    const ProbeResult probe = probe_attractor(*limit, candidate, eps, grid, policies, probe_rng,
                                              options.probe_horizon, options.probe_dt);
    if (!probe.attracting) {
        choice.warnings.push_back(
            "auto T: candidate set is not attracting under the scale-limit flow; fell back to T = 2");
        choice.T = fallback;
        return choice;
    }
    choice.T = probe.T_eps + 1.0;
    return choice;
}

RescalingReport run_diagnostic(const Trajectory& traj, const MarchaudMap& map,
                               const DiagnosticOptions& options) {
    RescalingReport report;
    report.thresholds = options.thresholds;
    report.bound_K = map.bound_K();

    const AttractorSpec candidate = resolve_candidate(map, options);
    report.radius_a = candidate.radius_a;
    report.deltas = candidate.deltas;

    const WindowChoice choice = options.T_override || !options.window
                                    ? choose_window_length(map, options)
                                    : *options.window;
    report.T = choice.T;
    report.T_auto = choice.auto_chosen;
    report.warnings = choice.warnings;

    report.anchors = compute_anchors(traj, report.T);
    if (report.anchors.degenerate)
        report.warnings.push_back("horizon shorter than one window; diagnostics are degenerate");
    report.rescaling = rescale(traj, report.anchors, candidate.radius_a);
    report.zeta = martingale_partial_sums(traj, report.rescaling);
    report.contraction = contraction_report(traj, report.rescaling, report.deltas);
    report.sup_r = report.rescaling.sup_r();
    report.overflow = traj.diverged;
    report.K_omega = (1.0 + report.zeta.m_omega + (report.T + 1.0) * report.bound_K) *
                     std::exp(report.bound_K * (report.T + 1.0));
    report.verdict = stability_verdict(report, report.rationale);
    return report;
}

std::vector<std::string> check_rescaling_invariants(const Trajectory& traj,
                                                    const MarchaudMap& map,
                                                    const RescalingReport& report) {
    std::vector<std::string> violations;
    const auto& rs = report.rescaling;
    const auto& anchors = report.anchors;
    const std::size_t N = traj.steps();

    auto complain = [&violations](const std::string& msg) { violations.push_back(msg); };

    // r(n) >= 1 and window starts normalized into the radius_a ball.
    for (std::size_t n = 0; n < rs.windows(); ++n) {
        if (rs.r[n] < 1.0) complain("r(n) < 1 at window " + std::to_string(n));
        const double hn = norm(xhat(traj, rs, rs.window_start[n]));
        if (hn > rs.radius_a * (1.0 + 1e-12))
            complain("||xhat(T_n)|| exceeds radius_a at window " + std::to_string(n));
    }

    // Anchor spacing within [T, T+1] (steps are at most 1).
    for (std::size_t n = 0; n + 1 < anchors.count(); ++n) {
        const double gap = anchors.T_n[n + 1] - anchors.T_n[n];
        if (gap < report.T - 1e-12 || gap > report.T + 1.0 + 1e-12)
            complain("anchor spacing " + std::to_string(gap) + " outside [T, T+1] at window " +
                     std::to_string(n));
    }

    // Rescaled recursion identity, exact up to relative 1e-12.
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t n = rs.window_of_step(k);
        const double r = rs.r[n];
        const bool closes_window = n + 1 < rs.windows() && k + 1 == rs.window_start[n + 1];
        const Vec lhs = closes_window ? rs.xhat_end[n] : xhat(traj, rs, k + 1);
        const Vec rhs = xhat(traj, rs, k) + traj.a[k] * (yhat(traj, rs, k) + mhat(traj, rs, k));
        const double scale = std::max(1.0, norm(traj.x[k + 1]) / r);
        if (norm(lhs - rhs) > 1e-12 * scale) {
            complain("rescaled recursion identity fails at step " + std::to_string(k));
            break;
        }
    }

    // Rescaled selections are members of the rescaled map.
    bool member_ok = true;
    for (std::size_t n = 0; n < rs.windows() && member_ok; ++n) {
        const MarchaudMap hr = scaled_map(map, rs.r[n]);
        const std::size_t k0 = rs.window_start[n];
        const std::size_t k1 = n + 1 < rs.windows() ? rs.window_start[n + 1] : N;
        for (std::size_t k = k0; k < k1; ++k) {
            const double dist = hr.evaluate(xhat(traj, rs, k)).distance(yhat(traj, rs, k));
            if (dist > 1e-7) {
                complain("rescaled selection leaves h_{r(n)} at step " + std::to_string(k) +
                         " (distance " + std::to_string(dist) + ")");
                member_ok = false;
                break;
            }
        }
    }

    // Rescaled trajectory stays under the K_omega envelope, including the
    // window-end limits.
    for (std::size_t k = 0; k <= N; ++k) {
        if (norm(xhat(traj, rs, k)) > report.K_omega * (1.0 + 1e-9)) {
            complain("||xhat|| exceeds the K_omega envelope at step " + std::to_string(k));
            break;
        }
    }
    for (std::size_t n = 0; n < rs.xhat_end.size(); ++n) {
        if (norm(rs.xhat_end[n]) > report.K_omega * (1.0 + 1e-9)) {
            complain("||xhat(T^-)|| exceeds the K_omega envelope at window " + std::to_string(n));
            break;
        }
    }

    return violations;
}

}  // namespace srilab
