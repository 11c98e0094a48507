#pragma once

#include "srilab/di_integrator.hpp"
#include "srilab/sri_engine.hpp"

namespace srilab {

// Projective rescaling diagnostic. The timeline of a run is cut at anchors
// T_0 = 0, T_{n+1} = first knot t(m) at or past T_n + T. Each window is
// normalized by r(n) = ||x(T_n)|| v 1 (v radius_a when the candidate
// neighborhood has radius a != 1), which maps the window start into the unit
// ball while preserving the recursion: the rescaled selections land in the
// rescaled map h_{r(n)}. Stability evidence is window-end contraction below
// delta4 for every window that starts above the empirical threshold R0;
// divergence evidence is r(n) racing past the divergence threshold. The
// verdict is empirical evidence about one run, never a proof.

struct AnchorSeq {
    double T = 0.0;
    std::vector<std::size_t> m;    // iterate index of each anchor
    std::vector<double> T_n;       // anchor times, t(m(n))
    bool degenerate = false;       // horizon shorter than one window

    std::size_t count() const { return m.size(); }
};

/// T_0 = 0 and each later anchor is the first knot at or past T_{n-1} + T.
AnchorSeq compute_anchors(const Trajectory& traj, double T);

struct Rescaling {
    double radius_a = 1.0;
    std::vector<double> r;                  // one per window (last may be partial)
    std::vector<std::size_t> window_start;  // m(n); window n covers steps [m(n), m(n+1))
    std::vector<Vec> xhat_end;              // x(T_{n+1}) / r(n) for full windows

    std::size_t windows() const { return r.size(); }
    std::size_t window_of_step(std::size_t k) const;
    double sup_r() const;
};

Rescaling rescale(const Trajectory& traj, const AnchorSeq& anchors, double radius_a = 1.0);

/// x_k / r(n), y_k / r(n), M_{k+1} / r(n) for the window n holding step k.
Vec xhat(const Trajectory& traj, const Rescaling& rs, std::size_t k);
Vec yhat(const Trajectory& traj, const Rescaling& rs, std::size_t k);
Vec mhat(const Trajectory& traj, const Rescaling& rs, std::size_t k);

struct MartingaleStats {
    std::vector<Vec> zeta;     // rescaled partial sums, zeta[0] = 0
    double cauchy_stat = 0.0;  // diameter bound of the last quarter of partial sums
    double m_omega = 0.0;      // largest within-window partial-sum norm
    double aux_gap = 0.0;      // largest within-window two-term increment bound
};

MartingaleStats martingale_partial_sums(const Trajectory& traj, const Rescaling& rs);

/// Loose a-priori ceiling on the Cauchy statistic from the recorded steps:
/// a large multiple of the square root of the tail sum of a(k)^2 K (1 +
/// ||xhat||^2). The observed statistic should sit far below it.
double zeta_cauchy_oracle(const Trajectory& traj, const Rescaling& rs, double noise_K);

struct ContractionData {
    std::vector<double> ratios;   // ||x(T_{n+1})|| / ||x(T_n)||, per full window
    std::vector<bool> tested;     // window starts above R0
    std::vector<bool> passed;     // ratio < delta4 (only meaningful when tested)
    double R0_estimate = 0.0;     // empirical contraction threshold (inf when absent)
    std::size_t tested_count = 0;
    bool all_tested_pass = true;
};

/// Marks windows with r(n) > R0 and tests their end-to-start norm ratio
/// against delta4. When R0 is not supplied it is estimated as the smallest
/// observed radius above which every window contracts.
ContractionData contraction_report(const Trajectory& traj, const Rescaling& rs,
                                   const std::array<double, 4>& deltas,
                                   std::optional<double> R0 = {});

enum class StabilityVerdict { StableEvidence, UnstableEvidence, Inconclusive };

const char* to_string(StabilityVerdict v);

struct DiagnosticThresholds {
    double stable_sup_r = 1e3;
    double divergence_r = 1e3;
};

struct RescalingReport {
    double T = 0.0;
    bool T_auto = false;
    double radius_a = 1.0;
    std::array<double, 4> deltas{};
    AnchorSeq anchors;
    Rescaling rescaling;
    MartingaleStats zeta;
    ContractionData contraction;
    double bound_K = 0.0;
    double K_omega = 0.0;  // (1 + M_omega + (T+1)K) e^{K(T+1)}
    double sup_r = 0.0;
    bool overflow = false;
    StabilityVerdict verdict = StabilityVerdict::Inconclusive;
    std::string rationale;
    DiagnosticThresholds thresholds;
    std::vector<std::string> warnings;
};

StabilityVerdict stability_verdict(const RescalingReport& report, std::string& rationale);

struct WindowChoice {
    double T = 2.0;
    bool auto_chosen = true;
    std::vector<std::string> warnings;
};

struct DiagnosticOptions {
    std::optional<double> T_override;
    std::optional<WindowChoice> window;      // precomputed choice, reused across seed batches
    std::optional<AttractorSpec> candidate;  // default: the origin, radius 1
    DiagnosticThresholds thresholds;
    double probe_dt = 1e-3;
    double probe_horizon = 40.0;
};

/// Probes the scale-limit flow once and returns the window length the
/// diagnostic would choose: the measured approach time to within
/// delta2 - delta1 of the candidate, plus one. Deterministic per scenario, so
/// seed batches compute it once and pass it through DiagnosticOptions.
WindowChoice choose_window_length(const MarchaudMap& map, const DiagnosticOptions& options);

/// Full pipeline: anchors -> rescale -> martingale stats -> contraction ->
/// verdict. When T is not overridden it is chosen as the probed approach
/// time of the scale-limit flow to within delta2 - delta1 of the candidate,
/// plus one; scenarios whose limit map rejects the candidate fall back to
/// T = 2 with a warning.
RescalingReport run_diagnostic(const Trajectory& traj, const MarchaudMap& map,
                               const DiagnosticOptions& options);

/// Re-derives the rescaled recursion identity, the rescaled-map membership,
/// the anchor spacing, r >= 1, the window-start normalization and the
/// K_omega envelope from the raw record. Returns human-readable violations;
/// empty means everything held.
std::vector<std::string> check_rescaling_invariants(const Trajectory& traj,
                                                    const MarchaudMap& map,
                                                    const RescalingReport& report);

}  // namespace srilab
