#pragma once

#include "srilab/sri_engine.hpp"

namespace srilab {

/// Objective to minimize. The quadratic form x'Ax + Bx + c (A symmetric)
/// has closed-form gradients and estimator error bounds; custom objectives
/// carry a reference gradient for testing and for empirical error bounds.
class ObjectiveSpec {
public:
    enum class Kind { Quadratic, Custom };

    static ObjectiveSpec quadratic(Mat A, Vec B, double c);
    static ObjectiveSpec custom(std::size_t dim, std::function<double(const Vec&)> f,
                                std::function<Vec(const Vec&)> grad);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;  // 2Ax + B for quadratics
    const Mat& A() const;
    const Vec& B() const;
    double c() const { return c_; }

private:
    ObjectiveSpec() = default;
    Kind kind_ = Kind::Quadratic;
    std::size_t dim_ = 0;
    Mat A_;
    Vec B_;
    double c_ = 0.0;
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
};

/// Gradient estimator with a fixed perturbation size. Held constant for the
/// whole run, so the systematic error stays inside a fixed ball.
struct EstimatorSpec {
    enum class Kind { KwForward, KwCentral, Spsa, SmoothedFunctional };
    Kind kind = Kind::KwForward;
    double c = 0.1;                 // perturbation size, fixed
    std::size_t samples_per_call = 1;  // SPSA / smoothed-functional averaging

    static EstimatorSpec kw_forward(double c);
    static EstimatorSpec kw_central(double c);
    static EstimatorSpec spsa(double c, std::size_t samples = 1);
    static EstimatorSpec smoothed_functional(double c, std::size_t samples = 1);
};

/// One (noisy) estimate of the gradient of F at x.
Vec estimate_gradient(const EstimatorSpec& est, const ObjectiveSpec& F, const Vec& x,
                      RngStream& rng);

/// Systematic (conditional-mean) error of the estimator on the quadratic
/// x'Ax + Bx + c: forward differences carry the constant bias c * diag(A);
/// central differences, SPSA and smoothed functional are exact in the mean,
/// their sampling terms belong to the noise channel.
double error_bound_quadratic(const EstimatorSpec& est, const Mat& A, double c);

/// Conditional mean of the estimator at x, in closed form. Defined for
/// quadratics (all estimators) and for the deterministic finite-difference
/// estimators on any objective. Throws otherwise.
Vec conditional_mean_gradient(const EstimatorSpec& est, const ObjectiveSpec& F, const Vec& x);

/// Empirical bias bound for objectives without a closed form: max over the
/// sample grid of ||conditional mean - gradient||, inflated 10%.
double measure_error_bound(const EstimatorSpec& est, const ObjectiveSpec& F,
                           const std::vector<Vec>& sample_xs);

/// Descent scenario wired as a recursion with set-valued drift: the
/// selection is the negated conditional-mean estimate, which lies in
/// -grad F(x) + eps-ball; the zero-mean estimator fluctuation is routed into
/// the noise channel. extra_noise_K bounds that fluctuation's conditional
/// second moment (added to the noise model's own K).
struct SgdAssembly {
    MarchaudMap map;  // -grad F + eps-ball
    double eps = 0.0;
    SelectionOracle oracle;
    double extra_noise_K = 0.0;
};

SgdAssembly assemble_sgd(const ObjectiveSpec& F, const EstimatorSpec& est,
                         std::optional<double> eps_override = {});

/// Largest admissible estimator error so the iterates settle within delta of
/// the minimum set; for -grad F with smallest curvature lambda_min the
/// invariant neighborhood of the drift-plus-ball field has radius
/// eps / lambda_min.
double eps_threshold_for_delta(double delta, double lambda_min);

}  // namespace srilab
