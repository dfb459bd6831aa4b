#pragma once

#include "normgeo/geometry.hpp"
#include "normgeo/losses.hpp"
#include "normgeo/randomdesign.hpp"

#include <functional>
#include <string>
#include <vector>

namespace normgeo {

/// Empirical restricted-eigenvalue / RSC statistics over a finite cap. All
/// verdicts are necessary-condition checks: the finite cap under-covers the
/// continuum cap, so inf_q over-estimates and sup_q under-estimates.
struct ConditionReport {
    double inf_q = 0.0;
    double sup_q = 0.0;
    double rsc_kappa = 0.0;
    double w_hat = 0.0;
    Index n = 0;
    double envelope_c = 0.0;
    bool passed = false;
    // Anisotropic and GLM extras (zero when not computed).
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double normalized_dev = 0.0;  // sup |(1/n)||Xu||^2 / (u'Sigma u) - 1|
    double floor_inf = 0.0;       // inf of the truncated quadratic floor
    double min_gap = 0.0;         // min over u of exact deltaL - floor
    double eps1_empirical = 0.0;
    double eps2_empirical = 0.0;
    std::size_t clamped = 0;
    std::vector<std::string> warnings;

    double deviation() const noexcept;  // max(|inf_q - 1|, |sup_q - 1|)
};

/// (inf_q, sup_q) = extremes of (1/n)||X u||^2 over the cap directions.
ConditionReport re_statistic(const Matrix& X, const CapSample& cap);
ConditionReport re_statistic(const Matrix& X, const Matrix& directions);

struct EnvelopeFit {
    double slope = 0.0;       // of log(deviation) on log(n)
    double intercept = 0.0;
    double r2 = 0.0;
    double c = 0.0;           // median over the grid of deviation * sqrt(n) / w_hat
    std::size_t n_points = 0;
    std::vector<std::string> warnings;
};

/// Fits the RIP envelope |q - 1| ~ c w / sqrt(n). Reports sharing an n are
/// aggregated by the median deviation; zero deviations are dropped with a
/// warning. Needs >= 4 distinct n.
EnvelopeFit rip_envelope(const std::vector<ConditionReport>& reports);

/// Anisotropic RIP bracketing with restricted eigenvalues of Sigma over the
/// cap, using an envelope constant c and width w_hat calibrated elsewhere.
ConditionReport aniso_re_check(const Matrix& X, const CapSample& cap, const CovarianceSpec& cov, double c,
                               double w_hat);

/// Exact Bregman increment and truncated quadratic floor per cap direction.
/// Throws std::logic_error if exact < floor - 1e-10 for any direction.
ConditionReport rsc_glm_statistic(const LossObject& loss, const Matrix& X, const Vector& theta_star,
                                  const CapSample& cap, const GlmCurvature& curvature);

/// Smallest integer n in [n_lo, n_hi] with stat(n) >= threshold, by
/// bisection; stat is assumed nondecreasing in n. Throws BracketError when
/// stat(n_hi) < threshold or stat(n_lo) >= threshold.
Index phase_transition_n0(const std::function<double(Index)>& stat, double threshold, Index n_lo, Index n_hi);

/// Median over `seeds` designs of inf_q at sample size n. Design seeds are
/// derive_seed(base_seed, k) for k < seeds, shared across n.
double median_inf_q(const DesignSpec& base, const Matrix& directions, Index n, std::size_t seeds, Seed base_seed);

}  // namespace normgeo
