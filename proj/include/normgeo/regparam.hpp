#pragma once

#include "normgeo/losses.hpp"
#include "normgeo/norms.hpp"
#include "normgeo/randomdesign.hpp"

namespace normgeo {

/// Statistics of R*(grad L(theta*)) in the (1/n) X' omega convention, where
/// omega_i = E[y_i | X_i] - y_i (for the squared loss, y - X theta*).
struct LambdaReport {
    double mean_stat = 0.0;
    double std_error = 0.0;
    double q95 = 0.0;
    std::size_t n_trials = 0;
    double width_ratio = 0.0;  // mean_stat * sqrt(n) / w_hat(unit ball)
    double w_ball = 0.0;
    double xi = 1.0;           // 1 (isotropic) or sqrt(Lambda_max(Sigma))
    double beta = 2.0;
    double recommended_lambda = 0.0;  // beta * q95

    /// Lambda in the solver's loss convention (x2 for the squared loss).
    double solver_lambda(const LossObject& loss) const noexcept {
        return loss.convention_factor() * recommended_lambda;
    }
};

/// R*((1/n) X' omega) for a given realization.
double grad_dualnorm(const Norm& norm, const Matrix& X, const Vector& omega);

/// One fresh (X, y) draw from the model at theta*: design seed and noise seed
/// are substreams 0 and 1 of `seed`.
double grad_dualnorm_trial(const LossObject& loss, const Norm& norm, const DesignSpec& design,
                           const NoiseSpec& noise, const Vector& theta_star, Seed seed);

struct LambdaOptions {
    std::size_t width_mc = 10000;
};

/// Aggregates n_trials independent trials (trial k uses substream k of seed).
LambdaReport lambda_report(const LossObject& loss, const Norm& norm, const DesignSpec& design,
                           const NoiseSpec& noise, const Vector& theta_star, double beta,
                           std::size_t n_trials, Seed seed, const LambdaOptions& opts = {});

/// Draws an s-sparse vector with entries +-magnitude on a uniformly random support.
Vector sparse_theta(Index p, Index s, double magnitude, Seed seed);

}  // namespace normgeo
