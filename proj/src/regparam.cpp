#include "normgeo/regparam.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/geometry.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace normgeo {

double grad_dualnorm(const Norm& norm, const Matrix& X, const Vector& omega) {
    if (X.rows() != omega.size()) throw InputError("noise length does not match design rows");
    const Vector g = (X.transpose() * omega) / static_cast<double>(X.rows());
    return norm.dual_value(g);
}

double grad_dualnorm_trial(const LossObject& loss, const Norm& norm, const DesignSpec& design,
                           const NoiseSpec& noise, const Vector& theta_star, Seed seed) {
    DesignSpec d = design;
    d.seed = derive_seed(seed, 0);
    NoiseSpec ns = noise;
    ns.seed = derive_seed(seed, 1);
    const Matrix X = sample_design(d);
    if (theta_star.size() != X.cols()) throw InputError("theta* length does not match design p");
    const Vector y = sample_response(loss, X, theta_star, ns);
    const Vector eta = X * theta_star;
    Vector omega(eta.size());
    for (Index i = 0; i < eta.size(); ++i) omega[i] = loss.dphi(eta[i]) - y[i];
    return grad_dualnorm(norm, X, omega);
}

LambdaReport lambda_report(const LossObject& loss, const Norm& norm, const DesignSpec& design,
                           const NoiseSpec& noise, const Vector& theta_star, double beta,
                           std::size_t n_trials, Seed seed, const LambdaOptions& opts) {
    if (n_trials < 20) throw InputError("lambda_report needs n_trials >= 20");
    if (!(beta > 1.0)) throw InputError("beta must be > 1");
    design.validate();
    std::vector<double> stats(n_trials);
    const auto nt = static_cast<std::int64_t>(n_trials);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < nt; ++k)
        stats[static_cast<std::size_t>(k)] =
            grad_dualnorm_trial(loss, norm, design, noise, theta_star, derive_seed(seed, static_cast<std::uint64_t>(k)));

    LambdaReport rep;
    const auto ms = mean_stderr(stats);
    rep.mean_stat = ms.mean;
    rep.std_error = ms.std_error;
    rep.q95 = upper_quantile(stats, 0.95);
    rep.n_trials = n_trials;
    rep.beta = beta;
    rep.recommended_lambda = beta * rep.q95;
    if (design.covariance.is_identity()) {
        rep.xi = 1.0;
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(design.covariance.matrix(), Eigen::EigenvaluesOnly);
        rep.xi = std::sqrt(eig.eigenvalues().maxCoeff());
    }
    rep.w_ball = width_norm_ball(norm, opts.width_mc, derive_seed(seed, 0xba11)).mean;
    rep.width_ratio = rep.mean_stat * std::sqrt(static_cast<double>(design.n)) / rep.w_ball;
    return rep;
}

Vector sparse_theta(Index p, Index s, double magnitude, Seed seed) {
    if (s < 0 || s > p) throw InputError("sparsity must lie in [0, p]");
    Engine eng = substream(seed, 0);
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < s; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), idx.size() - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[pick(eng)]);
    }
    Vector theta = Vector::Zero(p);
    for (Index i = 0; i < s; ++i) theta[idx[static_cast<std::size_t>(i)]] = (eng() >> 63) ? magnitude : -magnitude;
    return theta;
}

}  // namespace normgeo
