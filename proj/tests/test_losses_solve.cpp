#include <doctest.h>

#include "normgeo/errors.hpp"
#include "normgeo/losses.hpp"
#include "normgeo/norms.hpp"
#include "normgeo/randomdesign.hpp"
#include "normgeo/regparam.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/solver.hpp"

#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace normgeo;

namespace {

const LossObject kSquared{LossKind::Squared};
const LossObject kLogistic{LossKind::Logistic};
const LossObject kPoisson{LossKind::Poisson};

Matrix gaussian_design(Index n, Index p, Seed s) {
    return sample_design(DesignSpec::isotropic(n, p, DesignFamily::GaussianIsotropic, s));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_SUITE("losses_solve") {

TEST_CASE("loss value examples") {
    const Matrix X = gaussian_design(5, 3, 1);
    CHECK(loss_value(kSquared, Vector::Zero(3), X, Vector::Zero(5)) == 0.0);
    Vector y01(5);
    y01 << 0, 1, 1, 0, 1;
    CHECK(loss_value(kLogistic, Vector::Zero(3), X, y01) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(loss_value(kSquared, Vector::Ones(2), Matrix::Identity(2, 2), Vector::Ones(2)) == 0.0);
}

TEST_CASE("input validation") {
    const Matrix X = gaussian_design(4, 2, 1);
    Vector y = Vector::Ones(4);
    CHECK_THROWS_AS(loss_value(kSquared, Vector::Zero(3), X, y), InputError);
    CHECK_THROWS_AS(loss_value(kSquared, Vector::Zero(2), X, Vector::Ones(3)), InputError);
    y[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(loss_gradient(kSquared, Vector::Zero(2), X, y), InputError);
    CHECK_THROWS_AS(loss_value(kPoisson, Vector::Zero(2), X, -Vector::Ones(4)), InputError);
}

TEST_CASE("squared gradient at zero is -(2/n) X'y") {
    const Matrix X = gaussian_design(7, 3, 2);
    const Vector y = gaussian_vector(3, 0, 7);
    const Vector g = loss_gradient(kSquared, Vector::Zero(3), X, y);
    CHECK((g + 2.0 / 7.0 * X.transpose() * y).norm() < 1e-14);
}

TEST_CASE("gradient vanishes on noiseless GLM data") {
    const Matrix X = gaussian_design(30, 4, 3);
    const Vector th = 0.3 * gaussian_vector(4, 0, 4);
    for (const auto& loss : {kSquared, kLogistic, kPoisson}) {
        const Vector eta = X * th;
        Vector y(30);
        for (Index i = 0; i < 30; ++i) y[i] = loss.dphi(eta[i]);
        CHECK(loss_gradient(loss, th, X, y).norm() < 1e-14);
    }
}

TEST_CASE("gradient matches central differences") {
    for (const auto& loss : {kSquared, kLogistic, kPoisson}) CHECK(oracle::gradient_fd_gap(loss, 1000, 100) <= 1e-5);
}

TEST_CASE("losses are convex along random segments") {
    for (const auto& loss : {kSquared, kLogistic, kPoisson}) {
        for (std::uint64_t k = 0; k < 1000; ++k) {
            const Matrix X = gaussian_design(10, 4, 400 + k);
            Vector y = gaussian_vector(401, k, 10).cwiseAbs();
            if (loss.kind == LossKind::Logistic) y = (y.array() > 0.7).cast<double>();
            const Vector a = gaussian_vector(402, k, 4), b = gaussian_vector(403, k, 4);
            const double mid = loss_value(loss, 0.5 * (a + b), X, y);
            REQUIRE(mid <= 0.5 * (loss_value(loss, a, X, y) + loss_value(loss, b, X, y)) + 1e-12);
        }
    }
}

TEST_CASE("squared-loss Bregman increment is the quadratic form") {
    const Matrix X = gaussian_design(40, 6, 5);
    const Vector th = gaussian_vector(6, 0, 6);
    const Vector y = X * th + gaussian_vector(7, 0, 40);
    for (std::uint64_t k = 0; k < 50; ++k) {
        const Vector d = gaussian_vector(8, k, 6);
        const double dl = loss_value(kSquared, th + d, X, y) - loss_value(kSquared, th, X, y) -
                          loss_gradient(kSquared, th, X, y).dot(d);
        const double q = (X * d).squaredNorm() / 40.0;
        CHECK(std::abs(dl - q) <= 1e-10);
        CHECK(std::abs(bregman(kSquared, X * th, X * d) - q) <= 1e-12);
    }
}

TEST_CASE("Bregman helper agrees with the loss for GLMs") {
    const Matrix X = gaussian_design(40, 6, 9);
    const Vector th = 0.2 * gaussian_vector(10, 0, 6);
    const Vector y = (gaussian_vector(11, 0, 40).array() > 0).cast<double>();
    for (const auto& loss : {kLogistic, kPoisson}) {
        const Vector d = 0.3 * gaussian_vector(12, 0, 6);
        const double dl = loss_value(loss, th + d, X, y) - loss_value(loss, th, X, y) - loss_gradient(loss, th, X, y).dot(d);
        CHECK(bregman(loss, X * th, X * d) == doctest::Approx(dl).epsilon(1e-9));
        CHECK(dl >= 0.0);
    }
}

TEST_CASE("curvature floors") {
    CHECK(glm_curvature(kSquared, 3.0).ell == 1.0);
    CHECK(glm_curvature(kLogistic, 1.0).ell == doctest::Approx(sigmoid(2.0) * (1.0 - sigmoid(2.0))).epsilon(1e-14));
    CHECK(glm_curvature(kLogistic, 1.0).ell == doctest::Approx(0.10499).epsilon(1e-4));
    CHECK(glm_curvature(kPoisson, 1.0).ell == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(glm_curvature(kLogistic, 0.0), InputError);
    for (double a : {-5.0, -1.0, 0.0, 2.0, 40.0}) {
        CHECK(kLogistic.d2phi(a) > 0.0);
        CHECK(kPoisson.d2phi(a) > 0.0);
    }
    const auto c = glm_curvature(kLogistic, 3.0);
    CHECK(c.eps1_bar > 0.0);
    CHECK(c.eps1_bar <= 1.0);
}

TEST_CASE("Poisson clamp is counted") {
    Vector eta(3);
    eta << 0.0, 31.0, -45.0;
    CHECK(count_clamped(kPoisson, eta) == 2);
    CHECK(std::isfinite(kPoisson.phi(1000.0)));
}

TEST_CASE("lambda = 0 reproduces least squares") {
    const Matrix X = gaussian_design(200, 50, 11);
    const Vector th = gaussian_vector(12, 0, 50);
    const Vector y = X * th + gaussian_vector(13, 0, 200);
    SolverConfig cfg;
    cfg.lambda = 0.0;
    cfg.rel_tol = 1e-14;
    cfg.max_iters = 20000;
    const FitResult fit = solve_regularized(kSquared, Norm::l1(50), X, y, cfg);
    const Vector ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK((fit.theta_hat - ols).norm() <= 1e-6 * ols.norm());
    CHECK(fit.converged);
}

TEST_CASE("large lambda returns zero") {
    const Matrix X = gaussian_design(60, 20, 14);
    const Vector y = gaussian_vector(15, 0, 60);
    for (const Norm& n : {Norm::l1(20), Norm::l2(20), Norm::group(GroupPartition::contiguous(20, 5))}) {
        SolverConfig cfg;
        cfg.lambda = n.dual_value(2.0 / 60.0 * X.transpose() * y) * 1.0001;
        const FitResult fit = solve_regularized(kSquared, n, X, y, cfg);
        CHECK(fit.theta_hat.norm() == 0.0);
    }
}

TEST_CASE("orthogonal design lasso is soft thresholding") {
    const Index n = 16;
    const Matrix X = std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
    const Vector y = 3.0 * gaussian_vector(16, 0, n);
    const double lambda = 0.8;
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.rel_tol = 1e-14;
    const FitResult fit = solve_regularized(kSquared, Norm::l1(n), X, y, cfg);
    // (1/n)||y - sqrt(n) t||^2 + lambda|t|_1 = sum_i (z_i - t_i)^2 + lambda |t_i|, z = y / sqrt(n)
    const Vector z = y / std::sqrt(static_cast<double>(n));
    for (Index i = 0; i < n; ++i) {
        const double st = std::copysign(std::max(std::abs(z[i]) - lambda / 2.0, 0.0), z[i]);
        CHECK(fit.theta_hat[i] == doctest::Approx(st).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("solver trace, residual and objective guarantees") {
    const Matrix X = gaussian_design(120, 60, 17);
    const Vector th = sparse_theta(60, 5, 1.0, 3);
    for (const auto& loss : {kSquared, kLogistic, kPoisson}) {
        Vector y;
        if (loss.kind == LossKind::Squared) y = sample_response(loss, X, th, {NoiseFamily::Gaussian, 1.0, 4});
        else y = sample_response(loss, X, 0.3 * th, {NoiseFamily::Gaussian, 1.0, 4});
        for (const Norm& n : {Norm::l1(60), Norm::l2(60), Norm::linf(60), Norm::group(GroupPartition::contiguous(60, 3))}) {
            SolverConfig cfg;
            cfg.lambda = 0.05;
            const FitResult fit = solve_regularized(loss, n, X, y, cfg);
            CHECK(fit.converged);
            for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
                REQUIRE(fit.objective_trace[k] <= fit.objective_trace[k - 1]);
            CHECK(fit.residual <= 1e-6 * (1.0 + fit.theta_hat.norm()));
            CHECK(prox_residual(loss, n, X, y, fit.theta_hat, cfg.lambda, fit.final_step) <=
                  1e-6 * (1.0 + fit.theta_hat.norm()));
            const double f0 = loss_value(loss, Vector::Zero(60), X, y);
            CHECK(fit.objective_trace.back() <= f0);
            CHECK(fit.objective_trace.back() ==
                  doctest::Approx(loss_value(loss, fit.theta_hat, X, y) + cfg.lambda * n.value(fit.theta_hat)));
        }
    }
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.rel_tol = 1e-8;
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("responses follow the model") {
    const Matrix X = gaussian_design(20000, 3, 18);
    Vector th(3);
    th << 0.5, -0.5, 0.25;
    const Vector yb = sample_response(kLogistic, X, th, {NoiseFamily::Gaussian, 1.0, 2});
    const Vector yp = sample_response(kPoisson, X, th, {NoiseFamily::Gaussian, 1.0, 2});
    double eb = 0.0, ep = 0.0;
    for (Index i = 0; i < 20000; ++i) {
        REQUIRE((yb[i] == 0.0 || yb[i] == 1.0));
        REQUIRE(yp[i] >= 0.0);
        eb += yb[i] - sigmoid(X.row(i).dot(th));
        ep += yp[i] - std::exp(X.row(i).dot(th));
    }
    CHECK(std::abs(eb / 20000.0) < 0.02);
    CHECK(std::abs(ep / 20000.0) < 0.05);
}

}  // TEST_SUITE
