#include "normgeo/solver.hpp"

#include <cmath>
#include <sstream>

namespace normgeo {

void SolverConfig::validate() const {
    if (!(rel_tol > 0.0)) throw InputError("rel_tol must be > 0");
    if (!(grad_tol > 0.0)) throw InputError("grad_tol must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be a finite number >= 0");
    if (max_iters < 1) throw InputError("max_iters must be >= 1");
    if (step_init && !(*step_init > 0.0)) throw InputError("step_init must be > 0");
}

double power_method_curvature(const Matrix& X, int iters) {
    const Index p = X.cols();
    Vector v = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
    double est = 0.0;
    for (int k = 0; k < iters; ++k) {
        const Vector w = X.transpose() * (X * v);
        const double nw = w.norm();
        if (!(nw > 0.0)) return 0.0;
        est = v.dot(w);
        v = w / nw;
    }
    const Vector w = X.transpose() * (X * v);
    est = std::max(est, v.dot(w));
    return est / static_cast<double>(X.rows());
}

double prox_residual(const LossObject& loss, const Norm& norm, const Matrix& X, const Vector& y,
                     const Vector& theta, double lambda, double step) {
    const Vector g = loss_gradient(loss, theta, X, y);
    const Vector z = theta - step * g;
    const Vector next = lambda > 0.0 ? norm.prox(z, step * lambda) : z;
    return (next - theta).norm();
}

namespace {

double curvature_scale(const LossObject& loss) {
    switch (loss.kind) {
    case LossKind::Squared: return 2.0;
    case LossKind::Logistic: return 0.25;
    case LossKind::Poisson: return 1.0;
    }
    return 1.0;
}

}  // namespace

FitResult solve_regularized(const LossObject& loss, const Norm& norm, const Matrix& X, const Vector& y,
                            const SolverConfig& cfg) {
    cfg.validate();
    if (X.cols() != norm.dim()) throw InputError("design columns do not match the norm dimension");
    const Index p = X.cols();
    const double lambda = cfg.lambda;
    auto smooth = [&](const Vector& th) { return loss_value(loss, th, X, y); };
    auto objective = [&](const Vector& th, double f) { return f + lambda * norm.value(th); };
    auto prox = [&](const Vector& z, double s) { return lambda > 0.0 ? norm.prox(z, s * lambda) : z; };

    double step = 0.0;
    if (cfg.step_init) {
        step = *cfg.step_init;
    } else {
        const double L = curvature_scale(loss) * power_method_curvature(X);
        step = L > 0.0 ? 1.0 / L : 1.0;
    }

    FitResult res;
    Vector x = Vector::Zero(p);
    double fx = smooth(x);
    double Fx = objective(x, fx);
    Vector yk = x;
    double t = 1.0;

    for (std::size_t k = 0; k < cfg.max_iters; ++k) {
        const double fy = smooth(yk);
        const Vector gy = loss_gradient(loss, yk, X, y);
        Vector z;
        double fz = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            z = prox(yk - step * gy, step);
            fz = smooth(z);
            const Vector d = z - yk;
            if (fz <= fy + gy.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-14 * (1.0 + std::abs(fy))) break;
            step *= 0.5;
        }
        const double Fz = objective(z, fz);
        if (!std::isfinite(Fz)) {
            res.objective_trace.push_back(Fz);
            std::ostringstream os;
            os << "objective became non-finite at iteration " << k;
            throw SolverError(os.str(), res.objective_trace);
        }
        res.iters = k + 1;

        const double F_prev = Fx;
        if (cfg.monotone && Fz > Fx) {
            // Reject and restart momentum from x; the next step is a plain
            // prox-gradient step, which cannot increase F.
            t = 1.0;
            yk = x;
            res.objective_trace.push_back(Fx);
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        yk = z + ((t - 1.0) / t_next) * (z - x);
        t = t_next;
        x = std::move(z);
        fx = fz;
        Fx = Fz;
        res.objective_trace.push_back(Fx);

        const double rel = std::abs(F_prev - Fx) / std::max(std::abs(Fx), 1e-300);
        if (rel < cfg.rel_tol || F_prev == Fx || k % 10 == 9) {
            const double r = prox_residual(loss, norm, X, y, x, lambda, step);
            if (r <= cfg.grad_tol * (1.0 + x.norm())) {
                res.converged = true;
                break;
            }
        }
    }
    res.theta_hat = x;
    res.final_step = step;
    res.residual = prox_residual(loss, norm, X, y, x, lambda, step);
    res.clamped = count_clamped(loss, X * x);
    return res;
}

}  // namespace normgeo
