#pragma once

#include "normgeo/losses.hpp"
#include "normgeo/errors.hpp"
#include "normgeo/norms.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace normgeo {

struct SolverConfig {
    std::size_t max_iters = 5000;
    double rel_tol = 1e-8;
    /// Prox-gradient residual tolerance, relative to 1 + ||theta||.
    double grad_tol = 1e-7;
    std::optional<double> step_init;  // empty -> 1 / power-method curvature
    bool monotone = true;
    double lambda = 0.0;

    void validate() const;
};

struct FitResult {
    Vector theta_hat;
    std::size_t iters = 0;
    std::vector<double> objective_trace;  // F(theta_k), one entry per iteration
    bool converged = false;
    double final_step = 0.0;
    double residual = 0.0;  // ||theta - prox_{t lambda R}(theta - t grad)||_2
    std::size_t clamped = 0;
};

/// Raised when the objective becomes non-finite; carries the trace so far.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> trace)
        : Error("E_SOLVER", what), trace_(std::move(trace)) {}
    bool is_input_error() const noexcept override { return false; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// theta_hat = argmin L(theta) + lambda R(theta) by accelerated proximal
/// gradient with backtracking; with `monotone` set a step that raises the
/// objective is rejected and momentum restarts.
FitResult solve_regularized(const LossObject& loss, const Norm& norm, const Matrix& X, const Vector& y,
                            const SolverConfig& cfg);

/// 20-iteration power-method estimate of the largest eigenvalue of X'X/n.
double power_method_curvature(const Matrix& X, int iters = 20);

/// prox_{t lambda R}(theta - t grad L(theta)) - theta, in Euclidean norm.
double prox_residual(const LossObject& loss, const Norm& norm, const Matrix& X, const Vector& y,
                     const Vector& theta, double lambda, double step);

}  // namespace normgeo
