#pragma once

#include "normgeo/randomdesign.hpp"
#include "normgeo/types.hpp"

#include <limits>
#include <string>

namespace normgeo {

enum class LossKind { Squared, Logistic, Poisson };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);

/// GLM loss (1/n) sum phi(<X_i,theta>) - y_i <X_i,theta>. The squared loss
/// uses (1/n)||y - X theta||^2 instead, i.e. twice the Gaussian GLM form.
struct LossObject {
    LossKind kind = LossKind::Squared;
    double clamp = 30.0;  // Poisson: exp is Taylor-continued (2nd order) past |eta| = clamp

    double phi(double eta) const;
    double dphi(double eta) const;   // E[y | eta]
    double d2phi(double eta) const;
    /// 2 for the squared loss, 1 for GLM losses.
    double convention_factor() const noexcept { return kind == LossKind::Squared ? 2.0 : 1.0; }
};

double loss_value(const LossObject& loss, const Vector& theta, const Matrix& X, const Vector& y);
Vector loss_gradient(const LossObject& loss, const Vector& theta, const Matrix& X, const Vector& y);

/// deltaL(u, theta) = L(theta + u) - L(theta) - <grad L(theta), u>, evaluated
/// per sample from the linear predictors (y cancels).
double bregman(const LossObject& loss, const Vector& eta, const Vector& v);

/// Number of linear predictors that hit the Poisson clamp.
std::size_t count_clamped(const LossObject& loss, const Vector& eta);

/// Responses from the conditional model at theta*: y = X theta* + noise for
/// the squared loss, Bernoulli(sigmoid(eta)) / Poisson(exp(eta)) otherwise.
Vector sample_response(const LossObject& loss, const Matrix& X, const Vector& theta_star,
                       const NoiseSpec& noise);

struct GlmCurvature {
    double T = 1.0;
    double ell = 0.0;        // min_{|a| <= 2T} phi''(a)
    double eps1_bar = 1.0;   // analytic tail bound on P(|<X_i,u>| > T), clipped to 1
    double eps2_bar = 1.0;   // analytic tail bound on P(|<X_i,theta*>| > T), clipped to 1
    double tail_constant = 0.5;
    double psi2_bound = 1.0;

    /// kappa / (1 - eps1 - eps2); +inf when eps1 + eps2 >= 1.
    double kappa1() const noexcept {
        const double d = 1.0 - eps1_bar - eps2_bar;
        return d > 0.0 ? psi2_bound / d : std::numeric_limits<double>::infinity();
    }
};

/// Closed-form curvature floor and sub-Gaussian tail constants e*exp(-c T^2/psi2^2).
GlmCurvature glm_curvature(const LossObject& loss, double T, double psi2_bound = 1.0,
                           double tail_constant = 0.5);

}  // namespace normgeo
