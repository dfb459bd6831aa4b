#include "normgeo/losses.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace normgeo {

std::string to_string(LossKind kind) {
    switch (kind) {
    case LossKind::Squared: return "squared";
    case LossKind::Logistic: return "logistic";
    case LossKind::Poisson: return "poisson";
    }
    return "unknown";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "squared") return LossKind::Squared;
    if (s == "logistic") return LossKind::Logistic;
    if (s == "poisson") return LossKind::Poisson;
    throw InputError("unknown loss '" + s + "'");
}

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void check_data(const LossObject& loss, const Vector& theta, const Matrix& X, const Vector& y) {
    if (X.cols() != theta.size()) throw InputError("theta length does not match design columns");
    if (X.rows() != y.size()) throw InputError("response length does not match design rows");
    if (X.rows() < 1) throw InputError("empty design");
    if (!theta.allFinite() || !y.allFinite() || !X.allFinite()) throw InputError("non-finite (NaN/inf) input data");
    if (loss.kind == LossKind::Poisson && (y.array() < 0.0).any())
        throw InputError("Poisson responses must be nonnegative");
}

// Past |eta| = c the exponential is continued by its second-order Taylor
// polynomial at +-c: convex, C^2, and finite for any representable eta.
double exp_ext(double eta, double c, int order) {
    const double a = std::clamp(eta, -c, c);
    const double e = std::exp(a);
    const double d = eta - a;
    switch (order) {
    case 0: return e * (1.0 + d + 0.5 * d * d);
    case 1: return e * (1.0 + d);
    default: return e;
    }
}

}  // namespace

double LossObject::phi(double eta) const {
    switch (kind) {
    case LossKind::Squared: return 0.5 * eta * eta;
    case LossKind::Logistic: return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    case LossKind::Poisson: return exp_ext(eta, clamp, 0);
    }
    return 0.0;
}

double LossObject::dphi(double eta) const {
    switch (kind) {
    case LossKind::Squared: return eta;
    case LossKind::Logistic: return sigmoid(eta);
    case LossKind::Poisson: return exp_ext(eta, clamp, 1);
    }
    return 0.0;
}

double LossObject::d2phi(double eta) const {
    switch (kind) {
    case LossKind::Squared: return 1.0;
    case LossKind::Logistic: {
        const double e = std::exp(-std::abs(eta));  // s(1-s) without cancellation
        return e / ((1.0 + e) * (1.0 + e));
    }
    case LossKind::Poisson: return exp_ext(eta, clamp, 2);
    }
    return 0.0;
}

double loss_value(const LossObject& loss, const Vector& theta, const Matrix& X, const Vector& y) {
    check_data(loss, theta, X, y);
    const Vector eta = X * theta;
    const auto n = static_cast<std::size_t>(X.rows());
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Index>(i);
        if (loss.kind == LossKind::Squared) {
            const double r = y[k] - eta[k];
            terms[i] = r * r;
        } else {
            terms[i] = loss.phi(eta[k]) - y[k] * eta[k];
        }
    }
    return pairwise_sum(terms) / static_cast<double>(n);
}

Vector loss_gradient(const LossObject& loss, const Vector& theta, const Matrix& X, const Vector& y) {
    check_data(loss, theta, X, y);
    const Vector eta = X * theta;
    Vector resid(eta.size());
    for (Index i = 0; i < eta.size(); ++i) resid[i] = loss.dphi(eta[i]) - y[i];
    return (loss.convention_factor() / static_cast<double>(X.rows())) * (X.transpose() * resid);
}

double bregman(const LossObject& loss, const Vector& eta, const Vector& v) {
    if (eta.size() != v.size() || eta.size() == 0) throw InputError("bregman: predictor lengths differ");
    const auto n = static_cast<std::size_t>(eta.size());
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Index>(i);
        if (loss.kind == LossKind::Squared)
            terms[i] = v[k] * v[k];
        else
            terms[i] = loss.phi(eta[k] + v[k]) - loss.phi(eta[k]) - loss.dphi(eta[k]) * v[k];
    }
    return pairwise_sum(terms) / static_cast<double>(n);
}

std::size_t count_clamped(const LossObject& loss, const Vector& eta) {
    if (loss.kind != LossKind::Poisson) return 0;
    std::size_t c = 0;
    for (Index i = 0; i < eta.size(); ++i) c += std::abs(eta[i]) > loss.clamp ? 1 : 0;
    return c;
}

Vector sample_response(const LossObject& loss, const Matrix& X, const Vector& theta_star, const NoiseSpec& noise) {
    if (X.cols() != theta_star.size()) throw InputError("theta* length does not match design columns");
    const Vector eta = X * theta_star;
    const Index n = X.rows();
    switch (loss.kind) {
    case LossKind::Squared: return eta + sample_noise(noise, n);
    case LossKind::Logistic: {
        Vector y(n);
        for (Index i = 0; i < n; ++i) {
            Engine eng = substream(noise.seed, static_cast<std::uint64_t>(i));
            std::bernoulli_distribution b(sigmoid(eta[i]));
            y[i] = b(eng) ? 1.0 : 0.0;
        }
        return y;
    }
    case LossKind::Poisson: {
        Vector y(n);
        for (Index i = 0; i < n; ++i) {
            Engine eng = substream(noise.seed, static_cast<std::uint64_t>(i));
            std::poisson_distribution<long long> pd(std::exp(std::clamp(eta[i], -loss.clamp, loss.clamp)));
            y[i] = static_cast<double>(pd(eng));
        }
        return y;
    }
    }
    return {};
}

GlmCurvature glm_curvature(const LossObject& loss, double T, double psi2_bound, double tail_constant) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("truncation level T must be > 0");
    if (!(psi2_bound > 0.0)) throw InputError("psi2 bound must be > 0");
    GlmCurvature c;
    c.T = T;
    c.psi2_bound = psi2_bound;
    c.tail_constant = tail_constant;
    switch (loss.kind) {
    case LossKind::Squared: c.ell = 1.0; break;
    case LossKind::Logistic: c.ell = loss.d2phi(2.0 * T); break;  // symmetric, decreasing in |a|
    case LossKind::Poisson: c.ell = std::exp(-2.0 * T); break;
    }
    const double tail = std::numbers::e * std::exp(-tail_constant * T * T / (psi2_bound * psi2_bound));
    c.eps1_bar = std::min(1.0, tail);
    c.eps2_bar = std::min(1.0, tail);
    return c;
}

}  // namespace normgeo
