#pragma once

#include "normgeo/norms.hpp"
#include "normgeo/types.hpp"

#include <limits>
#include <string>

namespace normgeo {

enum class ErrorSetVariant { Regularized, Constrained };

/// E_r = {D : R(theta*+D) <= R(theta*) + R(D)/beta}, or the constrained set
/// E_c = {D : R(theta*+D) <= R(theta*)} (beta = +inf).
struct ErrorSetSpec {
    Vector theta_star;
    double beta = 2.0;
    Norm norm;
    ErrorSetVariant variant = ErrorSetVariant::Regularized;

    static ErrorSetSpec regularized(Norm norm, Vector theta_star, double beta);
    static ErrorSetSpec constrained(Norm norm, Vector theta_star);

    Index dim() const noexcept { return theta_star.size(); }
    std::string describe() const;
};

/// Exact evaluation of the defining inequality, slack 1e-12 * (1 + rhs).
bool membership(const ErrorSetSpec& errset, const Vector& delta);

/// Largest t in [0, t_hi] with t*u in the set, found by bisection. Every ray
/// meets E_r and E_c in an interval [0, t_max] since t -> R(theta*+tu) - t R(u)/beta
/// is convex and vanishes at 0.
double ray_extent(const ErrorSetSpec& errset, const Vector& u, double t_hi);

struct CapSample {
    Matrix directions;   // p x N, unit columns
    Vector alphas;       // alphas[j] * directions.col(j) is a member of the set
    ErrorSetSpec source;
    Seed seed = 0;
    double rejection_rate = 0.0;
    std::size_t n_proposals = 0;

    Index size() const noexcept { return directions.cols(); }
    Index dim() const noexcept { return directions.rows(); }
};

struct CapSamplerOptions {
    /// Fraction of proposals drawn from the structured (sparse / group)
    /// family; the rest are uniform on the sphere.
    double structured_fraction = 0.5;
    std::size_t max_proposals = 0;  // 0 -> max(1e6, 200 * n_dirs)
};

/// Rejection sampler for directions of cone(E) on the unit sphere. A
/// proposal u is kept when t*u passes membership for some t in the grid
/// {2^-10, ..., 2^2} * ||theta*||_2. Proposal k uses substream (seed, k), so
/// the result does not depend on the thread count.
CapSample sample_cap(const ErrorSetSpec& errset, std::size_t n_dirs, Seed seed,
                     const CapSamplerOptions& opts = {});

/// Builds a cap from explicit directions (normalized here). Alphas are 1.
CapSample make_cap(const ErrorSetSpec& source, Matrix directions);

/// Cap plus extra directions appended at the end (normalized here).
CapSample append_directions(const CapSample& cap, const Matrix& extra);

struct WidthEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_mc = 0;
    Seed seed = 0;
    std::string target;
};

/// Monte-Carlo estimate of w(unit ball of R) = E[R*(g)].
WidthEstimate width_norm_ball(const Norm& norm, std::size_t n_mc, Seed seed);

/// E[max_{u in cap} <g, u>]: an inner (downward-biased) estimate of the width
/// of the continuum cap.
WidthEstimate width_cap(const CapSample& cap, std::size_t n_mc, Seed seed);
WidthEstimate width_of_directions(const Matrix& directions, std::size_t n_mc, Seed seed);

/// Closed-form cone widths at a structured point: sqrt(2 s ln(p/s) + 5 s/4)
/// for L1, sqrt(2 k (m + ln(T-k)) + k) for groups, sqrt(p) for L2.
double width_cone_analytic(const Norm& norm, const SupportSpec& structure);

/// Upper bound on w(unit ball) from the shifted-ball cone at one atom
/// (1-sparse / one active group / any unit vector for L2).
double width_ball_via_cone(const Norm& norm);

struct SandwichReport {
    WidthEstimate w_constrained;       // w(E_c  cap rho B)
    WidthEstimate w_regularized;       // w(E_r  cap rho B)
    WidthEstimate w_constrained_cone;  // w(cone(E_c) cap rho B)
    double factor = 0.0;               // 1 + 2 ||theta*|| / ((beta - 1) rho)
    double lower_slack = 0.0;          // w_r - w_c + 3 se   (>= 0 means holds)
    double upper_slack = 0.0;          // factor*w_cbar - w_r + 3 se
    bool lower_holds = false;
    bool upper_holds = false;
    std::size_t grid_size = 0;

    bool holds() const noexcept { return lower_holds && upper_holds; }
};

constexpr Index kSandwichMaxDim = 8;

/// Brute-force grid estimate of the three widths with shared Gaussian draws.
/// Throws DimensionTooLargeError when p > 8.
SandwichReport sandwich_check(const Vector& theta_star, double beta, double rho, const Norm& norm,
                              std::size_t n_mc, std::size_t grid, Seed seed);

/// Deterministic direction set on S^{p-1} used by the brute-force oracles:
/// equally spaced angles for p = 2; otherwise every normalized vector in
/// {-1,0,1}^p (when 3^p <= grid) plus seeded uniform directions up to `grid`.
Matrix sphere_grid(Index p, std::size_t grid, Seed seed);

}  // namespace normgeo
