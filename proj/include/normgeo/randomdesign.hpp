#pragma once

#include "normgeo/types.hpp"

#include <string>
#include <utility>

namespace normgeo {

struct CapSample;

enum class DesignFamily { GaussianIsotropic, GaussianAnisotropic, Rademacher, UniformBounded };
enum class NoiseFamily { Gaussian, Rademacher, UniformBounded };

std::string to_string(DesignFamily f);
std::string to_string(NoiseFamily f);
DesignFamily design_family_from_string(const std::string& s);
NoiseFamily noise_family_from_string(const std::string& s);

class CovarianceSpec {
public:
    enum class Kind { Identity, AR1, Explicit };

    static CovarianceSpec identity(Index p);
    static CovarianceSpec ar1(Index p, double rho);
    /// Throws InputError unless `sigma` is symmetric positive definite.
    static CovarianceSpec explicit_matrix(Matrix sigma);
    /// Header-free, row-major CSV of a square matrix.
    static CovarianceSpec from_csv(const std::string& path);

    Kind kind() const noexcept { return kind_; }
    Index dim() const noexcept { return p_; }
    double rho() const noexcept { return rho_; }
    bool is_identity() const noexcept { return kind_ == Kind::Identity; }

    Matrix matrix() const;
    std::string describe() const;

private:
    CovarianceSpec(Kind kind, Index p, double rho, Matrix explicit_sigma)
        : kind_(kind), p_(p), rho_(rho), sigma_(std::move(explicit_sigma)) {}

    Kind kind_;
    Index p_;
    double rho_ = 0.0;
    Matrix sigma_;
};

struct DesignSpec {
    Index n = 1;
    Index p = 1;
    DesignFamily family = DesignFamily::GaussianIsotropic;
    CovarianceSpec covariance = CovarianceSpec::identity(1);
    double psi2_bound = 1.0;  // declared, reported only
    Seed seed = 0;

    /// Convenience constructor that keeps `covariance` consistent with p.
    static DesignSpec isotropic(Index n, Index p, DesignFamily family, Seed seed);
    static DesignSpec anisotropic(Index n, CovarianceSpec cov, Seed seed);

    void validate() const;
};

struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    double scale = 1.0;
    Seed seed = 0;
};

/// n x p design with i.i.d. rows; row i is drawn from substream (seed, i),
/// anisotropic rows are x_iso * Sigma^{1/2}.
Matrix sample_design(const DesignSpec& spec);

Vector sample_noise(const NoiseSpec& spec, Index n);

/// Symmetric PSD square root by eigendecomposition. Throws
/// NearSingularError if an eigenvalue is <= 1e-12.
Matrix sigma_sqrt(const CovarianceSpec& cov);
Matrix sigma_sqrt(const Matrix& sigma);

/// (inf, sup) of u' Sigma u over the cap directions. An inner approximation
/// of the restricted eigenvalues over the continuum cap.
std::pair<double, double> restricted_eigs(const CovarianceSpec& cov, const Matrix& directions);
std::pair<double, double> restricted_eigs(const CovarianceSpec& cov, const CapSample& cap);

}  // namespace normgeo
