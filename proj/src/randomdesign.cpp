#include "normgeo/randomdesign.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/geometry.hpp"
#include "normgeo/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace normgeo {

std::string to_string(DesignFamily f) {
    switch (f) {
    case DesignFamily::GaussianIsotropic: return "gaussian-iso";
    case DesignFamily::GaussianAnisotropic: return "gaussian-aniso";
    case DesignFamily::Rademacher: return "rademacher";
    case DesignFamily::UniformBounded: return "uniform";
    }
    return "unknown";
}

std::string to_string(NoiseFamily f) {
    switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Rademacher: return "rademacher";
    case NoiseFamily::UniformBounded: return "uniform";
    }
    return "unknown";
}

DesignFamily design_family_from_string(const std::string& s) {
    if (s == "gaussian-iso" || s == "gaussian") return DesignFamily::GaussianIsotropic;
    if (s == "gaussian-aniso") return DesignFamily::GaussianAnisotropic;
    if (s == "rademacher") return DesignFamily::Rademacher;
    if (s == "uniform") return DesignFamily::UniformBounded;
    throw InputError("unknown design family '" + s + "'");
}

NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseFamily::Gaussian;
    if (s == "rademacher") return NoiseFamily::Rademacher;
    if (s == "uniform") return NoiseFamily::UniformBounded;
    throw InputError("unknown noise family '" + s + "'");
}

CovarianceSpec CovarianceSpec::identity(Index p) {
    if (p < 1) throw InputError("covariance dimension must be >= 1");
    return CovarianceSpec(Kind::Identity, p, 0.0, Matrix());
}

CovarianceSpec CovarianceSpec::ar1(Index p, double rho) {
    if (p < 1) throw InputError("covariance dimension must be >= 1");
    if (!(rho > -1.0 && rho < 1.0)) throw InputError("AR1 correlation must lie in (-1, 1)");
    return CovarianceSpec(Kind::AR1, p, rho, Matrix());
}

CovarianceSpec CovarianceSpec::explicit_matrix(Matrix sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
        throw InputError("explicit covariance must be a nonempty square matrix");
    if (!sigma.allFinite()) throw InputError("explicit covariance has non-finite entries");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InputError("explicit covariance is not symmetric");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw InputError("explicit covariance is not positive definite");
    const Index p = sigma.rows();
    return CovarianceSpec(Kind::Explicit, p, 0.0, std::move(sigma));
}

CovarianceSpec CovarianceSpec::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open covariance file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("covariance file '" + path + "': bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const auto p = static_cast<Index>(rows.size());
    Matrix sigma(p, p);
    for (Index i = 0; i < p; ++i) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != p)
            throw InputError("covariance file '" + path + "' is not square");
        for (Index j = 0; j < p; ++j) sigma(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return explicit_matrix(std::move(sigma));
}

Matrix CovarianceSpec::matrix() const {
    switch (kind_) {
    case Kind::Identity: return Matrix::Identity(p_, p_);
    case Kind::AR1: {
        Matrix s(p_, p_);
        for (Index i = 0; i < p_; ++i)
            for (Index j = 0; j < p_; ++j) s(i, j) = std::pow(rho_, static_cast<double>(std::abs(i - j)));
        return s;
    }
    case Kind::Explicit: return sigma_;
    }
    return {};
}

std::string CovarianceSpec::describe() const {
    switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::AR1: {
        std::ostringstream os;
        os.precision(17);
        os << "ar1(" << rho_ << ")";
        return os.str();
    }
    case Kind::Explicit: return "explicit";
    }
    return "unknown";
}

DesignSpec DesignSpec::isotropic(Index n, Index p, DesignFamily family, Seed seed) {
    DesignSpec d;
    d.n = n;
    d.p = p;
    d.family = family;
    d.covariance = CovarianceSpec::identity(std::max<Index>(p, 1));
    d.seed = seed;
    return d;
}

DesignSpec DesignSpec::anisotropic(Index n, CovarianceSpec cov, Seed seed) {
    DesignSpec d;
    d.n = n;
    d.p = cov.dim();
    d.family = DesignFamily::GaussianAnisotropic;
    d.covariance = std::move(cov);
    d.seed = seed;
    return d;
}

void DesignSpec::validate() const {
    if (n < 1 || p < 1) throw InputError("design needs n >= 1 and p >= 1");
    if (covariance.dim() != p) throw InputError("covariance dimension does not match p");
    if (family != DesignFamily::GaussianAnisotropic && !covariance.is_identity())
        throw InputError("non-identity covariance requires the gaussian-aniso family");
}

namespace {

void fill_row(DesignFamily family, Engine& eng, double* out, Index p, Index stride) {
    switch (family) {
    case DesignFamily::GaussianIsotropic:
    case DesignFamily::GaussianAnisotropic: {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index j = 0; j < p; ++j) out[j * stride] = normal(eng);
        break;
    }
    case DesignFamily::Rademacher:
        for (Index j = 0; j < p; ++j) out[j * stride] = (eng() >> 63) ? 1.0 : -1.0;
        break;
    case DesignFamily::UniformBounded: {
        const double a = std::sqrt(3.0);
        std::uniform_real_distribution<double> unif(-a, a);
        for (Index j = 0; j < p; ++j) out[j * stride] = unif(eng);
        break;
    }
    }
}

}  // namespace

Matrix sample_design(const DesignSpec& spec) {
    spec.validate();
    const Index n = spec.n, p = spec.p;
    Matrix X(n, p);
    double* data = X.data();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        Engine eng = substream(spec.seed, static_cast<std::uint64_t>(i));
        fill_row(spec.family, eng, data + i, p, n);
    }
    if (spec.family == DesignFamily::GaussianAnisotropic && !spec.covariance.is_identity()) {
        const Matrix root = sigma_sqrt(spec.covariance);
        X = (X * root).eval();
    }
    return X;
}

Vector sample_noise(const NoiseSpec& spec, Index n) {
    if (n < 1) throw InputError("noise length must be >= 1");
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) throw InputError("noise scale must be > 0");
    constexpr Index kChunk = 4096;
    const Index chunks = (n + kChunk - 1) / kChunk;
    Vector w(n);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < chunks; ++c) {
        Engine eng = substream(spec.seed, static_cast<std::uint64_t>(c));
        const Index lo = c * kChunk, hi = std::min(n, lo + kChunk);
        switch (spec.family) {
        case NoiseFamily::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Index i = lo; i < hi; ++i) w[i] = spec.scale * normal(eng);
            break;
        }
        case NoiseFamily::Rademacher:
            for (Index i = lo; i < hi; ++i) w[i] = (eng() >> 63) ? spec.scale : -spec.scale;
            break;
        case NoiseFamily::UniformBounded: {
            const double a = std::sqrt(3.0);
            std::uniform_real_distribution<double> unif(-a, a);
            for (Index i = lo; i < hi; ++i) w[i] = spec.scale * unif(eng);
            break;
        }
        }
    }
    return w;
}

Matrix sigma_sqrt(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols()) throw InputError("sigma_sqrt needs a square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success) throw NearSingularError("eigendecomposition failed");
    const Vector& ev = eig.eigenvalues();
    if (ev.minCoeff() <= 1e-12)
        throw NearSingularError("covariance is near-singular (smallest eigenvalue " +
                                std::to_string(ev.minCoeff()) + ")");
    const Matrix& V = eig.eigenvectors();
    Matrix root = V * ev.cwiseSqrt().asDiagonal() * V.transpose();
    return 0.5 * (root + root.transpose());
}

Matrix sigma_sqrt(const CovarianceSpec& cov) {
    if (cov.is_identity()) return Matrix::Identity(cov.dim(), cov.dim());
    return sigma_sqrt(cov.matrix());
}

std::pair<double, double> restricted_eigs(const CovarianceSpec& cov, const Matrix& directions) {
    if (directions.cols() == 0) throw InputError("restricted_eigs: empty cap");
    if (directions.rows() != cov.dim()) throw InputError("restricted_eigs: cap dimension does not match covariance");
    const Matrix sigma = cov.matrix();
    const Matrix su = sigma * directions;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index j = 0; j < directions.cols(); ++j) {
        const double q = directions.col(j).dot(su.col(j));
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

std::pair<double, double> restricted_eigs(const CovarianceSpec& cov, const CapSample& cap) {
    return restricted_eigs(cov, cap.directions);
}

}  // namespace normgeo
