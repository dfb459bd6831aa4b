#include "normgeo/kernels.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/rng.hpp"

#include <algorithm>
#include <limits>

namespace normgeo::kernels {

namespace {

// Gaussian draws for block b: columns are draws b*kBlock .. b*kBlock+kBlock-1
// (zero columns past n_mc).
Matrix gaussian_block(Index p, std::size_t n_mc, std::size_t block, Seed seed) {
    Matrix G = Matrix::Zero(p, kBlock);
    for (Index c = 0; c < kBlock; ++c) {
        const std::size_t i = block * static_cast<std::size_t>(kBlock) + static_cast<std::size_t>(c);
        if (i >= n_mc) break;
        Engine eng = substream(seed, i);
        fill_gaussian(eng, G.col(c));
    }
    return G;
}

Matrix padded_block(const Matrix& directions, Index block) {
    const Index lo = block * kBlock;
    const Index w = std::min<Index>(kBlock, directions.cols() - lo);
    Matrix U = Matrix::Zero(directions.rows(), kBlock);
    U.leftCols(w) = directions.middleCols(lo, w);
    return U;
}

void cap_sup_block(const Matrix& directions, std::size_t n_mc, Seed seed, std::size_t block,
                   std::vector<double>& out) {
    const Index p = directions.rows();
    const Matrix G = gaussian_block(p, n_mc, block, seed);
    std::vector<double> best(static_cast<std::size_t>(kBlock), -std::numeric_limits<double>::infinity());
    const Index nblocks = (directions.cols() + kBlock - 1) / kBlock;
    for (Index d = 0; d < nblocks; ++d) {
        const Matrix U = padded_block(directions, d);
        const Matrix S = U.transpose() * G;  // kBlock directions x kBlock draws
        const Index w = std::min<Index>(kBlock, directions.cols() - d * kBlock);
        for (Index c = 0; c < kBlock; ++c)
            for (Index r = 0; r < w; ++r)
                best[static_cast<std::size_t>(c)] = std::max(best[static_cast<std::size_t>(c)], S(r, c));
    }
    for (Index c = 0; c < kBlock; ++c) {
        const std::size_t i = block * static_cast<std::size_t>(kBlock) + static_cast<std::size_t>(c);
        if (i >= n_mc) break;
        out[i] = best[static_cast<std::size_t>(c)];
    }
}

void quad_block(const Matrix& X, const Matrix& directions, Index block, Vector& out) {
    const Matrix U = padded_block(directions, block);
    const Matrix XU = X * U;
    const Index lo = block * kBlock;
    const Index w = std::min<Index>(kBlock, directions.cols() - lo);
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (Index c = 0; c < w; ++c) out[lo + c] = XU.col(c).squaredNorm() * inv_n;
}

void check_quad_args(const Matrix& X, const Matrix& directions) {
    if (X.cols() != directions.rows())
        throw InputError("cap dimension " + std::to_string(directions.rows()) +
                         " does not match design columns " + std::to_string(X.cols()));
    if (X.rows() < 1) throw InputError("design has no rows");
}

}  // namespace

std::vector<double> dual_norm_draws(const Norm& norm, std::size_t n_mc, Seed seed) {
    std::vector<double> out(n_mc);
    const auto n = static_cast<std::int64_t>(n_mc);
#pragma omp parallel
    {
        Vector g(norm.dim());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            Engine eng = substream(seed, static_cast<std::uint64_t>(i));
            fill_gaussian(eng, g);
            out[static_cast<std::size_t>(i)] = norm.dual_value(g);
        }
    }
    return out;
}

std::vector<double> cap_sup_draws(const Matrix& directions, std::size_t n_mc, Seed seed) {
    if (directions.cols() == 0) throw InputError("cap is empty");
    std::vector<double> out(n_mc);
    const auto nblocks = static_cast<std::int64_t>((n_mc + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < nblocks; ++b)
        cap_sup_block(directions, n_mc, seed, static_cast<std::size_t>(b), out);
    return out;
}

Vector quad_forms(const Matrix& X, const Matrix& directions) {
    check_quad_args(X, directions);
    Vector out(directions.cols());
    const Index nblocks = (directions.cols() + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
    for (Index b = 0; b < nblocks; ++b) quad_block(X, directions, b, out);
    return out;
}

namespace serial {

std::vector<double> dual_norm_draws(const Norm& norm, std::size_t n_mc, Seed seed) {
    std::vector<double> out(n_mc);
    Vector g(norm.dim());
    for (std::size_t i = 0; i < n_mc; ++i) {
        Engine eng = substream(seed, i);
        fill_gaussian(eng, g);
        out[i] = norm.dual_value(g);
    }
    return out;
}

std::vector<double> cap_sup_draws(const Matrix& directions, std::size_t n_mc, Seed seed) {
    if (directions.cols() == 0) throw InputError("cap is empty");
    std::vector<double> out(n_mc);
    const std::size_t nblocks = (n_mc + kBlock - 1) / kBlock;
    for (std::size_t b = 0; b < nblocks; ++b) cap_sup_block(directions, n_mc, seed, b, out);
    return out;
}

Vector quad_forms(const Matrix& X, const Matrix& directions) {
    check_quad_args(X, directions);
    Vector out(directions.cols());
    const Index nblocks = (directions.cols() + kBlock - 1) / kBlock;
    for (Index b = 0; b < nblocks; ++b) quad_block(X, directions, b, out);
    return out;
}

}  // namespace serial

}  // namespace normgeo::kernels
