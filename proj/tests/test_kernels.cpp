#include <doctest.h>

#include "normgeo/geometry.hpp"
#include "normgeo/kernels.hpp"
#include "normgeo/report.hpp"
#include "normgeo/rng.hpp"

#include <cstring>

using namespace normgeo;

namespace {

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bytes(const Vector& a, const Vector& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

Matrix random_matrix(Index r, Index c, Seed s) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j) m.col(j) = gaussian_vector(s, static_cast<std::uint64_t>(j), r);
    return m;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    const Matrix dirs = random_matrix(17, 101, 3).colwise().normalized();
    const Matrix X = random_matrix(203, 17, 4);
    for (int threads : {1, 2, 3, 8}) {
        set_thread_count(threads);
        for (const Norm& n : {Norm::l1(17), Norm::l2(17), Norm::linf(17), Norm::group(GroupPartition::contiguous(17, 4))})
            CHECK(same_bytes(kernels::dual_norm_draws(n, 1001, 5), kernels::serial::dual_norm_draws(n, 1001, 5)));
        CHECK(same_bytes(kernels::cap_sup_draws(dirs, 777, 6), kernels::serial::cap_sup_draws(dirs, 777, 6)));
        CHECK(same_bytes(kernels::quad_forms(X, dirs), kernels::serial::quad_forms(X, dirs)));
    }
    set_thread_count(0);
}

TEST_CASE("kernels agree with direct formulas") {
    const Matrix X = random_matrix(50, 6, 7);
    const Matrix dirs = random_matrix(6, 40, 8).colwise().normalized();
    const Vector q = kernels::quad_forms(X, dirs);
    for (Index j = 0; j < dirs.cols(); ++j)
        CHECK(q[j] == doctest::Approx((X * dirs.col(j)).squaredNorm() / 50.0).epsilon(1e-12));

    const Norm n = Norm::l1(6);
    const auto d = kernels::dual_norm_draws(n, 10, 9);
    const auto s = kernels::cap_sup_draws(dirs, 10, 9);
    for (std::size_t k = 0; k < 10; ++k) {
        const Vector g = gaussian_vector(9, k, 6);
        CHECK(d[k] == doctest::Approx(n.dual_value(g)).epsilon(1e-14));
        CHECK(s[k] == doctest::Approx((g.transpose() * dirs).maxCoeff()).epsilon(1e-12));
    }
}

TEST_CASE("width estimates do not depend on the thread count") {
    const auto es = ErrorSetSpec::regularized(Norm::l1(30), Vector::Unit(30, 0), 2.0);
    set_thread_count(1);
    const CapSample a = sample_cap(es, 200, 3);
    const auto wa = width_cap(a, 5000, 4);
    set_thread_count(4);
    const CapSample b = sample_cap(es, 200, 3);
    const auto wb = width_cap(b, 5000, 4);
    set_thread_count(0);
    CHECK(std::memcmp(a.directions.data(), b.directions.data(), sizeof(double) * static_cast<std::size_t>(a.directions.size())) == 0);
    CHECK(wa.mean == wb.mean);
    CHECK(wa.std_error == wb.std_error);
}

}  // TEST_SUITE
