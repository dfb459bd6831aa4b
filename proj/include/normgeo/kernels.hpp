#pragma once

#include "normgeo/norms.hpp"
#include "normgeo/types.hpp"

#include <cstddef>
#include <vector>

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference in `serial`; both produce bitwise-identical output for any
// thread count because every draw / direction is computed independently
// from its own substream and results are written to fixed slots.
namespace normgeo::kernels {

/// out[i] = R*(g_i), g_i ~ N(0, I_p) from substream (seed, i).
std::vector<double> dual_norm_draws(const Norm& norm, std::size_t n_mc, Seed seed);

/// out[i] = max_j <g_i, directions.col(j)>, g_i from substream (seed, i).
std::vector<double> cap_sup_draws(const Matrix& directions, std::size_t n_mc, Seed seed);

/// out[j] = (1/n) ||X directions.col(j)||^2.
Vector quad_forms(const Matrix& X, const Matrix& directions);

/// Column block width used by quad_forms and cap_sup_draws; every block is
/// evaluated at this fixed width (zero-padded) so each entry's floating-point
/// evaluation is independent of the total number of directions.
inline constexpr Index kBlock = 32;

namespace serial {
std::vector<double> dual_norm_draws(const Norm& norm, std::size_t n_mc, Seed seed);
std::vector<double> cap_sup_draws(const Matrix& directions, std::size_t n_mc, Seed seed);
Vector quad_forms(const Matrix& X, const Matrix& directions);
}  // namespace serial

}  // namespace normgeo::kernels
