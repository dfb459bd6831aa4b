#pragma once

#include "normgeo/geometry.hpp"

#include <optional>

namespace normgeo {

struct CompatibilityEstimate {
    std::optional<double> analytic_bound;  // absent when no closed form applies
    double empirical_sup = 0.0;            // max R(u)/||u||_2 over sampled members
    std::size_t n_samples = 0;
    double rejection_rate = 0.0;
};

/// Empirical norm-compatibility constant of the error set, from n_samples
/// cap directions, alongside the decomposable-norm bound when it applies.
CompatibilityEstimate compat_empirical(const ErrorSetSpec& errset, std::size_t n_samples, Seed seed);

}  // namespace normgeo
