#include "normgeo/compatibility.hpp"

#include "normgeo/errors.hpp"

#include <algorithm>

namespace normgeo {

CompatibilityEstimate compat_empirical(const ErrorSetSpec& errset, std::size_t n_samples, Seed seed) {
    if (n_samples < 1) throw InputError("compat_empirical needs n_samples >= 1");
    const CapSample cap = sample_cap(errset, n_samples, seed);
    CompatibilityEstimate est;
    est.n_samples = static_cast<std::size_t>(cap.size());
    est.rejection_rate = cap.rejection_rate;
    for (Index j = 0; j < cap.size(); ++j) {
        const Vector u = cap.directions.col(j);
        est.empirical_sup = std::max(est.empirical_sup, errset.norm.value(u) / u.norm());
    }
    est.analytic_bound = compat_bound(errset.norm, support_of(errset.norm, errset.theta_star));
    return est;
}

}  // namespace normgeo
