#include "normgeo/stats.hpp"

#include "normgeo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace normgeo {

double pairwise_sum(std::span<const double> xs) {
    constexpr std::size_t kLeaf = 32;
    if (xs.size() <= kLeaf) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr out;
    const auto n = xs.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n < 2) return out;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - out.mean;
        sq[i] = d * d;
    }
    out.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(n - 1));
    out.std_error = out.sd / std::sqrt(static_cast<double>(n));
    return out;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw InputError("median of an empty sample");
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double upper_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw InputError("quantile of an empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw InputError("quantile level must lie in (0, 1]");
    std::sort(xs.begin(), xs.end());
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
    k = std::clamp<std::size_t>(k, 1, xs.size());
    return xs[k - 1];
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("fit_line: x and y differ in length");
    const auto n = x.size();
    if (n < 2) throw InputError("fit_line: need at least two points");
    const double mx = pairwise_sum(x) / static_cast<double>(n);
    const double my = pairwise_sum(y) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw InputError("fit_line: x values are all equal");
    LinearFit fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace normgeo
