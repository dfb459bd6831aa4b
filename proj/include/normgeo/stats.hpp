#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace normgeo {

/// Pairwise (cascade) summation. The result depends only on the values and
/// their order, never on how they were produced.
double pairwise_sum(std::span<const double> xs);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
    double sd = 0.0;
};

/// Sample mean, sample standard deviation (n-1) and sd/sqrt(n).
MeanStderr mean_stderr(std::span<const double> xs);

double median(std::vector<double> xs);

/// Order-statistic quantile: the ceil(q*n)-th smallest value (q in (0,1]).
double upper_quantile(std::vector<double> xs, double q);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n_points = 0;
};

/// Ordinary least squares y ~ intercept + slope * x. Requires >= 2 points
/// with distinct x. r2 is clipped into [0, 1].
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace normgeo
