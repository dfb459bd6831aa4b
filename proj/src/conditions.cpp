#include "normgeo/conditions.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/kernels.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace normgeo {

double ConditionReport::deviation() const noexcept {
    return std::max(std::abs(inf_q - 1.0), std::abs(sup_q - 1.0));
}

ConditionReport re_statistic(const Matrix& X, const Matrix& directions) {
    if (directions.cols() == 0) throw InputError("re_statistic: empty cap");
    const Vector q = kernels::quad_forms(X, directions);
    ConditionReport rep;
    rep.inf_q = q.minCoeff();
    rep.sup_q = q.maxCoeff();
    rep.rsc_kappa = rep.inf_q;
    rep.n = X.rows();
    rep.passed = rep.inf_q > 0.0;
    return rep;
}

ConditionReport re_statistic(const Matrix& X, const CapSample& cap) { return re_statistic(X, cap.directions); }

EnvelopeFit rip_envelope(const std::vector<ConditionReport>& reports) {
    std::map<Index, std::vector<const ConditionReport*>> by_n;
    for (const auto& r : reports) by_n[r.n].push_back(&r);
    if (by_n.size() < 4) throw InputError("rip_envelope needs reports at >= 4 distinct n");

    EnvelopeFit fit;
    std::vector<double> log_n, log_dev, c_values;
    for (const auto& [n, rs] : by_n) {
        std::vector<double> devs, ws;
        for (const auto* r : rs) {
            devs.push_back(r->deviation());
            ws.push_back(r->w_hat);
        }
        const double dev = median(devs);
        const double w = median(ws);
        if (!(dev > 0.0)) {
            fit.warnings.push_back("n=" + std::to_string(n) + ": zero deviation excluded from the log fit");
            continue;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_dev.push_back(std::log(dev));
        if (w > 0.0) c_values.push_back(dev * std::sqrt(static_cast<double>(n)) / w);
    }
    if (log_n.size() < 2) throw InputError("rip_envelope: fewer than two usable grid points");
    const auto lf = fit_line(log_n, log_dev);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r2 = lf.r2;
    fit.n_points = lf.n_points;
    fit.c = c_values.empty() ? 0.0 : median(c_values);
    return fit;
}

ConditionReport aniso_re_check(const Matrix& X, const CapSample& cap, const CovarianceSpec& cov, double c,
                               double w_hat) {
    ConditionReport rep = re_statistic(X, cap);
    const auto [lmin, lmax] = restricted_eigs(cov, cap);
    if (!(lmin > 0.0)) throw std::logic_error("restricted minimum eigenvalue of a PD covariance is not positive");
    rep.lambda_min = lmin;
    rep.lambda_max = lmax;
    rep.w_hat = w_hat;
    rep.envelope_c = c;
    const Vector q = kernels::quad_forms(X, cap.directions);
    const Matrix sigma = cov.matrix();
    double nd = 0.0;
    for (Index j = 0; j < cap.size(); ++j) {
        const double quad = cap.directions.col(j).dot(sigma * cap.directions.col(j));
        nd = std::max(nd, std::abs(q[j] / quad - 1.0));
    }
    rep.normalized_dev = nd;
    const double rate = c * w_hat / std::sqrt(static_cast<double>(X.rows()));
    rep.passed = lmin * (1.0 - rate) <= rep.inf_q && rep.sup_q <= lmax * (1.0 + rate);
    return rep;
}

ConditionReport rsc_glm_statistic(const LossObject& loss, const Matrix& X, const Vector& theta_star,
                                  const CapSample& cap, const GlmCurvature& curvature) {
    if (cap.size() == 0) throw InputError("rsc_glm_statistic: empty cap");
    if (cap.dim() != X.cols() || theta_star.size() != X.cols())
        throw InputError("rsc_glm_statistic: dimension mismatch between design, theta* and cap");
    const Index n = X.rows();
    const Index N = cap.size();
    const double T = curvature.T;
    const double floor_scale = loss.convention_factor() * curvature.ell / (2.0 * static_cast<double>(n));
    const Vector eta = X * theta_star;

    Vector exact(N), floor(N), quad(N), exceed(N);
    std::vector<std::size_t> clamped(static_cast<std::size_t>(N), 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (Index j = 0; j < N; ++j) {
        const Vector v = X * cap.directions.col(j);
        exact[j] = bregman(loss, eta, v);
        std::vector<double> terms(static_cast<std::size_t>(n));
        std::size_t out = 0;
        for (Index i = 0; i < n; ++i) {
            const bool keep = std::abs(eta[i]) < T && std::abs(v[i]) < T;
            terms[static_cast<std::size_t>(i)] = keep ? v[i] * v[i] : 0.0;
            out += std::abs(v[i]) > T ? 1 : 0;
        }
        floor[j] = floor_scale * pairwise_sum(terms);
        quad[j] = v.squaredNorm() / static_cast<double>(n);
        exceed[j] = static_cast<double>(out) / static_cast<double>(n);
        clamped[static_cast<std::size_t>(j)] = count_clamped(loss, eta + v);
    }

    ConditionReport rep;
    rep.n = n;
    rep.inf_q = quad.minCoeff();
    rep.sup_q = quad.maxCoeff();
    rep.rsc_kappa = exact.minCoeff();
    rep.floor_inf = floor.minCoeff();
    rep.min_gap = (exact - floor).minCoeff();
    rep.eps1_empirical = exceed.maxCoeff();
    std::size_t over = 0;
    for (Index i = 0; i < n; ++i) over += std::abs(eta[i]) > T ? 1 : 0;
    rep.eps2_empirical = static_cast<double>(over) / static_cast<double>(n);
    for (auto c : clamped) rep.clamped += c;
    if (rep.clamped > 0)
        rep.warnings.push_back(std::to_string(rep.clamped) + " linear predictors clamped to +-" +
                               std::to_string(loss.clamp) + " inside exp");
    if (rep.min_gap < -1e-10) {
        std::ostringstream os;
        os.precision(17);
        os << "exact Bregman increment fell below the truncated floor by " << -rep.min_gap;
        throw std::logic_error(os.str());
    }
    rep.passed = rep.rsc_kappa > 0.0;
    return rep;
}

Index phase_transition_n0(const std::function<double(Index)>& stat, double threshold, Index n_lo, Index n_hi) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw InputError("threshold must lie in (0, 1)");
    if (n_lo < 1 || n_hi <= n_lo) throw InputError("n range must satisfy 1 <= n_lo < n_hi");
    if (stat(n_hi) < threshold) {
        std::ostringstream os;
        os << "no crossing of threshold " << threshold << " in [" << n_lo << ", " << n_hi
           << "]: statistic stays below at n_hi";
        throw BracketError(os.str());
    }
    if (stat(n_lo) >= threshold) {
        std::ostringstream os;
        os << "threshold " << threshold << " already reached at n_lo=" << n_lo << "; widen the bracket downward";
        throw BracketError(os.str());
    }
    Index lo = n_lo, hi = n_hi;  // stat(lo) < threshold <= stat(hi)
    while (hi - lo > 1) {
        const Index mid = lo + (hi - lo) / 2;
        if (stat(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double median_inf_q(const DesignSpec& base, const Matrix& directions, Index n, std::size_t seeds, Seed base_seed) {
    if (seeds < 1) throw InputError("median_inf_q needs at least one seed");
    std::vector<double> vals(seeds);
    for (std::size_t k = 0; k < seeds; ++k) {
        DesignSpec d = base;
        d.n = n;
        d.seed = derive_seed(base_seed, k);
        vals[k] = re_statistic(sample_design(d), directions).inf_q;
    }
    return median(vals);
}

}  // namespace normgeo
