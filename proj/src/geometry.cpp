#include "normgeo/geometry.hpp"

#include "normgeo/errors.hpp"
#include "normgeo/kernels.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace normgeo {

ErrorSetSpec ErrorSetSpec::regularized(Norm norm, Vector theta_star, double beta) {
    if (theta_star.size() != norm.dim()) throw InputError("theta* dimension does not match the norm");
    if (std::isinf(beta) && beta > 0.0) return constrained(std::move(norm), std::move(theta_star));
    if (!(beta > 1.0)) throw InputError("beta must be > 1");
    return ErrorSetSpec{std::move(theta_star), beta, std::move(norm), ErrorSetVariant::Regularized};
}

ErrorSetSpec ErrorSetSpec::constrained(Norm norm, Vector theta_star) {
    if (theta_star.size() != norm.dim()) throw InputError("theta* dimension does not match the norm");
    return ErrorSetSpec{std::move(theta_star), std::numeric_limits<double>::infinity(), std::move(norm),
                        ErrorSetVariant::Constrained};
}

std::string ErrorSetSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (variant == ErrorSetVariant::Constrained)
        os << "E_c(" << norm.describe() << ")";
    else
        os << "E_r(" << norm.describe() << ", beta=" << beta << ")";
    os << " |theta*|_2=" << theta_star.norm();
    return os.str();
}

bool membership(const ErrorSetSpec& errset, const Vector& delta) {
    const double base = errset.norm.value(errset.theta_star);
    const double lhs = errset.norm.value(errset.theta_star + delta);
    double rhs = base;
    if (errset.variant == ErrorSetVariant::Regularized) rhs += errset.norm.value(delta) / errset.beta;
    return lhs <= rhs + 1e-12 * (1.0 + rhs);
}

double ray_extent(const ErrorSetSpec& errset, const Vector& u, double t_hi) {
    if (!(t_hi > 0.0)) return 0.0;
    if (membership(errset, t_hi * u)) return t_hi;
    double lo = 0.0, hi = t_hi;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (membership(errset, mid * u))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace {

std::vector<Index> draw_subset(Engine& eng, std::vector<Index> pool, Index k) {
    k = std::min<Index>(k, static_cast<Index>(pool.size()));
    for (Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(eng)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

Index uniform_count(Engine& eng, Index lo, Index hi) {
    if (hi <= lo) return lo;
    std::uniform_int_distribution<Index> d(lo, hi);
    return d(eng);
}

// Structured proposal: a few "active" units (coordinates, or groups for the
// group norm) from theta*'s support plus a few inactive ones.
Vector structured_proposal(const ErrorSetSpec& es, Engine& eng) {
    const Index p = es.dim();
    Vector u = Vector::Zero(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    const bool signs = (eng() >> 63) != 0;
    auto fill = [&](Index i) { u[i] = signs ? ((eng() >> 63) ? 1.0 : -1.0) : normal(eng); };

    if (es.norm.kind() == NormKind::GroupL2) {
        const auto& groups = es.norm.partition()->groups();
        std::vector<Index> active, inactive;
        for (Index t = 0; t < static_cast<Index>(groups.size()); ++t) {
            bool on = false;
            for (Index i : groups[static_cast<std::size_t>(t)]) on = on || es.theta_star[i] != 0.0;
            (on ? active : inactive).push_back(t);
        }
        const auto s = static_cast<Index>(active.size());
        const Index k_in = s > 0 ? uniform_count(eng, 1, s) : 0;
        Index k_out = uniform_count(eng, s > 0 ? 0 : 1, std::max<Index>(1, s));
        for (Index t : draw_subset(eng, active, k_in))
            for (Index i : groups[static_cast<std::size_t>(t)]) fill(i);
        for (Index t : draw_subset(eng, inactive, k_out))
            for (Index i : groups[static_cast<std::size_t>(t)]) fill(i);
    } else {
        std::vector<Index> on, off;
        for (Index i = 0; i < p; ++i) (es.theta_star[i] != 0.0 ? on : off).push_back(i);
        const auto s = static_cast<Index>(on.size());
        const Index k_in = s > 0 ? uniform_count(eng, 1, s) : 0;
        const Index k_out = uniform_count(eng, s > 0 ? 0 : 1, std::max<Index>(1, s));
        for (Index i : draw_subset(eng, on, k_in)) fill(i);
        for (Index i : draw_subset(eng, off, k_out)) fill(i);
    }
    return u;
}

struct Proposal {
    Vector u;
    double alpha = 0.0;  // 0 means rejected
};

Proposal make_proposal(const ErrorSetSpec& es, Seed seed, std::uint64_t k, double structured_fraction,
                       const std::vector<double>& t_grid) {
    Engine eng = substream(seed, k);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Proposal prop;
    if (unif(eng) < structured_fraction) {
        prop.u = structured_proposal(es, eng);
    } else {
        prop.u.resize(es.dim());
        fill_gaussian(eng, prop.u);
    }
    const double r = prop.u.norm();
    if (!(r > 0.0)) return prop;
    prop.u /= r;
    for (auto it = t_grid.rbegin(); it != t_grid.rend(); ++it) {
        if (membership(es, *it * prop.u)) {
            prop.alpha = *it;
            break;
        }
    }
    return prop;
}

}  // namespace

CapSample sample_cap(const ErrorSetSpec& errset, std::size_t n_dirs, Seed seed, const CapSamplerOptions& opts) {
    if (n_dirs < 1) throw InputError("sample_cap needs n_dirs >= 1");
    if (!(opts.structured_fraction >= 0.0 && opts.structured_fraction <= 1.0))
        throw InputError("structured_fraction must lie in [0, 1]");
    const std::size_t budget =
        opts.max_proposals > 0 ? opts.max_proposals : std::max<std::size_t>(1000000, 200 * n_dirs);

    const double theta_norm = errset.theta_star.norm();
    const double scale = theta_norm > 0.0 ? theta_norm : 1.0;
    std::vector<double> t_grid;
    for (int k = -10; k <= 2; ++k) t_grid.push_back(std::ldexp(scale, k));

    const Index p = errset.dim();
    std::vector<Vector> accepted;
    std::vector<double> alphas;
    accepted.reserve(n_dirs);
    std::size_t consumed = 0;
    constexpr std::size_t kBatch = 2048;
    std::vector<Proposal> batch(kBatch);

    while (accepted.size() < n_dirs && consumed < budget) {
        const std::size_t count = std::min(kBatch, budget - consumed);
        const auto count_i = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < count_i; ++b)
            batch[static_cast<std::size_t>(b)] =
                make_proposal(errset, seed, consumed + static_cast<std::uint64_t>(b), opts.structured_fraction, t_grid);
        for (std::size_t b = 0; b < count && accepted.size() < n_dirs; ++b) {
            ++consumed;
            if (batch[b].alpha > 0.0) {
                accepted.push_back(std::move(batch[b].u));
                alphas.push_back(batch[b].alpha);
            }
        }
    }
    if (accepted.empty()) {
        std::ostringstream os;
        os << "cap sampler accepted 0 of " << consumed << " proposals for " << errset.describe()
           << "; the error cone is (numerically) degenerate";
        throw DegenerateSetError(os.str());
    }

    CapSample cap{Matrix(p, static_cast<Index>(accepted.size())), Vector(static_cast<Index>(alphas.size())),
                  errset, seed, 0.0, consumed};
    for (std::size_t j = 0; j < accepted.size(); ++j) {
        cap.directions.col(static_cast<Index>(j)) = accepted[j];
        cap.alphas[static_cast<Index>(j)] = alphas[j];
    }
    cap.rejection_rate = 1.0 - static_cast<double>(accepted.size()) / static_cast<double>(consumed);
    return cap;
}

CapSample make_cap(const ErrorSetSpec& source, Matrix directions) {
    if (directions.rows() != source.dim()) throw InputError("cap directions have the wrong dimension");
    for (Index j = 0; j < directions.cols(); ++j) {
        const double r = directions.col(j).norm();
        if (!(r > 0.0)) throw InputError("cap directions must be nonzero");
        directions.col(j) /= r;
    }
    const Index n = directions.cols();
    return CapSample{std::move(directions), Vector::Zero(n), source, 0, 0.0, static_cast<std::size_t>(n)};
}

CapSample append_directions(const CapSample& cap, const Matrix& extra) {
    if (extra.rows() != cap.dim()) throw InputError("appended directions have the wrong dimension");
    CapSample out = cap;
    const Index n0 = cap.size();
    out.directions.conservativeResize(Eigen::NoChange, n0 + extra.cols());
    out.alphas.conservativeResize(n0 + extra.cols());
    for (Index j = 0; j < extra.cols(); ++j) {
        const double r = extra.col(j).norm();
        if (!(r > 0.0)) throw InputError("appended directions must be nonzero");
        out.directions.col(n0 + j) = extra.col(j) / r;
        out.alphas[n0 + j] = 0.0;
    }
    return out;
}

WidthEstimate width_norm_ball(const Norm& norm, std::size_t n_mc, Seed seed) {
    if (n_mc < 2) throw InputError("width estimation needs n_mc >= 2");
    const auto draws = kernels::dual_norm_draws(norm, n_mc, seed);
    const auto ms = mean_stderr(draws);
    return WidthEstimate{ms.mean, ms.std_error, n_mc, seed, "unit-ball " + norm.describe()};
}

WidthEstimate width_of_directions(const Matrix& directions, std::size_t n_mc, Seed seed) {
    if (n_mc < 2) throw InputError("width estimation needs n_mc >= 2");
    if (directions.cols() == 0) throw InputError("width of an empty cap");
    const auto draws = kernels::cap_sup_draws(directions, n_mc, seed);
    const auto ms = mean_stderr(draws);
    return WidthEstimate{ms.mean, ms.std_error, n_mc, seed,
                         "directions n_dirs=" + std::to_string(directions.cols())};
}

WidthEstimate width_cap(const CapSample& cap, std::size_t n_mc, Seed seed) {
    auto w = width_of_directions(cap.directions, n_mc, seed);
    std::ostringstream os;
    os.precision(6);
    os << "cap " << cap.source.describe() << " n_dirs=" << cap.size() << " rejection_rate=" << cap.rejection_rate;
    w.target = os.str();
    return w;
}

double width_cone_analytic(const Norm& norm, const SupportSpec& structure) {
    switch (norm.kind()) {
    case NormKind::L1: {
        const auto s = static_cast<double>(structure.s);
        const auto p = static_cast<double>(norm.dim());
        if (structure.s < 1 || structure.s >= norm.dim())
            throw InputError("cone width needs 1 <= s < p (got s=" + std::to_string(structure.s) + ")");
        return std::sqrt(2.0 * s * std::log(p / s) + 1.25 * s);
    }
    case NormKind::GroupL2: {
        const Index T = norm.partition()->count();
        const auto k = static_cast<double>(structure.s_groups);
        const auto m = static_cast<double>(norm.partition()->max_size());
        if (structure.s_groups < 1 || structure.s_groups >= T)
            throw InputError("cone width needs 1 <= k < T (got k=" + std::to_string(structure.s_groups) + ")");
        return std::sqrt(2.0 * k * (m + std::log(static_cast<double>(T) - k)) + k);
    }
    case NormKind::L2: return std::sqrt(static_cast<double>(norm.dim()));
    case NormKind::Linf: break;
    }
    throw UnsupportedError("no closed-form cone width for " + norm.describe());
}

double width_ball_via_cone(const Norm& norm) {
    // The shifted-ball cone G is intersected with a ball of radius
    // rho(theta~) (2 for one atom of L1 / group, 1 for L2); normalizing by
    // that radius leaves the unit-cap width at a single atom.
    SupportSpec one;
    one.s = 1;
    one.s_groups = 1;
    switch (norm.kind()) {
    case NormKind::L1:
    case NormKind::GroupL2: {
        const double rho = 2.0;
        return rho * width_cone_analytic(norm, one) / rho;
    }
    case NormKind::L2: return width_cone_analytic(norm, one);
    case NormKind::Linf: break;
    }
    throw UnsupportedError("width_ball_via_cone supports l1, group and l2 norms only");
}

Matrix sphere_grid(Index p, std::size_t grid, Seed seed) {
    if (p < 1) throw InputError("sphere_grid needs p >= 1");
    if (p == 1) {
        Matrix d(1, 2);
        d << 1.0, -1.0;
        return d;
    }
    if (grid < 1) throw InputError("sphere_grid needs grid >= 1");
    if (p == 2) {
        Matrix d(2, static_cast<Index>(grid));
        for (std::size_t k = 0; k < grid; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
            d(0, static_cast<Index>(k)) = std::cos(a);
            d(1, static_cast<Index>(k)) = std::sin(a);
        }
        return d;
    }
    std::vector<Vector> dirs;
    std::size_t lattice = 1;
    for (Index i = 0; i < p; ++i) lattice *= 3;
    if (lattice - 1 <= grid) {
        for (std::size_t code = 1; code < lattice; ++code) {
            Vector v(p);
            std::size_t c = code;
            for (Index i = 0; i < p; ++i) {
                v[i] = static_cast<double>(static_cast<int>(c % 3) - 1);
                c /= 3;
            }
            dirs.push_back(v / v.norm());
        }
    }
    for (std::size_t k = 0; dirs.size() < grid; ++k) {
        Vector g = gaussian_vector(seed, k, p);
        dirs.push_back(g / g.norm());
    }
    Matrix d(p, static_cast<Index>(dirs.size()));
    for (std::size_t j = 0; j < dirs.size(); ++j) d.col(static_cast<Index>(j)) = dirs[j];
    return d;
}

SandwichReport sandwich_check(const Vector& theta_star, double beta, double rho, const Norm& norm,
                              std::size_t n_mc, std::size_t grid, Seed seed) {
    const Index p = theta_star.size();
    if (p > kSandwichMaxDim)
        throw DimensionTooLargeError("sandwich_check is brute force and refuses p=" + std::to_string(p) +
                                     " > " + std::to_string(kSandwichMaxDim));
    if (!(beta > 1.0)) throw InputError("sandwich_check needs beta > 1");
    if (!(rho > 0.0)) throw InputError("sandwich_check needs rho > 0");
    if (n_mc < 2) throw InputError("sandwich_check needs n_mc >= 2");
    const auto E_r = ErrorSetSpec::regularized(norm, theta_star, beta);
    const auto E_c = ErrorSetSpec::constrained(norm, theta_star);

    const Matrix D = sphere_grid(p, grid, derive_seed(seed, 0x5a4d));
    const Index N = D.cols();
    Vector t_c(N), t_r(N), t_cone(N);
    const double cone_floor = 1e-8 * std::min(rho, std::max(theta_star.norm(), 1e-300));
#pragma omp parallel for schedule(dynamic, 64)
    for (Index j = 0; j < N; ++j) {
        const Vector u = D.col(j);
        t_c[j] = ray_extent(E_c, u, rho);
        t_r[j] = ray_extent(E_r, u, rho);
        t_cone[j] = t_c[j] > cone_floor ? rho : 0.0;
    }

    std::vector<double> sc(n_mc), sr(n_mc), scone(n_mc);
    const auto n = static_cast<std::int64_t>(n_mc);
#pragma omp parallel
    {
        Vector g(p);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            Engine eng = substream(seed, static_cast<std::uint64_t>(i));
            fill_gaussian(eng, g);
            const Vector d = D.transpose() * g;
            double bc = 0.0, br = 0.0, bcone = 0.0;  // 0 is in every set
            for (Index j = 0; j < N; ++j) {
                bc = std::max(bc, t_c[j] * d[j]);
                br = std::max(br, t_r[j] * d[j]);
                bcone = std::max(bcone, t_cone[j] * d[j]);
            }
            const auto k = static_cast<std::size_t>(i);
            sc[k] = bc;
            sr[k] = br;
            scone[k] = bcone;
        }
    }
    auto estimate = [&](const std::vector<double>& xs, const std::string& name) {
        const auto ms = mean_stderr(xs);
        return WidthEstimate{ms.mean, ms.std_error, n_mc, seed, name};
    };
    SandwichReport rep;
    rep.w_constrained = estimate(sc, "E_c cap rho-ball");
    rep.w_regularized = estimate(sr, "E_r cap rho-ball");
    rep.w_constrained_cone = estimate(scone, "cone(E_c) cap rho-ball");
    rep.factor = 1.0 + 2.0 * theta_star.norm() / ((beta - 1.0) * rho);
    rep.grid_size = static_cast<std::size_t>(N);
    const double se_lo = std::hypot(rep.w_constrained.std_error, rep.w_regularized.std_error);
    const double se_hi = std::hypot(rep.w_regularized.std_error, rep.factor * rep.w_constrained_cone.std_error);
    rep.lower_slack = rep.w_regularized.mean - rep.w_constrained.mean + 3.0 * se_lo;
    rep.upper_slack = rep.factor * rep.w_constrained_cone.mean - rep.w_regularized.mean + 3.0 * se_hi;
    rep.lower_holds = rep.lower_slack >= 0.0;
    rep.upper_holds = rep.upper_slack >= 0.0;
    return rep;
}

}  // namespace normgeo
