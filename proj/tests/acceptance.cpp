// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "normgeo/compatibility.hpp"
#include "normgeo/conditions.hpp"
#include "normgeo/geometry.hpp"
#include "normgeo/harness.hpp"
#include "normgeo/kernels.hpp"
#include "normgeo/regparam.hpp"
#include "normgeo/report.hpp"
#include "normgeo/solver.hpp"
#include "normgeo/stats.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>

using namespace normgeo;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

int failures = 0;
std::vector<std::string> only;  // optional criterion ids from argv

void report(const std::string& id, const std::string& title, const std::function<Verdict()>& body) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += v.pass ? 0 : 1;
    std::printf("%s %-4s %s | %s | %.1fs\n", v.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
}

Matrix gaussian_design(Index n, Index p, Seed s, DesignFamily fam = DesignFamily::GaussianIsotropic) {
    return sample_design(DesignSpec::isotropic(n, p, fam, s));
}

// ---- criteria 1 and 2: one sweep feeds both ----
std::optional<SweepResult> l1_sweep;

Verdict criterion_scaling() {
    ExperimentConfig c;
    c.seed = 2024;
    c.norm.type = "l1";
    c.p = 256;
    c.sparsity = 8;
    c.beta = 2.0;
    c.n_grid = {200, 400, 800, 1600, 3200};
    c.seeds = 20;
    c.cap_dirs = 500;
    c.lambda_trials = 100;
    c.width_mc = 2000;
    l1_sweep = scaling_sweep(c);
    const auto& f = l1_sweep->fit;
    const bool ok = std::abs(f.slope + 0.5) <= 0.1 && f.r2 >= 0.95;
    return {ok, "slope=" + fmt("%.4f", f.slope) + " (want -0.5+-0.1), r2=" + fmt("%.4f", f.r2) + " (want >=0.95)"};
}

Verdict criterion_bound_validity() {
    if (!l1_sweep) return {false, "criterion 1 sweep unavailable"};
    const auto& r = *l1_sweep;
    if (r.converged_valid_count == 0) return {false, "no converged trial had bound_valid set"};
    const double frac = static_cast<double>(r.bound_holds_count) / static_cast<double>(r.converged_valid_count);
    return {frac >= 0.95, std::to_string(r.bound_holds_count) + "/" + std::to_string(r.converged_valid_count) +
                              " converged bound-valid trials within the bound (" + fmt("%.3f", frac) +
                              ", want >=0.95); E_r membership violations=" + std::to_string(r.membership_violations)};
}

// ---- criterion 3 ----
Verdict criterion_lambda_width() {
    const LossObject sq{LossKind::Squared};
    const NoiseSpec noise{NoiseFamily::Gaussian, 1.0, 0};
    std::vector<double> ratios;
    std::string detail = "width_ratio at p=64,128,256,512:";
    for (Index p : {64, 128, 256, 512}) {
        const auto r = lambda_report(sq, Norm::l1(p), DesignSpec::isotropic(400, p, DesignFamily::GaussianIsotropic, 0),
                                     noise, sparse_theta(p, 8, 1.0, 1), 2.0, 200, derive_seed(3, static_cast<Seed>(p)));
        ratios.push_back(r.width_ratio);
        detail += " " + fmt("%.3f", r.width_ratio);
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    const Index p = 256;
    const auto iso = lambda_report(sq, Norm::l1(p), DesignSpec::isotropic(400, p, DesignFamily::GaussianIsotropic, 0), noise,
                                   sparse_theta(p, 8, 1.0, 1), 2.0, 200, 31);
    const auto an = lambda_report(sq, Norm::l1(p),
                                  DesignSpec::anisotropic(400, CovarianceSpec::explicit_matrix(4.0 * Matrix::Identity(p, p)), 0),
                                  noise, sparse_theta(p, 8, 1.0, 1), 2.0, 200, 32);
    const double infl = an.mean_stat / iso.mean_stat;
    detail += "; spread=" + fmt("%.3f", spread) + " (want <2); Sigma=4I inflation=" + fmt("%.3f", infl) +
              " (want 2.0+-0.4), xi=" + fmt("%.3f", an.xi);
    return {spread < 2.0 && std::abs(infl - 2.0) <= 0.4, detail};
}

// ---- criteria 4 and 5 share the p=100, s=4 cap ----
struct RipSetup {
    CapSample cap;
    double w_hat = 0.0;
    double c_gaussian = 0.0;
};
std::optional<RipSetup> rip;

Verdict criterion_rip() {
    const Index p = 100;
    const auto es = ErrorSetSpec::regularized(Norm::l1(p), sparse_theta(p, 4, 1.0, 41), 2.0);
    RipSetup s{sample_cap(es, 500, 42), 0.0, 0.0};
    s.w_hat = width_cap(s.cap, 10000, 43).mean;
    bool ok = true;
    std::string detail = "w_hat=" + fmt("%.3f", s.w_hat);
    for (auto fam : {DesignFamily::GaussianIsotropic, DesignFamily::Rademacher}) {
        std::vector<ConditionReport> reps;
        for (Index n : {200, 400, 800, 1600, 3200})
            for (Seed k = 0; k < 10; ++k) {
                auto r = re_statistic(gaussian_design(n, p, derive_seed(derive_seed(44, static_cast<Seed>(n)), k), fam), s.cap);
                r.w_hat = s.w_hat;
                reps.push_back(r);
            }
        const auto f = rip_envelope(reps);
        ok = ok && std::abs(f.slope + 0.5) <= 0.15;
        detail += "; " + to_string(fam) + " slope=" + fmt("%.4f", f.slope) + " c=" + fmt("%.3f", f.c);
        if (fam == DesignFamily::GaussianIsotropic) s.c_gaussian = f.c;
    }
    rip = s;
    return {ok, detail + " (want -0.5+-0.15)"};
}

Verdict criterion_aniso() {
    if (!rip) return {false, "criterion 4 setup unavailable"};
    const Index p = 100;
    const auto cov = CovarianceSpec::ar1(p, 0.5);
    const auto n = static_cast<Index>(std::ceil(10.0 * rip->w_hat * rip->w_hat));
    int held = 0;
    for (Seed k = 0; k < 20; ++k) {
        const Matrix X = sample_design(DesignSpec::anisotropic(n, cov, derive_seed(51, k)));
        held += aniso_re_check(X, rip->cap, cov, rip->c_gaussian, rip->w_hat).passed;
    }
    return {held >= 18, "n=" + std::to_string(n) + ", c=" + fmt("%.3f", rip->c_gaussian) + ", bracketing held in " +
                            std::to_string(held) + "/20 seeds (want >=18)"};
}

// ---- criterion 6 ----
Verdict criterion_sandwich() {
    bool ok = true;
    std::string detail;
    for (Index p : {2, 3, 4}) {
        const auto r = sandwich_check(Vector::Unit(p, 0), 2.0, 1.0, Norm::l1(p), 10000, p == 2 ? 4096 : 20000,
                                      derive_seed(61, static_cast<Seed>(p)));
        ok = ok && r.holds();
        detail += (detail.empty() ? "" : "; ") + std::string("p=") + std::to_string(p) + " w_c=" +
                  fmt("%.4f", r.w_constrained.mean) + " w_r=" + fmt("%.4f", r.w_regularized.mean) + " 3*w_cbar=" +
                  fmt("%.4f", r.factor * r.w_constrained_cone.mean) + (r.holds() ? " ok" : " VIOLATED");
    }
    return {ok, detail};
}

// ---- criterion 7 ----
Verdict criterion_compat() {
    const Index p = 64;
    bool ok = true;
    std::string detail;
    for (Index s : {1, 4}) {
        const auto es = ErrorSetSpec::regularized(Norm::l1(p), sparse_theta(p, s, 1.0, 70 + static_cast<Seed>(s)), 2.0);
        const auto c = compat_empirical(es, 100000, 71);
        const double bound = 4.0 * std::sqrt(static_cast<double>(s));
        ok = ok && c.empirical_sup <= bound;
        detail += "L1 s=" + std::to_string(s) + " sup=" + fmt("%.4f", c.empirical_sup) + " <= " + fmt("%.1f", bound) + "; ";
    }
    const auto es2 = ErrorSetSpec::regularized(Norm::l2(p), sparse_theta(p, 4, 1.0, 72), 2.0);
    const auto c2 = compat_empirical(es2, 100000, 73);
    ok = ok && c2.empirical_sup == 1.0;
    detail += "L2 sup=" + fmt("%.17g", c2.empirical_sup) + " (want exactly 1)";
    return {ok, detail};
}

// ---- criterion 8 ----
Verdict criterion_phase() {
    const Index p = 128;
    // Small sampled caps all look alike (their width is near sqrt(2 log n_dirs)
    // whatever s is), which squeezes w^2 into a band narrower than the
    // bisection noise; 20000 directions separates the three sparsities.
    const Index cap_dirs = 20000;
    std::vector<double> w2, n0;
    std::string detail;
    for (Index s : {2, 4, 8}) {
        const auto es = ErrorSetSpec::regularized(Norm::l1(p), sparse_theta(p, s, 1.0, 80 + static_cast<Seed>(s)), 2.0);
        const CapSample cap = sample_cap(es, cap_dirs, 81);
        const double w = width_cap(cap, 10000, 82).mean;
        const DesignSpec base = DesignSpec::isotropic(1, p, DesignFamily::GaussianIsotropic, 0);
        // Same design seeds for every s and every n (rows are per-row substreams,
        // so designs are nested in n): only the cap changes between sparsities.
        const auto stat = [&](Index n) { return median_inf_q(base, cap.directions, n, 10, 83); };
        const Index n_hi = static_cast<Index>(std::ceil(100.0 * w * w));
        const Index crossing = phase_transition_n0(stat, 0.5, 2, n_hi);
        w2.push_back(w * w);
        n0.push_back(static_cast<double>(crossing));
        detail += "s=" + std::to_string(s) + " w^2=" + fmt("%.2f", w * w) + " n0=" + std::to_string(crossing) + "; ";
    }
    const auto f = fit_line(w2, n0);
    return {f.r2 >= 0.9, detail + "linear fit slope=" + fmt("%.3f", f.slope) + " r2=" + fmt("%.4f", f.r2) + " (want >=0.9)"};
}

// ---- criterion 9 ----
Verdict criterion_glm_rsc() {
    const Index p = 64;
    const LossObject loss{LossKind::Logistic};
    const auto curv = glm_curvature(loss, 1.0);
    const Vector th = sparse_theta(p, 4, 1.0, 91);
    const CapSample cap = sample_cap(ErrorSetSpec::regularized(Norm::l1(p), th, 2.0), 500, 92);
    const double w = width_cap(cap, 10000, 93).mean;
    const auto n_min = static_cast<Index>(std::ceil(4.0 * w * w));
    bool ok = true;
    std::string detail = "w_hat=" + fmt("%.3f", w) + ", ell=" + fmt("%.5f", curv.ell);
    for (Index n : {n_min, 2 * n_min, 4 * n_min}) {
        int pos = 0, floor_pos = 0;
        double worst_gap = 1e300;
        for (Seed k = 0; k < 20; ++k) {
            const Matrix X = gaussian_design(n, p, derive_seed(derive_seed(94, static_cast<Seed>(n)), k));
            const auto r = rsc_glm_statistic(loss, X, th, cap, curv);  // throws if exact < floor - 1e-10
            pos += r.rsc_kappa > 0.0;
            floor_pos += r.floor_inf > 0.0;
            worst_gap = std::min(worst_gap, r.min_gap);
        }
        ok = ok && pos >= 18 && floor_pos >= 18 && worst_gap >= -1e-10;
        detail += "; n=" + std::to_string(n) + " inf dL>0 in " + std::to_string(pos) + "/20, floor>0 in " +
                  std::to_string(floor_pos) + "/20, min(exact-floor)=" + fmt("%.3g", worst_gap);
    }
    return {ok, detail};
}

// ---- criterion 10 ----
Verdict criterion_oracles() {
    std::string detail;
    bool ok = true;
    const LossObject sq{LossKind::Squared};
    {
        const Matrix X = gaussian_design(200, 50, 101);
        const Vector y = X * gaussian_vector(102, 0, 50) + gaussian_vector(103, 0, 200);
        SolverConfig cfg;
        cfg.lambda = 0.0;
        cfg.rel_tol = 1e-14;
        cfg.max_iters = 20000;
        const Vector fit = solve_regularized(sq, Norm::l1(50), X, y, cfg).theta_hat;
        const Vector ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
        const double rel = (fit - ols).norm() / ols.norm();
        ok = ok && rel <= 1e-6;
        detail += "normal equations rel=" + fmt("%.2e", rel);
    }
    {
        const Index n = 16;
        const Matrix X = std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
        const Vector y = 3.0 * gaussian_vector(104, 0, n);
        SolverConfig cfg;
        cfg.lambda = 0.8;
        cfg.rel_tol = 1e-14;
        const Vector fit = solve_regularized(sq, Norm::l1(n), X, y, cfg).theta_hat;
        double gap = 0.0;
        for (Index i = 0; i < n; ++i)
            gap = std::max(gap, std::abs(fit[i] - oracle::soft_threshold(y[i] / std::sqrt(static_cast<double>(n)), 0.4)));
        ok = ok && gap <= 1e-8;
        detail += "; soft-threshold max gap=" + fmt("%.2e", gap);
    }
    for (LossKind k : {LossKind::Squared, LossKind::Logistic, LossKind::Poisson}) {
        const double g = oracle::gradient_fd_gap(LossObject{k}, 1000, 105);
        ok = ok && g <= 1e-5;
        detail += "; fd " + to_string(k) + "=" + fmt("%.2e", g);
    }
    for (Index p : {3, 4, 5}) {
        const Matrix X = gaussian_design(40, p, 106 + static_cast<Seed>(p));
        const auto es = ErrorSetSpec::regularized(Norm::l1(p), Vector::Unit(p, 0), 2.0);
        const double exact = oracle::enumerate_cone_inf_q(X, es, 4000);
        const double est = re_statistic(X, sample_cap(es, 2000, 107)).inf_q;
        const double rel = std::abs(est - exact) / exact;
        ok = ok && rel <= 0.1;
        detail += "; inf_q p=" + std::to_string(p) + " rel=" + fmt("%.3f", rel);
    }
    return {ok, detail};
}

// ---- criterion 11 ----
Verdict criterion_properties() {
    std::vector<std::string> failed;
    const auto need = [&](bool cond, const std::string& what) {
        if (!cond) failed.push_back(what);
    };
    const Index p = 9;
    for (const Norm& n : {Norm::l1(p), Norm::l2(p), Norm::linf(p), Norm::group(GroupPartition::contiguous(p, 3))}) {
        const std::string tag = to_string(n.kind());
        bool axioms = n.value(Vector::Zero(p)) == 0.0, holder = true, prox = true;
        for (std::uint64_t k = 0; k < 10000; ++k) {
            const Vector u = gaussian_vector(111, k, p), v = gaussian_vector(112, k, p);
            const double c = 3.0 * gaussian_vector(113, k, 1)[0];
            const double nu = n.value(u);
            axioms = axioms && nu > 0.0 && std::abs(n.value(c * u) - std::abs(c) * nu) <= 1e-12 * std::abs(c) * nu &&
                     n.value(u + v) <= nu + n.value(v) + 1e-12;
            holder = holder && u.dot(v) <= nu * n.dual_value(v) + 1e-12;
        }
        for (std::uint64_t k = 0; k < 200; ++k) {
            const Vector x = 2.0 * gaussian_vector(114, k, p);
            const double t = 0.1 + 0.2 * static_cast<double>(k % 10);
            const Vector v = n.prox(x, t);
            const Vector g = (x - v) / t;
            for (std::uint64_t j = 0; j < 100; ++j) {
                const Vector w = gaussian_vector(115, k * 100 + j, p);
                prox = prox && n.value(w) >= n.value(v) + g.dot(w - v) - 1e-9;
            }
        }
        need(axioms, "norm axioms " + tag);
        need(holder, "Hoelder " + tag);
        need(prox, "prox optimality " + tag);
    }

    // widths
    const Matrix d = sphere_grid(3, 500, 7);
    need(width_of_directions(d, 2000, 1).mean == width_of_directions((3.7 * d).colwise().normalized(), 2000, 1).mean,
         "cap width scale invariance");
    const auto point_width = [](const Matrix& pts, Seed seed) {
        std::vector<double> draws(40000);
        for (std::size_t k = 0; k < draws.size(); ++k) draws[k] = (gaussian_vector(seed, k, pts.rows()).transpose() * pts).maxCoeff();
        return mean_stderr(draws);
    };
    const auto w1 = point_width(d, 11), w25 = point_width(2.5 * d, 12);
    need(std::abs(w25.mean - 2.5 * w1.mean) <= 3.0 * std::hypot(w25.std_error, 2.5 * w1.std_error), "width radius scaling");
    Vector b(3);
    b << 0.3, -1.2, 2.0;
    const auto wt = point_width(d.colwise() + b, 13);
    need(std::abs(wt.mean - w1.mean) <= 3.0 * std::hypot(wt.std_error, w1.std_error), "width translation invariance");
    const auto es = ErrorSetSpec::regularized(Norm::l1(12), 2.0 * Vector::Unit(12, 0), 2.0);
    const CapSample ca = sample_cap(es, 100, 1);
    const CapSample cb = append_directions(ca, sample_cap(es, 50, 2).directions);
    const auto da = kernels::cap_sup_draws(ca.directions, 3000, 9), db = kernels::cap_sup_draws(cb.directions, 3000, 9);
    bool mono = true;
    for (std::size_t i = 0; i < da.size(); ++i) mono = mono && da[i] <= db[i];
    need(mono, "width monotonicity");

    // single- vs multi-thread outputs
    ExperimentConfig c;
    c.seed = 9;
    c.p = 40;
    c.sparsity = 3;
    c.n_grid = {80, 160, 320, 640};
    c.seeds = 3;
    c.cap_dirs = 150;
    c.lambda_trials = 30;
    c.width_mc = 300;
    const auto snapshot = [&]() {
        const auto sweep = scaling_sweep(c);
        const auto cap = sample_cap(es, 200, 5);
        const auto lam = lambda_report(LossObject{LossKind::Squared}, Norm::l1(40),
                                       DesignSpec::isotropic(100, 40, DesignFamily::GaussianIsotropic, 0),
                                       NoiseSpec{NoiseFamily::Gaussian, 1.0, 0}, Vector::Zero(40), 2.0, 50, 6);
        return trials_csv(sweep.records()) + canonical_dump(sweep.summary_json()) +
               canonical_dump(to_json(width_cap(cap, 5000, 7))) + canonical_dump(to_json(lam)) +
               canonical_dump(to_json(sandwich_check(Vector::Unit(3, 0), 2.0, 1.0, Norm::l1(3), 2000, 3000, 8)));
    };
    set_thread_count(1);
    const std::string one = snapshot();
    set_thread_count(4);
    const std::string four = snapshot();
    set_thread_count(0);
    need(one == four, "thread-count determinism");

    std::string detail = failed.empty() ? "norm axioms, Hoelder, prox optimality, width scaling/translation/monotonicity, "
                                          "1- vs 4-thread byte identity all hold"
                                        : "failed:";
    for (const auto& f : failed) detail += " [" + f + "]";
    return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    only.assign(argv + 1, argv + argc);
    set_thread_count(0);
    report("C1", "L1 error scaling", criterion_scaling);
    report("C2", "bound validity", criterion_bound_validity);
    report("C3", "lambda width scaling", criterion_lambda_width);
    report("C4", "RIP decay", criterion_rip);
    report("C5", "anisotropic bracketing", criterion_aniso);
    report("C6", "width sandwich", criterion_sandwich);
    report("C7", "compatibility", criterion_compat);
    report("C8", "phase transition", criterion_phase);
    report("C9", "GLM RSC", criterion_glm_rsc);
    report("C10", "oracle equivalences", criterion_oracles);
    report("C11", "property suites", criterion_properties);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
