#include "normgeo/harness.hpp"

#include "normgeo/compatibility.hpp"
#include "normgeo/conditions.hpp"
#include "normgeo/errors.hpp"
#include "normgeo/kernels.hpp"
#include "normgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace normgeo {

Norm NormConfig::build(Index p) const {
    if (type == "l1") return Norm::l1(p);
    if (type == "l2") return Norm::l2(p);
    if (type == "linf") return Norm::linf(p);
    if (type == "group") {
        if (!groups.empty()) {
            GroupPartition part(groups);
            if (part.dim() != p) throw InputError("group partition covers " + std::to_string(part.dim()) +
                                                  " indices but p=" + std::to_string(p));
            return Norm::group(std::move(part));
        }
        if (group_size < 1) throw InputError("group norm needs 'groups' or 'group_size'");
        return Norm::group(GroupPartition::contiguous(p, group_size));
    }
    throw InputError("unknown norm '" + type + "' (expected l1, l2, linf or group)");
}

CovarianceSpec CovarianceConfig::build(Index p) const {
    if (kind == "identity") return CovarianceSpec::identity(p);
    if (kind == "ar1") return CovarianceSpec::ar1(p, rho);
    if (kind == "explicit") {
        auto c = CovarianceSpec::from_csv(csv);
        if (c.dim() != p) throw InputError("explicit covariance dimension does not match p");
        return c;
    }
    throw InputError("unknown covariance kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
    if (p < 1) throw InputError("p must be >= 1");
    if (seeds < 1) throw InputError("seeds must be >= 1");
    if (n_grid.empty()) throw InputError("n_grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw InputError("n_grid entries must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InputError("n_grid must be strictly increasing");
    }
    if (!(beta > 1.0)) throw InputError("beta must be > 1");
    if (!(noise_scale > 0.0)) throw InputError("noise scale must be > 0");
    if (sparsity < 0 || sparsity > p) throw InputError("sparsity must lie in [0, p]");
    if (fixed_lambda && !(*fixed_lambda >= 0.0)) throw InputError("fixed lambda must be >= 0");
    if (cap_dirs < 1) throw InputError("mc.cap_dirs must be >= 1");
    (void)norm.build(p);
    (void)covariance.build(p);
    if (design_family != DesignFamily::GaussianAnisotropic && covariance.kind != "identity")
        throw InputError("non-identity covariance requires the gaussian-aniso design family");
}

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw InputError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw InputError("unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig c;
    try {
        reject_unknown(j, {"seed", "norm", "loss", "design", "noise", "theta_star", "beta", "grid", "mc", "lambda",
                           "solver", "output"},
                       "config");
        c.seed = get_or<Seed>(j, "seed", c.seed);
        if (j.contains("norm")) {
            const auto& n = j.at("norm");
            reject_unknown(n, {"type", "groups", "group_size"}, "norm");
            c.norm.type = get_or<std::string>(n, "type", c.norm.type);
            c.norm.groups = get_or<std::vector<std::vector<Index>>>(n, "groups", {});
            c.norm.group_size = get_or<Index>(n, "group_size", 0);
        }
        if (j.contains("loss")) {
            reject_unknown(j.at("loss"), {"type"}, "loss");
            c.loss = loss_kind_from_string(get_or<std::string>(j.at("loss"), "type", "squared"));
        }
        if (j.contains("design")) {
            const auto& d = j.at("design");
            reject_unknown(d, {"family", "p", "covariance", "psi2_bound"}, "design");
            c.design_family = design_family_from_string(get_or<std::string>(d, "family", "gaussian-iso"));
            c.p = get_or<Index>(d, "p", c.p);
            c.psi2_bound = get_or<double>(d, "psi2_bound", c.psi2_bound);
            if (d.contains("covariance")) {
                const auto& cv = d.at("covariance");
                reject_unknown(cv, {"kind", "rho", "csv"}, "design.covariance");
                c.covariance.kind = get_or<std::string>(cv, "kind", "identity");
                c.covariance.rho = get_or<double>(cv, "rho", 0.0);
                c.covariance.csv = get_or<std::string>(cv, "csv", "");
            }
        }
        if (j.contains("noise")) {
            const auto& nz = j.at("noise");
            reject_unknown(nz, {"family", "scale"}, "noise");
            c.noise_family = noise_family_from_string(get_or<std::string>(nz, "family", "gaussian"));
            c.noise_scale = get_or<double>(nz, "scale", c.noise_scale);
        }
        if (j.contains("theta_star")) {
            const auto& t = j.at("theta_star");
            reject_unknown(t, {"s", "magnitude"}, "theta_star");
            c.sparsity = get_or<Index>(t, "s", c.sparsity);
            c.magnitude = get_or<double>(t, "magnitude", c.magnitude);
        }
        c.beta = get_or<double>(j, "beta", c.beta);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"n", "seeds"}, "grid");
            c.n_grid = get_or<std::vector<Index>>(g, "n", {});
            c.seeds = get_or<std::size_t>(g, "seeds", c.seeds);
        }
        if (j.contains("mc")) {
            const auto& m = j.at("mc");
            reject_unknown(m, {"cap_dirs", "lambda_trials", "width_mc"}, "mc");
            c.cap_dirs = get_or<std::size_t>(m, "cap_dirs", c.cap_dirs);
            c.lambda_trials = get_or<std::size_t>(m, "lambda_trials", c.lambda_trials);
            c.width_mc = get_or<std::size_t>(m, "width_mc", c.width_mc);
        }
        if (j.contains("lambda")) {
            const auto& l = j.at("lambda");
            reject_unknown(l, {"mode", "value"}, "lambda");
            const auto mode = get_or<std::string>(l, "mode", "recommended");
            if (mode == "fixed")
                c.fixed_lambda = l.at("value").get<double>();
            else if (mode != "recommended")
                throw InputError("lambda.mode must be 'recommended' or 'fixed'");
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            reject_unknown(s, {"max_iters", "rel_tol"}, "solver");
            c.max_iters = get_or<std::size_t>(s, "max_iters", c.max_iters);
            c.rel_tol = get_or<double>(s, "rel_tol", c.rel_tol);
        }
        c.output = get_or<std::string>(j, "output", c.output);
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["seed"] = seed;
    j["norm"] = {{"type", norm.type}};
    if (!norm.groups.empty()) j["norm"]["groups"] = norm.groups;
    if (norm.group_size > 0) j["norm"]["group_size"] = norm.group_size;
    j["loss"] = {{"type", to_string(loss)}};
    j["design"] = {{"family", to_string(design_family)},
                   {"p", p},
                   {"psi2_bound", psi2_bound},
                   {"covariance", {{"kind", covariance.kind}, {"rho", covariance.rho}, {"csv", covariance.csv}}}};
    j["noise"] = {{"family", to_string(noise_family)}, {"scale", noise_scale}};
    j["theta_star"] = {{"s", sparsity}, {"magnitude", magnitude}};
    j["beta"] = beta;
    j["grid"] = {{"n", n_grid}, {"seeds", seeds}};
    j["mc"] = {{"cap_dirs", cap_dirs}, {"lambda_trials", lambda_trials}, {"width_mc", width_mc}};
    if (fixed_lambda)
        j["lambda"] = {{"mode", "fixed"}, {"value", *fixed_lambda}};
    else
        j["lambda"] = {{"mode", "recommended"}};
    j["solver"] = {{"max_iters", max_iters}, {"rel_tol", rel_tol}};
    j["output"] = output;
    return j;
}

namespace {

Vector draw_theta_star(const ExperimentConfig& cfg, const Norm& norm) {
    const Seed s = derive_seed(cfg.seed, 0x7e7a);
    if (norm.kind() != NormKind::GroupL2) return sparse_theta(cfg.p, cfg.sparsity, cfg.magnitude, s);
    const auto& groups = norm.partition()->groups();
    const auto T = static_cast<Index>(groups.size());
    if (cfg.sparsity > T) throw InputError("active group count exceeds the number of groups");
    const Vector pick = sparse_theta(T, cfg.sparsity, 1.0, s);
    Engine eng = substream(s, 1);
    Vector theta = Vector::Zero(cfg.p);
    for (Index t = 0; t < T; ++t)
        if (pick[t] != 0.0)
            for (Index i : groups[static_cast<std::size_t>(t)])
                theta[i] = (eng() >> 63) ? cfg.magnitude : -cfg.magnitude;
    return theta;
}

DesignSpec design_for(const ExperimentConfig& cfg, Index n, Seed seed) {
    DesignSpec d;
    d.n = n;
    d.p = cfg.p;
    d.family = cfg.design_family;
    d.covariance = cfg.covariance.build(cfg.p);
    d.psi2_bound = cfg.psi2_bound;
    d.seed = seed;
    return d;
}

}  // namespace

TrialContext prepare_context(const ExperimentConfig& cfg) {
    cfg.validate();
    Norm norm = cfg.norm.build(cfg.p);
    Vector theta = draw_theta_star(cfg, norm);
    const auto errset = ErrorSetSpec::regularized(norm, theta, cfg.beta);
    CapSample cap = sample_cap(errset, cfg.cap_dirs, derive_seed(cfg.seed, 0xca9));
    double psi = 0.0;
    bool analytic = true;
    if (auto b = compat_bound(norm, support_of(norm, theta))) {
        psi = *b;
    } else {
        analytic = false;
        psi = compat_empirical(errset, cfg.cap_dirs, derive_seed(cfg.seed, 0xc0)).empirical_sup;
    }
    return TrialContext{std::move(norm), LossObject{cfg.loss}, std::move(theta), std::move(cap), psi, analytic};
}

bool TrialRecord::operator==(const TrialRecord& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    return n == o.n && seed == o.seed && same(lambda_used, o.lambda_used) && same(err_l2, o.err_l2) &&
           same(kappa_hat, o.kappa_hat) && same(theoretical_bound, o.theoretical_bound) &&
           bound_valid == o.bound_valid && solver_iters == o.solver_iters;
}

double theoretical_bound(double psi, double beta, double lambda, double kappa) {
    if (!(beta > 1.0)) throw InputError("theoretical_bound needs beta > 1");
    if (!(lambda >= 0.0)) throw InputError("theoretical_bound needs lambda >= 0");
    if (!(psi > 0.0)) throw InputError("theoretical_bound needs psi > 0");
    if (!(kappa > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return psi * ((1.0 + beta) / beta) * lambda / kappa;
}

LambdaReport calibrate_lambda(const ExperimentConfig& cfg, const TrialContext& ctx, Index n) {
    const DesignSpec d = design_for(cfg, n, 0);
    const NoiseSpec noise{cfg.noise_family, cfg.noise_scale, 0};
    LambdaOptions opts;
    opts.width_mc = std::max<std::size_t>(cfg.width_mc, 2);
    return lambda_report(ctx.loss, ctx.norm, d, noise, ctx.theta_star, cfg.beta,
                         std::max<std::size_t>(cfg.lambda_trials, 20),
                         derive_seed(cfg.seed, 0x1a000 + static_cast<std::uint64_t>(n)), opts);
}

TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, const TrialContext& ctx, Index n, std::size_t seed,
                                double lambda) {
    TrialOutcome out;
    out.record.n = n;
    out.record.seed = seed;
    out.record.lambda_used = lambda;
    try {
        const Seed base = derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(n)), seed);
        const Matrix X = sample_design(design_for(cfg, n, derive_seed(base, 0)));
        const NoiseSpec noise{cfg.noise_family, cfg.noise_scale, derive_seed(base, 1)};
        const Vector y = sample_response(ctx.loss, X, ctx.theta_star, noise);

        SolverConfig sc;
        sc.lambda = lambda;
        sc.max_iters = cfg.max_iters;
        sc.rel_tol = cfg.rel_tol;
        const FitResult fit = solve_regularized(ctx.loss, ctx.norm, X, y, sc);
        const Vector delta = fit.theta_hat - ctx.theta_star;
        out.converged = fit.converged;
        out.record.solver_iters = fit.iters;
        out.record.err_l2 = delta.norm();

        // kappa over the standard cap plus the realized error direction.
        CapSample cap = ctx.cap;
        if (out.record.err_l2 > 0.0) cap = append_directions(ctx.cap, delta);
        if (ctx.loss.kind == LossKind::Squared) {
            out.record.kappa_hat = kernels::quad_forms(X, cap.directions).minCoeff();
        } else {
            const double r = out.record.err_l2 > 0.0 ? out.record.err_l2 : 1.0;
            const Vector eta = X * ctx.theta_star;
            const Matrix V = X * cap.directions;
            double k = std::numeric_limits<double>::infinity();
            for (Index j = 0; j < V.cols(); ++j) k = std::min(k, bregman(ctx.loss, eta, r * V.col(j)) / (r * r));
            out.record.kappa_hat = k;
        }

        out.grad_dual = ctx.norm.dual_value(loss_gradient(ctx.loss, ctx.theta_star, X, y));
        out.record.theoretical_bound = theoretical_bound(ctx.psi, cfg.beta, lambda, out.record.kappa_hat);
        out.record.bound_valid = lambda >= cfg.beta * out.grad_dual && out.record.kappa_hat > 0.0;

        const double base_norm = ctx.norm.value(ctx.theta_star);
        const double rhs = base_norm + ctx.norm.value(delta) / cfg.beta;
        out.in_error_set = ctx.norm.value(fit.theta_hat) <= rhs + 1e-6 * (1.0 + rhs);
    } catch (const Error& e) {
        out.failed = true;
        out.error = e.tag() + ": " + e.what();
    }
    return out;
}

TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, Index n, std::size_t seed) {
    const TrialContext ctx = prepare_context(cfg);
    const double lambda = cfg.fixed_lambda ? *cfg.fixed_lambda : calibrate_lambda(cfg, ctx, n).solver_lambda(ctx.loss);
    return run_recovery_trial(cfg, ctx, n, seed, lambda);
}

ScalingFit fit_loglog(const std::vector<double>& ns, const std::vector<double>& errs) {
    if (ns.size() != errs.size()) throw InputError("fit_loglog: length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0) || !(errs[i] > 0.0)) throw InputError("fit_loglog needs positive values");
        lx.push_back(std::log(ns[i]));
        ly.push_back(std::log(errs[i]));
    }
    const auto lf = fit_line(lx, ly);
    return ScalingFit{lf.slope, lf.intercept, lf.r2, lf.n_points};
}

std::vector<TrialRecord> SweepResult::records() const {
    std::vector<TrialRecord> out;
    for (const auto& t : trials)
        if (!t.failed) out.push_back(t.record);
    return out;
}

Json SweepResult::summary_json() const {
    Json j;
    j["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"n_points", fit.n_points}};
    Json g = Json::array();
    for (const auto& p : grid)
        g.push_back({{"n", p.n}, {"lambda", p.lambda}, {"median_err_l2", p.median_err}, {"n_ok", p.n_ok},
                     {"n_failed", p.n_failed}});
    j["grid"] = g;
    j["bound_valid_trials"] = bound_valid_count;
    j["converged_bound_valid_trials"] = converged_valid_count;
    j["bound_holds_trials"] = bound_holds_count;
    j["bound_holds_fraction"] =
        converged_valid_count > 0 ? static_cast<double>(bound_holds_count) / static_cast<double>(converged_valid_count)
                                  : 0.0;
    j["error_set_membership_violations"] = membership_violations;
    j["warnings"] = warnings;
    j["kappa_note"] = "kappa_hat is the inf over a finite cap plus the realized error direction; it over-estimates "
                      "the restricted curvature over the full error set";
    return j;
}

SweepResult scaling_sweep(const ExperimentConfig& cfg, const std::string& output_dir) {
    cfg.validate();
    if (cfg.n_grid.size() < 4) throw InputError("scaling_sweep needs at least 4 grid points");
    const TrialContext ctx = prepare_context(cfg);

    std::vector<double> lambdas(cfg.n_grid.size());
    for (std::size_t k = 0; k < cfg.n_grid.size(); ++k)
        lambdas[k] = cfg.fixed_lambda ? *cfg.fixed_lambda
                                      : calibrate_lambda(cfg, ctx, cfg.n_grid[k]).solver_lambda(ctx.loss);

    SweepResult res;
    const std::size_t total = cfg.n_grid.size() * cfg.seeds;
    res.trials.resize(total);
    const auto total_i = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < total_i; ++t) {
        const auto k = static_cast<std::size_t>(t) / cfg.seeds;
        const auto s = static_cast<std::size_t>(t) % cfg.seeds;
        res.trials[static_cast<std::size_t>(t)] = run_recovery_trial(cfg, ctx, cfg.n_grid[k], s, lambdas[k]);
    }

    std::vector<double> fit_n, fit_err;
    for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
        GridPointSummary gp;
        gp.n = cfg.n_grid[k];
        gp.lambda = lambdas[k];
        std::vector<double> errs;
        for (std::size_t s = 0; s < cfg.seeds; ++s) {
            const auto& t = res.trials[k * cfg.seeds + s];
            if (t.failed) {
                ++gp.n_failed;
                continue;
            }
            ++gp.n_ok;
            errs.push_back(t.record.err_l2);
        }
        if (errs.empty()) {
            res.warnings.push_back("n=" + std::to_string(gp.n) + ": all trials failed; excluded from the fit");
        } else {
            gp.median_err = median(errs);
            fit_n.push_back(static_cast<double>(gp.n));
            fit_err.push_back(gp.median_err);
        }
        res.grid.push_back(gp);
    }
    for (const auto& t : res.trials) {
        if (t.failed) {
            res.warnings.push_back("trial n=" + std::to_string(t.record.n) + " seed=" + std::to_string(t.record.seed) +
                                   " failed: " + t.error);
            continue;
        }
        if (!t.record.bound_valid) continue;
        ++res.bound_valid_count;
        if (!t.converged) continue;
        ++res.converged_valid_count;
        if (t.record.err_l2 <= t.record.theoretical_bound) ++res.bound_holds_count;
        if (!t.in_error_set) ++res.membership_violations;
    }
    if (fit_n.size() >= 2) res.fit = fit_loglog(fit_n, fit_err);

    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        write_text_file((std::filesystem::path(output_dir) / "trials.csv").string(), trials_csv(res.records()));
        write_text_file((std::filesystem::path(output_dir) / "summary.json").string(),
                        canonical_dump(res.summary_json()));
    }
    return res;
}

std::string trials_csv_header() { return "n,seed,lambda,err_l2,kappa_hat,bound,bound_valid,iters"; }

std::string trial_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    os << r.n << ',' << r.seed << ',' << format_double(r.lambda_used) << ',' << format_double(r.err_l2) << ','
       << format_double(r.kappa_hat) << ',' << format_double(r.theoretical_bound) << ',' << (r.bound_valid ? 1 : 0)
       << ',' << r.solver_iters;
    return os.str();
}

std::string trials_csv(const std::vector<TrialRecord>& rows) {
    std::string out = trials_csv_header() + "\n";
    for (const auto& r : rows) out += trial_csv_row(r) + "\n";
    return out;
}

std::vector<TrialRecord> parse_trials_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != trials_csv_header()) throw InputError("trials CSV: unexpected header");
    std::vector<TrialRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw InputError("trials CSV: expected 8 columns in '" + line + "'");
        TrialRecord r;
        r.n = static_cast<Index>(std::stoll(cells[0]));
        r.seed = static_cast<std::size_t>(std::stoull(cells[1]));
        r.lambda_used = parse_double(cells[2]);
        r.err_l2 = parse_double(cells[3]);
        r.kappa_hat = parse_double(cells[4]);
        r.theoretical_bound = parse_double(cells[5]);
        if (cells[6] != "0" && cells[6] != "1") throw InputError("trials CSV: bound_valid must be 0 or 1");
        r.bound_valid = cells[6] == "1";
        r.solver_iters = static_cast<std::size_t>(std::stoull(cells[7]));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace normgeo
