// normgeo command-line driver.

#include "normgeo/compatibility.hpp"
#include "normgeo/conditions.hpp"
#include "normgeo/errors.hpp"
#include "normgeo/geometry.hpp"
#include "normgeo/harness.hpp"
#include "normgeo/json_io.hpp"
#include "normgeo/losses.hpp"
#include "normgeo/randomdesign.hpp"
#include "normgeo/regparam.hpp"
#include "normgeo/report.hpp"
#include "normgeo/rng.hpp"
#include "normgeo/solver.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace normgeo;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error("E_USAGE", what) {}
};

Seed default_seed() {
    if (const char* env = std::getenv("NORMGEO_SEED")) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InputError(std::string("NORMGEO_SEED is not an unsigned integer: '") + env + "'");
    }
    return 1;
}

struct Globals {
    Seed seed = 1;
    int threads = 0;
    std::string out;
};

void add_global_opts(CLI::App* app, Globals& g, std::string& seed_text) {
    app->add_option("--seed", seed_text, "Root seed")->default_str("$NORMGEO_SEED, else 1");
    app->add_option("--threads", g.threads, "Thread cap; 0 uses all processors")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--out", g.out, "Output path (stdout when omitted; a directory for scaling)");
}

// Shared by width, re-check, rsc-glm and lambda.
struct ProblemOpts {
    std::string norm = "l1";
    Index group_size = 4;
    Index p = 100;
    Index s = 4;
    double beta = 2.0;
    std::size_t cap_dirs = 500;
    std::size_t width_mc = 2000;
};

void add_problem_opts(CLI::App* app, ProblemOpts& o) {
    app->add_option("--norm", o.norm, "Norm: l1, l2, linf or group")
        ->check(CLI::IsMember({"l1", "l2", "linf", "group"}))
        ->capture_default_str();
    app->add_option("--group-size", o.group_size, "Contiguous group size for --norm group")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--p", o.p, "Ambient dimension")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--s", o.s, "Sparsity of theta* (active groups for --norm group)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--beta", o.beta, "Error-set parameter beta > 1")->capture_default_str();
    app->add_option("--cap-dirs", o.cap_dirs, "Directions in the sampled cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--width-mc", o.width_mc, "Gaussian draws for width estimates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

ExperimentConfig problem_config(const ProblemOpts& o, Seed seed) {
    ExperimentConfig c;
    c.seed = seed;
    c.norm.type = o.norm;
    c.norm.group_size = o.norm == "group" ? o.group_size : 0;
    c.p = o.p;
    c.sparsity = o.s;
    c.beta = o.beta;
    c.cap_dirs = o.cap_dirs;
    c.width_mc = o.width_mc;
    c.n_grid = {1};
    return c;
}

Json problem_json(const ProblemOpts& o) {
    Json j{{"norm", o.norm}, {"p", o.p}, {"s", o.s}, {"beta", o.beta}, {"cap_dirs", o.cap_dirs},
           {"width_mc", o.width_mc}};
    if (o.norm == "group") j["group_size"] = o.group_size;
    return j;
}

// Output sink: --out file, or stdout when --out is empty.
void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    const fs::path path(g.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text_file(g.out, text);
}

// manifest.json sits next to the output (current directory when writing to stdout).
void write_manifest(const Globals& g, const std::string& subcommand, const Json& resolved, const Json& seeds,
                    const std::vector<std::string>& outputs, bool out_is_dir = false) {
    fs::path dir = ".";
    if (!g.out.empty()) {
        if (out_is_dir)
            dir = g.out;
        else if (fs::path(g.out).has_parent_path())
            dir = fs::path(g.out).parent_path();
    }
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (const auto& o : outputs) names.push_back(o == "-" || out_is_dir ? o : fs::path(o).filename().string());
    Json m{{"tool", "normgeo"},
           {"version", kVersion},
           {"subcommand", subcommand},
           {"seed", g.seed},
           {"derived_seeds", seeds},
           {"config", resolved},
           {"outputs", names},
           {"note", "thread count does not affect any output and is not recorded"}};
    write_text_file((dir / "manifest.json").string(), canonical_dump(m));
}

std::vector<Index> parse_grid(const std::string& text) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(cell, &pos);
            if (pos != cell.size() || v < 1) throw std::invalid_argument(cell);
            out.push_back(static_cast<Index>(v));
        } catch (const std::exception&) {
            throw InputError("bad --n-grid entry '" + cell + "'");
        }
    }
    if (out.empty()) throw InputError("--n-grid is empty");
    return out;
}

// CSV with y in the first column and the design row in the rest.
std::pair<Matrix, Vector> read_data_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
        if (row.size() < 2) throw InputError("data CSV rows need y and at least one feature");
        if (!rows.empty() && row.size() != rows.front().size()) throw InputError("data CSV is ragged");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("data CSV '" + path + "' is empty");
    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(rows.front().size()) - 1;
    Matrix X(n, p);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rows[static_cast<std::size_t>(i)][0];
        for (Index j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
    }
    return {X, y};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Norm-regularized estimation toolkit: widths, restricted eigenvalues, lambda selection, "
                 "solvers and scaling sweeps.",
                 "normgeo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Globals g;
    std::string seed_text;
    add_global_opts(&app, g, seed_text);

    // width
    ProblemOpts width_o;
    width_o.p = 256;
    std::size_t width_mc = 100000;
    std::string width_target = "ball";
    auto* width = app.add_subcommand("width", "Gaussian width estimate of a norm ball, error-set cap or cone");
    add_problem_opts(width, width_o);
    width->add_option("--mc", width_mc, "Monte Carlo draws")->check(CLI::PositiveNumber)->capture_default_str();
    width->add_option("--target", width_target, "ball, cap (sampled error-set cap) or cone (analytic cone bound)")
        ->check(CLI::IsMember({"ball", "cap", "cone"}))
        ->capture_default_str();

    // re-check
    ProblemOpts re_o;
    std::string re_design = "gaussian-iso", re_grid = "200,400,800,1600";
    std::size_t re_seeds = 10;
    double re_rho = 0.5, re_c = 1.0;
    auto* re = app.add_subcommand("re-check", "Restricted eigenvalue / isometry statistics over an n grid");
    add_problem_opts(re, re_o);
    re->add_option("--design", re_design, "gaussian-iso, gaussian-aniso, rademacher or uniform")
        ->check(CLI::IsMember({"gaussian-iso", "gaussian", "gaussian-aniso", "rademacher", "uniform"}))
        ->capture_default_str();
    re->add_option("--rho", re_rho, "AR1 correlation for gaussian-aniso")->capture_default_str();
    re->add_option("--envelope-c", re_c, "Envelope constant for the anisotropic bracketing check")
        ->capture_default_str();
    re->add_option("--n-grid", re_grid, "Comma-separated sample sizes")->capture_default_str();
    re->add_option("--seeds", re_seeds, "Designs per grid point")->check(CLI::PositiveNumber)->capture_default_str();

    // rsc-glm
    ProblemOpts rsc_o;
    rsc_o.p = 64;
    std::string rsc_loss = "logistic", rsc_grid = "200,400,800";
    std::size_t rsc_seeds = 20;
    double rsc_T = 1.0;
    auto* rsc = app.add_subcommand("rsc-glm", "GLM restricted strong convexity: exact Bregman increment vs floor");
    add_problem_opts(rsc, rsc_o);
    rsc->add_option("--loss", rsc_loss, "logistic, poisson or squared")
        ->check(CLI::IsMember({"logistic", "poisson", "squared"}))
        ->capture_default_str();
    rsc->add_option("--T", rsc_T, "Truncation level")->check(CLI::PositiveNumber)->capture_default_str();
    rsc->add_option("--n-grid", rsc_grid, "Comma-separated sample sizes")->capture_default_str();
    rsc->add_option("--seeds", rsc_seeds, "Designs per grid point")->check(CLI::PositiveNumber)->capture_default_str();

    // lambda
    ProblemOpts lam_o;
    lam_o.p = 256;
    lam_o.width_mc = 10000;
    std::string lam_loss = "squared", lam_design = "gaussian-iso", lam_noise = "gaussian";
    Index lam_n = 400;
    std::size_t lam_trials = 200;
    double lam_rho = 0.0, lam_noise_scale = 1.0;
    auto* lam = app.add_subcommand("lambda", "Regularization parameter calibration from the dual-norm gradient");
    add_problem_opts(lam, lam_o);
    lam->add_option("--loss", lam_loss, "squared, logistic or poisson")
        ->check(CLI::IsMember({"squared", "logistic", "poisson"}))
        ->capture_default_str();
    lam->add_option("--design", lam_design, "gaussian-iso, gaussian-aniso, rademacher or uniform")
        ->check(CLI::IsMember({"gaussian-iso", "gaussian", "gaussian-aniso", "rademacher", "uniform"}))
        ->capture_default_str();
    lam->add_option("--rho", lam_rho, "AR1 correlation for gaussian-aniso")->capture_default_str();
    lam->add_option("--noise", lam_noise, "gaussian, rademacher or uniform")
        ->check(CLI::IsMember({"gaussian", "rademacher", "uniform"}))
        ->capture_default_str();
    lam->add_option("--noise-scale", lam_noise_scale, "Noise scale")->capture_default_str();
    lam->add_option("--n", lam_n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    lam->add_option("--trials", lam_trials, "Monte Carlo trials (>= 20)")->capture_default_str();

    // solve
    std::string solve_loss = "squared", solve_norm = "l1", solve_data;
    Index solve_group = 4;
    double solve_lambda = 0.0, solve_rel_tol = 1e-8;
    std::size_t solve_iters = 5000;
    auto* solve = app.add_subcommand("solve", "Fit a norm-regularized estimator to a data CSV (y, x1, ..., xp)");
    solve->add_option("--loss", solve_loss, "squared, logistic or poisson")
        ->check(CLI::IsMember({"squared", "logistic", "poisson"}))
        ->capture_default_str();
    solve->add_option("--norm", solve_norm, "l1, l2, linf or group")
        ->check(CLI::IsMember({"l1", "l2", "linf", "group"}))
        ->capture_default_str();
    solve->add_option("--group-size", solve_group, "Contiguous group size for --norm group")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    solve->add_option("--lambda", solve_lambda, "Regularization weight (>= 0)")->required();
    solve->add_option("--data", solve_data, "Data CSV: first column y, remaining columns the design row")
        ->required();
    solve->add_option("--max-iters", solve_iters, "Iteration cap")->capture_default_str();
    solve->add_option("--rel-tol", solve_rel_tol, "Relative objective change tolerance")->capture_default_str();

    // scaling
    std::string scaling_config;
    auto* scaling = app.add_subcommand("scaling", "Recovery-error scaling sweep from a JSON experiment config");
    scaling->add_option("--config", scaling_config, "Experiment config (JSON)")->required();

    // sandwich
    Index sw_p = 3;
    double sw_beta = 2.0, sw_rho = 1.0;
    std::size_t sw_mc = 10000, sw_grid = 20000;
    std::string sw_norm = "l1";
    Index sw_group = 1;
    auto* sandwich = app.add_subcommand("sandwich", "Brute-force width sandwich check at theta* = e1 (p <= 8)");
    sandwich->add_option("--p", sw_p, "Dimension (at most 8)")->check(CLI::PositiveNumber)->capture_default_str();
    sandwich->add_option("--norm", sw_norm, "l1, l2, linf or group")
        ->check(CLI::IsMember({"l1", "l2", "linf", "group"}))
        ->capture_default_str();
    sandwich->add_option("--group-size", sw_group, "Contiguous group size for --norm group")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sandwich->add_option("--beta", sw_beta, "Error-set parameter beta > 1")->capture_default_str();
    sandwich->add_option("--rho", sw_rho, "Ball radius")->capture_default_str();
    sandwich->add_option("--mc", sw_mc, "Gaussian draws")->check(CLI::PositiveNumber)->capture_default_str();
    sandwich->add_option("--grid", sw_grid, "Sphere directions in the brute-force grid")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    for (auto* sub : app.get_subcommands({})) add_global_opts(sub, g, seed_text);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: E_USAGE: " << msg << "\n";
        return 1;
    }

    try {
        if (seed_text.empty()) {
            g.seed = default_seed();
        } else {
            std::size_t pos = 0;
            try {
                g.seed = std::stoull(seed_text, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != seed_text.size() || seed_text.front() == '-')
                throw UsageError("--seed must be an unsigned integer");
        }
        set_thread_count(g.threads);

        if (width->parsed()) {
            ExperimentConfig cfg = problem_config(width_o, g.seed);
            Json seeds = Json::object();
            Json rec;
            if (width_target == "ball") {
                const Norm norm = cfg.norm.build(cfg.p);
                rec = to_json(width_norm_ball(norm, width_mc, g.seed));
                seeds["width"] = g.seed;
            } else if (width_target == "cap") {
                const TrialContext ctx = prepare_context(cfg);
                const Seed ws = derive_seed(g.seed, 1);
                rec = to_json(width_cap(ctx.cap, width_mc, ws));
                rec["rejection_rate"] = ctx.cap.rejection_rate;
                seeds["cap"] = ctx.cap.seed;
                seeds["width"] = ws;
            } else {
                const Norm norm = cfg.norm.build(cfg.p);
                const SupportSpec sup{norm.kind() == NormKind::GroupL2 ? 0 : width_o.s,
                                      norm.kind() == NormKind::GroupL2 ? width_o.s : 0};
                rec = {{"target", "cone(" + norm.describe() + ", s=" + std::to_string(width_o.s) + ")"},
                       {"mean", width_cone_analytic(norm, sup)},
                       {"stderr", 0.0},
                       {"n_mc", 0},
                       {"seed", g.seed}};
            }
            emit(g, canonical_dump(rec));
            Json resolved = problem_json(width_o);
            resolved["mc"] = width_mc;
            resolved["target"] = width_target;
            write_manifest(g, "width", resolved, seeds, {g.out.empty() ? "-" : g.out});
        } else if (re->parsed()) {
            ExperimentConfig cfg = problem_config(re_o, g.seed);
            const auto grid = parse_grid(re_grid);
            const TrialContext ctx = prepare_context(cfg);
            const Seed ws = derive_seed(g.seed, 1);
            const double w_hat = width_cap(ctx.cap, re_o.width_mc, ws).mean;
            const DesignFamily fam = design_family_from_string(re_design);
            const bool aniso = fam == DesignFamily::GaussianAnisotropic;
            const CovarianceSpec cov = aniso ? CovarianceSpec::ar1(re_o.p, re_rho) : CovarianceSpec::identity(re_o.p);
            std::string text;
            std::vector<ConditionReport> reports;
            for (Index n : grid) {
                for (std::size_t k = 0; k < re_seeds; ++k) {
                    DesignSpec d = aniso ? DesignSpec::anisotropic(n, cov, 0)
                                         : DesignSpec::isotropic(n, re_o.p, fam, 0);
                    d.seed = derive_seed(derive_seed(g.seed, static_cast<std::uint64_t>(n)), k);
                    const Matrix X = sample_design(d);
                    ConditionReport r = aniso ? aniso_re_check(X, ctx.cap, cov, re_c, w_hat) : re_statistic(X, ctx.cap);
                    r.w_hat = w_hat;
                    Json j = to_json(r);
                    j["record"] = "trial";
                    j["seed"] = k;
                    text += canonical_line(j);
                    reports.push_back(std::move(r));
                }
            }
            std::set<Index> distinct(grid.begin(), grid.end());
            if (!aniso && distinct.size() >= 4) {
                Json j = to_json(rip_envelope(reports));
                j["record"] = "envelope";
                text += canonical_line(j);
            }
            emit(g, text);
            Json resolved = problem_json(re_o);
            resolved["design"] = to_string(fam);
            resolved["n_grid"] = grid;
            resolved["seeds"] = re_seeds;
            if (aniso) {
                resolved["rho"] = re_rho;
                resolved["envelope_c"] = re_c;
            }
            write_manifest(g, "re-check", resolved, {{"cap", ctx.cap.seed}, {"width", ws}},
                           {g.out.empty() ? "-" : g.out});
        } else if (rsc->parsed()) {
            ExperimentConfig cfg = problem_config(rsc_o, g.seed);
            cfg.loss = loss_kind_from_string(rsc_loss);
            const auto grid = parse_grid(rsc_grid);
            const TrialContext ctx = prepare_context(cfg);
            const GlmCurvature curv = glm_curvature(ctx.loss, rsc_T);
            const Seed ws = derive_seed(g.seed, 1);
            const double w_hat = width_cap(ctx.cap, rsc_o.width_mc, ws).mean;
            std::string text;
            for (Index n : grid) {
                for (std::size_t k = 0; k < rsc_seeds; ++k) {
                    const Seed ds = derive_seed(derive_seed(g.seed, static_cast<std::uint64_t>(n)), k);
                    const Matrix X = sample_design(DesignSpec::isotropic(n, rsc_o.p, DesignFamily::GaussianIsotropic, ds));
                    ConditionReport r = rsc_glm_statistic(ctx.loss, X, ctx.theta_star, ctx.cap, curv);
                    r.w_hat = w_hat;
                    Json j = to_json(r);
                    j["record"] = "trial";
                    j["seed"] = k;
                    j["curvature"] = to_json(curv);
                    text += canonical_line(j);
                }
            }
            emit(g, text);
            Json resolved = problem_json(rsc_o);
            resolved["loss"] = rsc_loss;
            resolved["T"] = rsc_T;
            resolved["n_grid"] = grid;
            resolved["seeds"] = rsc_seeds;
            write_manifest(g, "rsc-glm", resolved, {{"cap", ctx.cap.seed}, {"width", ws}},
                           {g.out.empty() ? "-" : g.out});
        } else if (lam->parsed()) {
            ExperimentConfig cfg = problem_config(lam_o, g.seed);
            const Norm norm = cfg.norm.build(cfg.p);
            const LossObject loss{loss_kind_from_string(lam_loss)};
            const DesignFamily fam = design_family_from_string(lam_design);
            const DesignSpec d = fam == DesignFamily::GaussianAnisotropic
                                     ? DesignSpec::anisotropic(lam_n, CovarianceSpec::ar1(lam_o.p, lam_rho), 0)
                                     : DesignSpec::isotropic(lam_n, lam_o.p, fam, 0);
            const NoiseSpec noise{noise_family_from_string(lam_noise), lam_noise_scale, 0};
            const Vector theta = sparse_theta(lam_o.p, lam_o.s, 1.0, derive_seed(g.seed, 0x7e7a));
            LambdaOptions opts;
            opts.width_mc = lam_o.width_mc;
            const LambdaReport r = lambda_report(loss, norm, d, noise, theta, lam_o.beta, lam_trials, g.seed, opts);
            Json j = to_json(r);
            j["solver_lambda"] = r.solver_lambda(loss);
            emit(g, canonical_dump(j));
            Json resolved = problem_json(lam_o);
            resolved["loss"] = lam_loss;
            resolved["design"] = to_string(fam);
            resolved["noise"] = to_string(noise.family);
            resolved["noise_scale"] = lam_noise_scale;
            resolved["n"] = lam_n;
            resolved["trials"] = lam_trials;
            if (fam == DesignFamily::GaussianAnisotropic) resolved["rho"] = lam_rho;
            write_manifest(g, "lambda", resolved, {{"trials", g.seed}, {"theta_star", derive_seed(g.seed, 0x7e7a)}},
                           {g.out.empty() ? "-" : g.out});
        } else if (solve->parsed()) {
            auto [X, y] = read_data_csv(solve_data);
            NormConfig nc{solve_norm, {}, solve_norm == "group" ? solve_group : 0};
            const Norm norm = nc.build(X.cols());
            const LossObject loss{loss_kind_from_string(solve_loss)};
            SolverConfig sc;
            sc.lambda = solve_lambda;
            sc.max_iters = solve_iters;
            sc.rel_tol = solve_rel_tol;
            const FitResult fit = solve_regularized(loss, norm, X, y, sc);
            emit(g, canonical_dump(to_json(fit)));
            Json resolved{{"loss", solve_loss}, {"norm", solve_norm}, {"lambda", solve_lambda},
                          {"data", solve_data},  {"max_iters", solve_iters}, {"rel_tol", solve_rel_tol}};
            if (solve_norm == "group") resolved["group_size"] = solve_group;
            write_manifest(g, "solve", resolved, Json::object(), {g.out.empty() ? "-" : g.out});
        } else if (scaling->parsed()) {
            ExperimentConfig cfg = ExperimentConfig::from_file(scaling_config);
            if (!seed_text.empty() || std::getenv("NORMGEO_SEED")) cfg.seed = g.seed;
            g.seed = cfg.seed;
            if (!g.out.empty()) cfg.output = g.out;
            if (cfg.output.empty()) cfg.output = ".";
            g.out = cfg.output;
            const SweepResult res = scaling_sweep(cfg, cfg.output);
            write_manifest(g, "scaling", cfg.to_json(),
                           {{"theta_star", derive_seed(cfg.seed, 0x7e7a)}, {"cap", derive_seed(cfg.seed, 0xca9)}},
                           {"trials.csv", "summary.json"}, true);
            std::cout << "slope " << format_double(res.fit.slope) << " r2 " << format_double(res.fit.r2) << "\n";
        } else if (sandwich->parsed()) {
            if (sw_p > kSandwichMaxDim)
                throw DimensionTooLargeError("sandwich brute force is limited to p <= " +
                                             std::to_string(kSandwichMaxDim) + " (got p=" + std::to_string(sw_p) + ")");
            NormConfig nc{sw_norm, {}, sw_norm == "group" ? sw_group : 0};
            const Norm norm = nc.build(sw_p);
            Vector theta = Vector::Zero(sw_p);
            theta[0] = 1.0;
            const SandwichReport r = sandwich_check(theta, sw_beta, sw_rho, norm, sw_mc, sw_grid, g.seed);
            emit(g, canonical_dump(to_json(r)));
            Json resolved{{"p", sw_p},   {"norm", sw_norm}, {"beta", sw_beta},
                          {"rho", sw_rho}, {"mc", sw_mc},    {"grid", sw_grid}, {"theta_star", "e1"}};
            write_manifest(g, "sandwich", resolved, {{"sandwich", g.seed}}, {g.out.empty() ? "-" : g.out});
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.tag() << ": " << e.what() << "\n";
        return e.is_input_error() ? 1 : 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: E_INPUT: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
