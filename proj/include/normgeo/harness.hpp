#pragma once

#include "normgeo/geometry.hpp"
#include "normgeo/json_io.hpp"
#include "normgeo/losses.hpp"
#include "normgeo/norms.hpp"
#include "normgeo/randomdesign.hpp"
#include "normgeo/regparam.hpp"
#include "normgeo/solver.hpp"
#include "normgeo/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace normgeo {

struct NormConfig {
    std::string type = "l1";                  // l1 | l2 | linf | group
    std::vector<std::vector<Index>> groups;   // explicit partition, 0-based
    Index group_size = 0;                     // or contiguous groups of this size

    Norm build(Index p) const;
};

struct CovarianceConfig {
    std::string kind = "identity";  // identity | ar1 | explicit
    double rho = 0.0;
    std::string csv;                // explicit: path to header-free CSV

    CovarianceSpec build(Index p) const;
};

struct ExperimentConfig {
    Seed seed = 1;
    NormConfig norm;
    LossKind loss = LossKind::Squared;
    DesignFamily design_family = DesignFamily::GaussianIsotropic;
    Index p = 100;
    CovarianceConfig covariance;
    double psi2_bound = 1.0;
    NoiseFamily noise_family = NoiseFamily::Gaussian;
    double noise_scale = 1.0;
    Index sparsity = 4;        // nonzeros (or active groups for the group norm)
    double magnitude = 1.0;
    double beta = 2.0;
    std::vector<Index> n_grid;
    std::size_t seeds = 1;
    std::size_t cap_dirs = 500;
    std::size_t lambda_trials = 100;
    std::size_t width_mc = 2000;
    std::optional<double> fixed_lambda;  // solver-convention lambda
    std::size_t max_iters = 5000;
    double rel_tol = 1e-8;
    std::string output = ".";

    void validate() const;
    static ExperimentConfig from_json(const Json& j);
    static ExperimentConfig from_file(const std::string& path);
    Json to_json() const;
};

/// Per-experiment state shared by all trials: theta* (drawn once from the
/// root seed), the standard cap sample, and psi.
struct TrialContext {
    Norm norm;
    LossObject loss;
    Vector theta_star;
    CapSample cap;
    double psi = 0.0;
    bool psi_analytic = true;
};

TrialContext prepare_context(const ExperimentConfig& cfg);

struct TrialRecord {
    Index n = 0;
    std::size_t seed = 0;
    double lambda_used = 0.0;
    double err_l2 = 0.0;
    double kappa_hat = 0.0;
    double theoretical_bound = 0.0;  // NaN when kappa_hat <= 0
    bool bound_valid = false;
    std::size_t solver_iters = 0;

    bool operator==(const TrialRecord& o) const;
};

struct TrialOutcome {
    TrialRecord record;
    bool failed = false;
    bool converged = false;
    bool in_error_set = false;  // realized error passes E_r membership (slack 1e-6)
    double grad_dual = 0.0;     // R*(grad L(theta*)) in the solver's convention
    std::string error;
};

/// psi * ((1+beta)/beta) * lambda / kappa; NaN (undefined) when kappa <= 0.
double theoretical_bound(double psi, double beta, double lambda, double kappa);

/// Solver-convention lambda at sample size n from lambda_report.
LambdaReport calibrate_lambda(const ExperimentConfig& cfg, const TrialContext& ctx, Index n);

TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, const TrialContext& ctx, Index n, std::size_t seed,
                                double lambda);
/// Standalone form: builds the context and calibrates lambda itself.
TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, Index n, std::size_t seed);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n_points = 0;
};

/// log(err) ~ intercept + slope * log(n).
ScalingFit fit_loglog(const std::vector<double>& ns, const std::vector<double>& errs);

struct GridPointSummary {
    Index n = 0;
    double lambda = 0.0;
    double median_err = 0.0;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
};

struct SweepResult {
    ScalingFit fit;
    std::vector<TrialOutcome> trials;
    std::vector<GridPointSummary> grid;
    std::size_t bound_valid_count = 0;
    std::size_t bound_holds_count = 0;  // among converged, bound_valid trials
    std::size_t converged_valid_count = 0;
    std::size_t membership_violations = 0;  // among converged bound_valid trials
    std::vector<std::string> warnings;

    std::vector<TrialRecord> records() const;  // successful trials only
    Json summary_json() const;
};

/// Runs every (n, seed) trial; writes trials.csv and summary.json into
/// `output_dir` when it is nonempty.
SweepResult scaling_sweep(const ExperimentConfig& cfg, const std::string& output_dir = "");

std::string trials_csv_header();
std::string trial_csv_row(const TrialRecord& r);
std::string trials_csv(const std::vector<TrialRecord>& rows);
std::vector<TrialRecord> parse_trials_csv(const std::string& text);

}  // namespace normgeo
