#include "normgeo/report.hpp"

#include <omp.h>

namespace normgeo {

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json to_json(const WidthEstimate& w) {
    return {{"target", w.target}, {"mean", w.mean}, {"stderr", w.std_error}, {"n_mc", w.n_mc}, {"seed", w.seed}};
}

Json to_json(const ConditionReport& r) {
    Json j{{"n", r.n},
           {"inf_q", r.inf_q},
           {"sup_q", r.sup_q},
           {"rsc_kappa", r.rsc_kappa},
           {"w_hat", r.w_hat},
           {"envelope_c", r.envelope_c},
           {"passed", r.passed},
           {"deviation", r.deviation()},
           {"warnings", r.warnings},
           {"verdict", "necessary condition: inf/sup taken over a finite cap sample"}};
    if (r.lambda_max > 0.0) {
        j["lambda_min"] = r.lambda_min;
        j["lambda_max"] = r.lambda_max;
        j["normalized_dev"] = r.normalized_dev;
    }
    if (r.floor_inf != 0.0 || r.min_gap != 0.0 || r.clamped != 0) {
        j["floor_inf"] = r.floor_inf;
        j["min_gap"] = r.min_gap;
        j["eps1_empirical"] = r.eps1_empirical;
        j["eps2_empirical"] = r.eps2_empirical;
        j["clamped"] = r.clamped;
    }
    return j;
}

Json to_json(const EnvelopeFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
            {"c", f.c},         {"n_points", f.n_points},   {"warnings", f.warnings}};
}

Json to_json(const LambdaReport& r) {
    return {{"mean_stat", r.mean_stat},   {"stderr", r.std_error}, {"q95", r.q95},
            {"n_trials", r.n_trials},     {"width_ratio", r.width_ratio},
            {"w_ball", r.w_ball},         {"xi", r.xi},            {"beta", r.beta},
            {"recommended_lambda", r.recommended_lambda}};
}

Json to_json(const SandwichReport& r) {
    return {{"w_constrained", to_json(r.w_constrained)},
            {"w_regularized", to_json(r.w_regularized)},
            {"w_constrained_cone", to_json(r.w_constrained_cone)},
            {"factor", r.factor},
            {"lower_slack", r.lower_slack},
            {"upper_slack", r.upper_slack},
            {"lower_holds", r.lower_holds},
            {"upper_holds", r.upper_holds},
            {"grid_size", r.grid_size},
            {"holds", r.holds()}};
}

Json to_json(const CompatibilityEstimate& c) {
    Json j{{"empirical_sup", c.empirical_sup}, {"n_samples", c.n_samples}, {"rejection_rate", c.rejection_rate}};
    j["analytic_bound"] = c.analytic_bound ? Json(*c.analytic_bound) : Json(nullptr);
    return j;
}

Json to_json(const FitResult& f) {
    return {{"theta_hat", vector_json(f.theta_hat)},
            {"iters", f.iters},
            {"objective_trace", f.objective_trace},
            {"converged", f.converged},
            {"final_step", f.final_step},
            {"residual", f.residual},
            {"clamped", f.clamped}};
}

Json to_json(const GlmCurvature& c) {
    return {{"T", c.T},
            {"ell", c.ell},
            {"eps1_bar", c.eps1_bar},
            {"eps2_bar", c.eps2_bar},
            {"tail_constant", c.tail_constant},
            {"psi2_bound", c.psi2_bound},
            {"kappa1", c.kappa1()}};
}

void set_thread_count(int n) {
    omp_set_max_active_levels(1);
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace normgeo
