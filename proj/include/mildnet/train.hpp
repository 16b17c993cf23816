#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/inner_gd.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"
#include "mildnet/perturb.hpp"
#include "mildnet/reg_coeff.hpp"

namespace mildnet {

struct TrainConfig {
    int r = 0;               // mask width; 0 means full (r = d)
    int m = 0;               // units; 0 means (n+1) * (d - r + 1)
    double lam0 = 0.0;       // 0 means sqrt(n) * ln(n)
    double C = 0.0;          // declared solver budget; 0 means lam0
    std::string loss = "logistic";
    std::string solver = "auto";  // auto | exhaustive | random
    int M = 64;                   // direction pairs for the random solver
    double r_pert = 0.05;
    std::uint64_t init_seed = 1;
    std::uint64_t solver_seed = 1;
    long long exhaustive_eval_cap = 100000000;
    double delta = 0.05;  // confidence level for the diagnostic bounds
    int max_stale_retries = 3;
};

struct BoundReport {
    bool have_margin = false;  // gamma/E provenance available
    double gamma = 0.0;
    int E = 0;
    double surrogate_sum = 0.0;        // sum_i ell'(-y_i f(x_i)) at the final iterate
    double surrogate_bound = 0.0;      // (5*lam0 + C + 2E) / gamma
    double train_error_bound = 0.0;    // (5*lam0 + C + 2E) / (ell'(0) * gamma * n)
    bool train_error_bound_vacuous = true;
    double population_bound = 0.0;     // explicit finite-sample bound at confidence delta
    double delta = 0.0;
    // Work accounting: measured operation tallies and the matching
    // closed-form budget with unit constants.
    long long measured_inner_steps = 0;
    long long measured_solver_evals = 0;
    long long measured_coeff_updates = 0;
    double complexity_formula = 0.0;
};

struct OuterRecord {
    int k = 0;
    long long inner_T = 0;
    double loss_pre = 0.0;   // after the coefficient update, before descent
    double loss_post = 0.0;  // at descent exit
    double grad_norm = 0.0;
    int perturbed_mask = -1;  // -1: terminated this iteration
    double g_value = 0.0;     // accepted candidate's value, or max value at termination
    double lam_min = 0.0;
    double lam_max = 0.0;
    CoeffUpdateRecord coeff;
    std::vector<double> g_per_mask;
    double perturb_drop = 0.0;
    double perturb_guarantee = 0.0;
    double loss_end = 0.0;  // after the perturbation, if any
    int stale_retries = 0;
    // Descent certificates for this iteration.
    double eta = 0.0;
    double grad_threshold = 0.0;
    long long sign_violations = 0;
    long long halving_violations = 0;
    long long monotone_violations = 0;
    long long decrease_violations = 0;
    long long gd_violations = 0;  // sum of the four counters above
    double min_grad_sq = 0.0;
    double rate_bound = 0.0;  // 144 * L_entry * max(L_entry, 2n) / T
    double small_neuron_sq = 0.0;  // sum over masks of min alpha^2
    double small_neuron_bound = 0.0;
};

struct TrainReport {
    std::string version = "mildnet-report v1";
    TrainConfig config;  // resolved values
    int n = 0, d = 0, m = 0, K = 0, k0 = -1;
    double lam0 = 0.0;
    std::uint64_t data_seed = 0;
    bool terminated = false;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double final_grad_norm = 0.0;
    double grad_threshold = 0.0;
    double alpha_norm = 0.0;
    double alpha_norm_bound = 0.0;  // 2*sqrt(K/lam0)
    bool solver_certified = false;
    std::vector<double> final_g_per_mask;
    double train_error = 0.0;
    std::vector<OuterRecord> outer;
    BoundReport bounds;
    double wall_clock_sec = 0.0;
};

struct TrainResult {
    NetParams params;
    TrainReport report;
};

// Outer-iteration budget: the entry loss rounded up, floored at twice the
// sample count.
int outer_budget(double initial_loss, int n);

// Balanced start: every unit gets scale min(1, sqrt(n/(4*m*lam0))) with
// alternating signs and a uniform direction on its mask support.
NetParams init_params(const MaskSeries& masks, int m, int n, double lam0, std::uint64_t seed);

// Fill in defaulted fields of cfg against a concrete dataset and validate.
TrainConfig resolve_config(const TrainConfig& cfg, const Dataset& data);

// Full training loop: coefficient update, inner descent, per-mask direction
// candidates, then terminate or perturb; at most K outer iterations.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

// Fraction of samples with sgn(f(x_i)) != y_i; f == 0 counts as an error.
double training_error(const NetParams& p, const MaskSeries& masks, const Dataset& data);

// Report serialization.  JSON field order is fixed, so identical runs produce
// identical bytes apart from the wall_clock_sec line.
std::string report_to_json(const TrainReport& report);
void write_report_json(const TrainReport& report, const std::string& path);
// One row per outer iteration:
// outer_k,inner_T,loss_pre,loss_post,grad_norm,perturbed_mask,g_value,lam_min,lam_max
std::string trace_to_csv(const TrainReport& report);
void write_trace_csv(const TrainReport& report, const std::string& path);

void save_params(const NetParams& p, int r, const std::string& path);
struct LoadedParams {
    NetParams params;
    int r = 0;
};
LoadedParams load_params(const std::string& path);

}  // namespace mildnet
