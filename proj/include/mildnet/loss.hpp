#pragma once

#include <string>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Margin loss ell applied to z = -y*f(x).  ell must be convex, nondecreasing
// and twice differentiable with ell and ell' both 1-Lipschitz;
// deriv_at_zero = ell'(0) in (0,1] and expbound_a is a constant a > 0 with
// ell'(z) <= exp(a*z) everywhere.
struct LossSpec {
    std::string name;
    double (*ell)(double);
    double (*dell)(double);
    double deriv_at_zero;
    double expbound_a;
};

LossSpec logistic_loss();
LossSpec loss_by_name(const std::string& name);

// Per-unit regularization weights; all entries live in [lam0/2, lam0] and only
// move through update_coefficients, at most K times per training run.
struct CoeffVector {
    std::vector<double> lam;
    double lam0 = 0.0;
    int updates_done = 0;
};

CoeffVector make_coeff_vector(int m, double lam0);
void check_coeff_vector(const CoeffVector& lam, int m);

// Objective sum_i ell(-y_i f(x_i)) + sum_j lam_j alpha_j^2 and its alpha
// gradient.  grad_alpha is the direct form; grad_alpha_factored computes
// 2*alpha_j*(lam_j - s_j*rho_j) with s_j = sgn(alpha_j); the two agree
// everywhere and the factored form makes sign preservation explicit.
double empirical_loss(const NetParams& p, const CoeffVector& lam, const Dataset& data,
                      const MaskSeries& masks, const LossSpec& loss);
std::vector<double> grad_alpha(const NetParams& p, const CoeffVector& lam, const Dataset& data,
                               const MaskSeries& masks, const LossSpec& loss);
std::vector<double> grad_alpha_factored(const NetParams& p, const CoeffVector& lam,
                                        const Dataset& data, const MaskSeries& masks,
                                        const LossSpec& loss);

// beta_i = ell'(-y_i f(x_i)), in (0,1] for the built-in losses at desk scale.
std::vector<double> per_sample_derivs(const NetParams& p, const Dataset& data,
                                      const MaskSeries& masks, const LossSpec& loss);

// Local Lipschitz constant of the alpha gradient around alpha, valid while
// every coordinate moves by at most half its magnitude.
double grad_lipschitz_bound(const std::vector<double>& alpha, int n, double lam0);

}  // namespace mildnet
