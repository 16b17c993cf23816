#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Step size frozen at descent entry: 1 / (72 * max(loss_at_entry, 2n)).
double step_size(double loss_at_entry, int n);

struct GDOptions {
    long long max_iters = -1;      // -1: cap by the convergence-rate bound only
    double grad_threshold = -1.0;  // -1: lam0 / (16 K sqrt(max(n,1)))
    bool record_curve = true;      // keep per-step loss/gradient history
};

struct GDTrace {
    double eta = 0.0;
    double threshold = 0.0;
    long long iterations = 0;
    bool converged = false;
    double loss_entry = 0.0;
    double loss_exit = 0.0;
    double grad_norm_exit = 0.0;
    double min_grad_sq = 0.0;  // over gradients actually stepped on
    long long rate_cap = 0;
    std::vector<double> loss_curve;  // length iterations+1 when recorded
    std::vector<double> grad_norms;  // same length
    std::vector<int> signs_entry;

    // Counters for the per-step guarantees; all stay zero.
    long long sign_violations = 0;
    long long halving_violations = 0;  // |delta alpha_j| > |alpha_j|/2
    long long monotone_violations = 0;
    long long decrease_violations = 0;  // drop below eta*|grad|^2/2
};

// Gradient descent on the scale coordinates with directions and signs frozen.
// Runs until |grad|_2 <= threshold (non-strict), the caller's max_iters, or
// the rate cap; exceeding the rate cap throws nonconvergence_error.  params
// is updated in place; every step preserves signs and moves each coordinate
// by at most half its magnitude.
GDTrace run_inner_gd(NetParams& p, const CoeffVector& lam, const Dataset& data,
                     const MaskSeries& masks, const LossSpec& loss, int K,
                     const GDOptions& options = {});

// Per-step history as "iteration,loss,grad_norm" rows.
void write_gd_trace_csv(const GDTrace& trace, const std::string& path);

}  // namespace mildnet
