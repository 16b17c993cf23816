#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Proposed replacement direction for one mask, with the solver's value of
// the weighted correlation objective and its approximation budget (the true
// maximum is at most g + budget when certified is true).
struct DirectionCandidate {
    int s = 0;
    std::vector<double> v;  // unit vector, length d, supported on mask s
    double g = 0.0;
    double budget = 0.0;
    bool certified = false;
    std::string solver;
    double raw_value = 0.0;  // random solver: best value before normalization
    bool degenerate = false;
    long long evals = 0;  // objective evaluations spent
};

// |sum_i beta_i y_i relu(<u, x_i masked to s>)| for a unit-ball direction u.
double g_objective(const std::vector<double>& u, int s, const std::vector<double>& beta,
                   const Dataset& data, const MaskSeries& masks);

// Symmetric grid search over the mask support with per-coordinate step
// lam0/(n*sqrt(r)); grid points outside the unit ball are rescaled onto the
// sphere.  Certified budget lam0.  Throws infeasible_solver_error when the
// grid would exceed eval_cap points.
DirectionCandidate solve_exhaustive(int s, const std::vector<double>& beta, const Dataset& data,
                                    const MaskSeries& masks, double lam0,
                                    long long eval_cap = 100000000);

// Randomized solver for the full mask (r = d): 2M uniform directions, the
// first half oriented +1 and the rest -1; each is nudged by r_pert times the
// normalized beta-weighted sum of its active points, and the best nudged
// candidate is returned normalized.  Deterministic in seed.
DirectionCandidate solve_random_directions(const std::vector<double>& beta, const Dataset& data,
                                           const MaskSeries& masks, int M, double r_pert,
                                           std::uint64_t seed);

// True iff every mask's candidate value is at most 5*lam0 (boundary counts
// as terminated).
bool check_termination(const std::vector<DirectionCandidate>& cands, double lam0);

struct PerturbResult {
    int unit = -1;
    double sign = 0.0;
    double loss_before = 0.0;
    double loss_after = 0.0;
    double drop = 0.0;            // loss_before - loss_after
    double guaranteed_drop = 0.0; // g/lam0 - 4
};

// Replace the lowest-index unit of mask cand.s with |alpha| <= 1/(2*sqrt(n))
// by (sign/sqrt(lam0), sign*v).  Requires cand.g > 5*lam0 and lam0 >= sqrt(n);
// throws stale_gd_error when no unit qualifies.  The realized loss drop is
// checked against both 1 and g/lam0 - 4.
PerturbResult perturb_inactive(NetParams& p, const CoeffVector& lam,
                               const DirectionCandidate& cand, const Dataset& data,
                               const MaskSeries& masks, const LossSpec& loss);

}  // namespace mildnet
