#include "mildnet/perturb.hpp"

#include <cmath>
#include <limits>

#include "mildnet/rng.hpp"
#include "mildnet/util.hpp"

namespace mildnet {

namespace {

double masked_abs_sum(const std::vector<double>& u, int s, const std::vector<double>& beta,
                      const Dataset& data, const MaskSeries& masks, bool take_abs) {
    double acc = 0.0;
    for (int i = 0; i < data.n; ++i)
        acc += beta[static_cast<std::size_t>(i)] * data.ys[static_cast<std::size_t>(i)] *
               relu(masks.masked_dot(u.data(), data.x(i), s));
    return take_abs ? std::fabs(acc) : acc;
}

}  // namespace

double g_objective(const std::vector<double>& u, int s, const std::vector<double>& beta,
                   const Dataset& data, const MaskSeries& masks) {
    check_dataset(data);
    require(masks.d == data.d, "g_objective: dataset/mask dimension mismatch");
    require(static_cast<int>(u.size()) == masks.d, "g_objective: direction size != d");
    require(static_cast<int>(beta.size()) == data.n, "g_objective: beta size != n");
    require(0 <= s && s < masks.period, "g_objective: mask index out of range");
    for (double b : beta) require(b >= 0.0, "g_objective: beta must be nonnegative");
    double nrm = 0.0;
    for (int k = s; k < s + masks.r; ++k)
        nrm += u[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
    require(nrm <= 1.0 + 1e-9, "g_objective: direction must lie in the unit ball");
    return masked_abs_sum(u, s, beta, data, masks, true);
}

DirectionCandidate solve_exhaustive(int s, const std::vector<double>& beta, const Dataset& data,
                                    const MaskSeries& masks, double lam0, long long eval_cap) {
    check_dataset(data);
    require(masks.d == data.d, "solve_exhaustive: dataset/mask dimension mismatch");
    require(0 <= s && s < masks.period, "solve_exhaustive: mask index out of range");
    require(static_cast<int>(beta.size()) == data.n, "solve_exhaustive: beta size != n");
    require(data.n >= 1, "solve_exhaustive: need at least one sample");
    require(lam0 > 0.0, "solve_exhaustive: lam0 must be positive");
    for (double b : beta) require(b >= 0.0, "solve_exhaustive: beta must be nonnegative");

    const int r = masks.r;
    const double step = lam0 / (static_cast<double>(data.n) * std::sqrt(static_cast<double>(r)));
    const long long half = static_cast<long long>(std::ceil(1.0 / step));
    const long long per_axis = 2 * half + 1;
    double total = 1.0;
    for (int k = 0; k < r; ++k) {
        total *= static_cast<double>(per_axis);
        if (total > static_cast<double>(eval_cap))
            throw infeasible_solver_error(
                "exhaustive grid needs about " + std::to_string(per_axis) + "^" +
                std::to_string(r) + " evaluations, beyond the cap of " +
                std::to_string(eval_cap));
    }

    DirectionCandidate cand;
    cand.s = s;
    cand.solver = "exhaustive";
    cand.budget = lam0;
    cand.certified = true;

    std::vector<long long> digit(static_cast<std::size_t>(r), -half);
    std::vector<double> u(static_cast<std::size_t>(r));
    std::vector<double> best(static_cast<std::size_t>(r), 0.0);
    double best_val = -1.0;
    bool done = false;
    while (!done) {
        double nrm_sq = 0.0;
        for (int k = 0; k < r; ++k) {
            u[static_cast<std::size_t>(k)] = static_cast<double>(digit[static_cast<std::size_t>(k)]) * step;
            nrm_sq += u[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
        }
        if (nrm_sq > 1.0) {
            const double inv = 1.0 / std::sqrt(nrm_sq);
            for (double& c : u) c *= inv;
        }
        double acc = 0.0;
        for (int i = 0; i < data.n; ++i)
            acc += beta[static_cast<std::size_t>(i)] * data.ys[static_cast<std::size_t>(i)] *
                   relu(dot(u.data(), data.x(i) + s, r));
        const double val = std::fabs(acc);
        ++cand.evals;
        if (val > best_val) { best_val = val; best = u; }

        int k = 0;
        while (k < r) {
            if (++digit[static_cast<std::size_t>(k)] <= half) break;
            digit[static_cast<std::size_t>(k)] = -half;
            ++k;
        }
        done = (k == r);
    }

    cand.g = best_val;
    cand.raw_value = best_val;
    cand.degenerate = (best_val == 0.0);
    cand.v.assign(static_cast<std::size_t>(masks.d), 0.0);
    for (int k = 0; k < r; ++k) cand.v[static_cast<std::size_t>(s + k)] = best[static_cast<std::size_t>(k)];
    return cand;
}

DirectionCandidate solve_random_directions(const std::vector<double>& beta, const Dataset& data,
                                           const MaskSeries& masks, int M, double r_pert,
                                           std::uint64_t seed) {
    check_dataset(data);
    require(masks.d == data.d, "solve_random_directions: dataset/mask dimension mismatch");
    require(masks.period == 1, "solve_random_directions: requires the full mask (r = d)");
    require(static_cast<int>(beta.size()) == data.n, "solve_random_directions: beta size != n");
    require(M >= 1, "solve_random_directions: M must be >= 1");
    require(r_pert > 0.0 && r_pert < 1.0, "solve_random_directions: need 0 < r_pert < 1");
    require(data.n >= 1, "solve_random_directions: need at least one sample");
    for (double b : beta) require(b >= 0.0, "solve_random_directions: beta must be nonnegative");

    const int d = masks.d;
    DirectionCandidate cand;
    cand.s = 0;
    cand.solver = "random";
    cand.certified = false;
    cand.budget = std::numeric_limits<double>::quiet_NaN();

    double beta_total = 0.0;
    for (double b : beta) beta_total += b;
    if (beta_total == 0.0) {
        cand.degenerate = true;
        cand.v.assign(static_cast<std::size_t>(d), 0.0);
        cand.v[0] = 1.0;
        return cand;
    }

    Rng rng(seed, "random-directions");
    std::vector<double> omega(static_cast<std::size_t>(d));
    std::vector<double> nudge(static_cast<std::size_t>(d));
    std::vector<double> c(static_cast<std::size_t>(d));
    std::vector<double> best_c(static_cast<std::size_t>(d), 0.0);
    double best_raw = -1.0;
    for (int j = 0; j < 2 * M; ++j) {
        const double orient = j < M ? 1.0 : -1.0;
        rng.unit_vector(omega.data(), d);
        std::fill(nudge.begin(), nudge.end(), 0.0);
        for (int i = 0; i < data.n; ++i) {
            if (dot(omega.data(), data.x(i), d) < 0.0) continue;
            const double w = data.ys[static_cast<std::size_t>(i)] * beta[static_cast<std::size_t>(i)];
            const double* xi = data.x(i);
            for (int k = 0; k < d; ++k) nudge[static_cast<std::size_t>(k)] += w * xi[k];
        }
        const double nn = norm2(nudge);
        if (nn > 1e-300)
            for (double& w : nudge) w /= nn;
        else
            std::fill(nudge.begin(), nudge.end(), 0.0);
        for (int k = 0; k < d; ++k)
            c[static_cast<std::size_t>(k)] =
                omega[static_cast<std::size_t>(k)] + r_pert * orient * nudge[static_cast<std::size_t>(k)];
        double acc = 0.0;
        for (int i = 0; i < data.n; ++i)
            acc += beta[static_cast<std::size_t>(i)] * data.ys[static_cast<std::size_t>(i)] *
                   relu(dot(c.data(), data.x(i), d));
        const double raw = std::fabs(acc);
        ++cand.evals;
        if (raw > best_raw) { best_raw = raw; best_c = c; }
    }

    const double cn = norm2(best_c);
    require_invariant(cn > 0.0, "random solver produced a zero candidate");
    for (double& w : best_c) w /= cn;
    cand.raw_value = best_raw;
    cand.v = best_c;
    cand.g = masked_abs_sum(cand.v, 0, beta, data, masks, true);
    return cand;
}

bool check_termination(const std::vector<DirectionCandidate>& cands, double lam0) {
    require(!cands.empty(), "check_termination: no candidates");
    require(lam0 > 0.0, "check_termination: lam0 must be positive");
    for (const auto& cand : cands)
        if (cand.g > 5.0 * lam0) return false;
    return true;
}

PerturbResult perturb_inactive(NetParams& p, const CoeffVector& lam,
                               const DirectionCandidate& cand, const Dataset& data,
                               const MaskSeries& masks, const LossSpec& loss) {
    check_shapes(p, masks);
    check_dataset(data);
    check_coeff_vector(lam, p.m);
    const double lam0 = lam.lam0;
    require(cand.g > 5.0 * lam0, "perturb_inactive: candidate value must exceed 5*lam0");
    require(lam0 * lam0 >= static_cast<double>(data.n) * (1.0 - 1e-12),
            "perturb_inactive: need lam0 >= sqrt(n)");
    require(static_cast<int>(cand.v.size()) == p.d, "perturb_inactive: candidate size != d");

    const double inactive_cut = 1.0 / (2.0 * std::sqrt(static_cast<double>(data.n)));
    int unit = -1;
    for (int j = 0; j < p.m; ++j) {
        if (masks.mask_of(j) != cand.s) continue;
        if (std::fabs(p.alpha[static_cast<std::size_t>(j)]) <= inactive_cut) { unit = j; break; }
    }
    if (unit < 0)
        throw stale_gd_error("no unit of mask " + std::to_string(cand.s) + " has |alpha| <= " +
                             fmt_full(inactive_cut));

    PerturbResult res;
    res.unit = unit;
    res.loss_before = empirical_loss(p, lam, data, masks, loss);
    const std::vector<double> beta = per_sample_derivs(p, data, masks, loss);
    res.sign = sgn_pos(masked_abs_sum(cand.v, cand.s, beta, data, masks, false));
    p.alpha[static_cast<std::size_t>(unit)] = res.sign / std::sqrt(lam0);
    for (int k = 0; k < p.d; ++k) p.dir(unit)[k] = res.sign * cand.v[static_cast<std::size_t>(k)];
    res.loss_after = empirical_loss(p, lam, data, masks, loss);
    res.drop = res.loss_before - res.loss_after;
    res.guaranteed_drop = cand.g / lam0 - 4.0;
    require_invariant(res.drop >= res.guaranteed_drop * (1.0 - 1e-9) - 1e-12,
                      "perturbation drop fell short of its guarantee");
    require_invariant(res.drop >= 1.0 - 1e-9, "perturbation drop below 1");
    return res;
}

}  // namespace mildnet
