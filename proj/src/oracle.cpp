#include "mildnet/oracle.hpp"

#include <cmath>
#include <limits>

#include "mildnet/network.hpp"
#include "mildnet/util.hpp"

namespace mildnet {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Golden angle in radians, the azimuthal increment of the Fibonacci lattice.
constexpr double kGoldenAngle = 2.3999632297286533222315555066336;

struct Projected {
    int n = 0;
    int dim = 0;                 // support dimension
    std::vector<double> pts;     // n x dim, row-major, x_i restricted to the mask
    std::vector<double> weight;  // beta_i * y_i
    double beta_sum = 0.0;
};

Projected project(const std::vector<double>& beta, const Dataset& data, const MaskSeries& masks,
                  int s) {
    check_dataset(data);
    require(masks.d == data.d, "oracle: dataset/mask dimension mismatch");
    require(0 <= s && s < masks.period, "oracle: mask index out of range");
    require(static_cast<int>(beta.size()) == data.n, "oracle: beta size != n");
    Projected pr;
    pr.n = data.n;
    pr.dim = masks.r;
    pr.pts.resize(static_cast<std::size_t>(pr.n) * pr.dim);
    pr.weight.resize(static_cast<std::size_t>(pr.n));
    for (int i = 0; i < pr.n; ++i) {
        require(beta[static_cast<std::size_t>(i)] >= 0.0, "oracle: beta must be nonnegative");
        pr.beta_sum += beta[static_cast<std::size_t>(i)];
        pr.weight[static_cast<std::size_t>(i)] =
            beta[static_cast<std::size_t>(i)] * data.ys[static_cast<std::size_t>(i)];
        for (int k = 0; k < pr.dim; ++k)
            pr.pts[static_cast<std::size_t>(i) * pr.dim + k] = data.x(i)[s + k];
    }
    return pr;
}

double eval_abs(const Projected& pr, const double* u) {
    double acc = 0.0;
    for (int i = 0; i < pr.n; ++i)
        acc += pr.weight[static_cast<std::size_t>(i)] *
               relu(dot(u, pr.pts.data() + static_cast<std::size_t>(i) * pr.dim, pr.dim));
    return std::fabs(acc);
}

std::vector<double> embed(const MaskSeries& masks, int s, const double* u_support) {
    std::vector<double> u(static_cast<std::size_t>(masks.d), 0.0);
    for (int k = 0; k < masks.r; ++k) u[static_cast<std::size_t>(s + k)] = u_support[k];
    return u;
}

}  // namespace

OracleResult oracle_max_g(const std::vector<double>& beta, const Dataset& data,
                          const MaskSeries& masks, int s, long long resolution) {
    require(masks.r <= 3, "oracle_max_g: support dimension must be <= 3");
    require(resolution >= 1, "oracle_max_g: resolution must be >= 1");
    const Projected pr = project(beta, data, masks, s);

    OracleResult res;
    if (pr.dim == 1) {
        double best[1] = {1.0};
        double best_val = eval_abs(pr, best);
        const double neg[1] = {-1.0};
        const double neg_val = eval_abs(pr, neg);
        res.evals = 2;
        if (neg_val > best_val) { best_val = neg_val; best[0] = -1.0; }
        res.value = best_val;
        res.u = embed(masks, s, best);
        res.gap = 0.0;
        return res;
    }

    double best_u[3] = {0.0, 0.0, 0.0};
    double best_val = -1.0;
    if (pr.dim == 2) {
        for (long long k = 0; k < resolution; ++k) {
            const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(resolution);
            const double u[2] = {std::cos(theta), std::sin(theta)};
            const double val = eval_abs(pr, u);
            if (val > best_val) { best_val = val; best_u[0] = u[0]; best_u[1] = u[1]; }
        }
        res.evals = resolution;
        res.gap = pr.beta_sum * 3.14159265358979323846 / static_cast<double>(resolution);
    } else {
        for (long long k = 0; k < resolution; ++k) {
            const double z =
                1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(resolution);
            const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = kGoldenAngle * static_cast<double>(k);
            const double u[3] = {rad * std::cos(phi), rad * std::sin(phi), z};
            const double val = eval_abs(pr, u);
            if (val > best_val) {
                best_val = val;
                best_u[0] = u[0]; best_u[1] = u[1]; best_u[2] = u[2];
            }
        }
        res.evals = resolution;
        res.gap = pr.beta_sum * 2.0 *
                  std::sqrt(3.14159265358979323846 / static_cast<double>(resolution));
    }
    res.value = best_val;
    res.u = embed(masks, s, best_u);
    return res;
}

OracleResult subset_heuristic_max_g(const std::vector<double>& beta, const Dataset& data,
                                    const MaskSeries& masks, int s) {
    require(data.n <= 12, "subset_heuristic_max_g: n must be <= 12");
    const Projected pr = project(beta, data, masks, s);

    OracleResult res;
    res.gap = std::numeric_limits<double>::infinity();
    std::vector<double> best(static_cast<std::size_t>(pr.dim), 0.0);
    best[0] = 1.0;
    double best_val = eval_abs(pr, best.data());
    res.evals = 1;

    std::vector<double> w(static_cast<std::size_t>(pr.dim));
    for (unsigned long mask_bits = 1; mask_bits < (1ul << pr.n); ++mask_bits) {
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < pr.n; ++i)
            if (mask_bits & (1ul << i))
                for (int k = 0; k < pr.dim; ++k)
                    w[static_cast<std::size_t>(k)] +=
                        pr.weight[static_cast<std::size_t>(i)] *
                        pr.pts[static_cast<std::size_t>(i) * pr.dim + k];
        const double nrm = norm2(w.data(), pr.dim);
        if (nrm < 1e-300) continue;
        for (double& c : w) c /= nrm;
        for (int orient = 0; orient < 2; ++orient) {
            if (orient == 1)
                for (double& c : w) c = -c;
            const double val = eval_abs(pr, w.data());
            ++res.evals;
            if (val > best_val) { best_val = val; best = w; }
        }
    }
    res.value = best_val;
    res.u = embed(masks, s, best.data());
    return res;
}

}  // namespace mildnet
