#include "mildnet/loss.hpp"

#include <cmath>

namespace mildnet {

namespace {

double logistic_value(double z) {
    // ln(1+e^z), split to avoid overflow for large |z|.
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic_deriv(double z) {
    // Sigmoid, evaluated on the side that keeps exp() bounded.
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

LossSpec logistic_loss() { return LossSpec{"logistic", logistic_value, logistic_deriv, 0.5, 1.0}; }

LossSpec loss_by_name(const std::string& name) {
    if (name == "logistic") return logistic_loss();
    throw contract_error("unknown loss '" + name + "'");
}

CoeffVector make_coeff_vector(int m, double lam0) {
    require(m >= 1, "make_coeff_vector: m must be >= 1");
    require(lam0 > 0.0, "make_coeff_vector: lam0 must be positive");
    CoeffVector lam;
    lam.lam.assign(static_cast<std::size_t>(m), lam0);
    lam.lam0 = lam0;
    return lam;
}

void check_coeff_vector(const CoeffVector& lam, int m) {
    if (static_cast<int>(lam.lam.size()) != m) throw shape_error("coefficient vector size != m");
    require(lam.lam0 > 0.0, "coefficient vector lam0 must be positive");
    for (double v : lam.lam)
        require(lam.lam0 / 2.0 - 1e-12 <= v && v <= lam.lam0 + 1e-12,
                "coefficient outside [lam0/2, lam0]");
}

double empirical_loss(const NetParams& p, const CoeffVector& lam, const Dataset& data,
                      const MaskSeries& masks, const LossSpec& loss) {
    check_shapes(p, masks);
    check_dataset(data);
    check_coeff_vector(lam, p.m);
    require(data.d == p.d, "empirical_loss: dataset dimension mismatch");
    double total = 0.0;
    for (int i = 0; i < data.n; ++i)
        total += loss.ell(-data.ys[static_cast<std::size_t>(i)] * forward(p, masks, data.x(i)));
    for (int j = 0; j < p.m; ++j)
        total += lam.lam[static_cast<std::size_t>(j)] * p.alpha[static_cast<std::size_t>(j)] *
                 p.alpha[static_cast<std::size_t>(j)];
    return total;
}

std::vector<double> grad_alpha(const NetParams& p, const CoeffVector& lam, const Dataset& data,
                               const MaskSeries& masks, const LossSpec& loss) {
    check_shapes(p, masks);
    check_dataset(data);
    check_coeff_vector(lam, p.m);
    require(data.d == p.d, "grad_alpha: dataset dimension mismatch");
    std::vector<double> g(static_cast<std::size_t>(p.m));
    for (int j = 0; j < p.m; ++j)
        g[static_cast<std::size_t>(j)] =
            2.0 * lam.lam[static_cast<std::size_t>(j)] * p.alpha[static_cast<std::size_t>(j)];
    for (int i = 0; i < data.n; ++i) {
        const double* xi = data.x(i);
        const double beta = loss.dell(-data.ys[static_cast<std::size_t>(i)] *
                                      forward(p, masks, xi));
        const double w = -2.0 * beta * data.ys[static_cast<std::size_t>(i)];
        for (int j = 0; j < p.m; ++j) {
            const double z = p.alpha[static_cast<std::size_t>(j)] *
                             masks.masked_dot(p.dir(j), xi, masks.mask_of(j));
            g[static_cast<std::size_t>(j)] += w * relu(z);
        }
    }
    return g;
}

std::vector<double> grad_alpha_factored(const NetParams& p, const CoeffVector& lam,
                                        const Dataset& data, const MaskSeries& masks,
                                        const LossSpec& loss) {
    check_shapes(p, masks);
    check_dataset(data);
    check_coeff_vector(lam, p.m);
    require(data.d == p.d, "grad_alpha_factored: dataset dimension mismatch");
    const std::vector<double> beta = per_sample_derivs(p, data, masks, loss);
    std::vector<double> g(static_cast<std::size_t>(p.m));
    for (int j = 0; j < p.m; ++j) {
        const double s = sgn_pos(p.alpha[static_cast<std::size_t>(j)]);
        double rho = 0.0;
        for (int i = 0; i < data.n; ++i)
            rho += beta[static_cast<std::size_t>(i)] * data.ys[static_cast<std::size_t>(i)] *
                   relu(s * masks.masked_dot(p.dir(j), data.x(i), masks.mask_of(j)));
        g[static_cast<std::size_t>(j)] =
            2.0 * p.alpha[static_cast<std::size_t>(j)] *
            (lam.lam[static_cast<std::size_t>(j)] - s * rho);
    }
    return g;
}

std::vector<double> per_sample_derivs(const NetParams& p, const Dataset& data,
                                      const MaskSeries& masks, const LossSpec& loss) {
    check_shapes(p, masks);
    check_dataset(data);
    require(data.d == p.d, "per_sample_derivs: dataset dimension mismatch");
    std::vector<double> beta(static_cast<std::size_t>(data.n));
    for (int i = 0; i < data.n; ++i)
        beta[static_cast<std::size_t>(i)] =
            loss.dell(-data.ys[static_cast<std::size_t>(i)] * forward(p, masks, data.x(i)));
    return beta;
}

double grad_lipschitz_bound(const std::vector<double>& alpha, int n, double lam0) {
    double norm_sq = 0.0;
    for (double a : alpha) norm_sq += a * a;
    const double nn = static_cast<double>(n);
    return 12.0 * std::sqrt(nn * nn * norm_sq * norm_sq + nn * nn + lam0 * lam0);
}

}  // namespace mildnet
