#include "mildnet/inner_gd.hpp"

#include <cmath>
#include <fstream>

#include "mildnet/util.hpp"

namespace mildnet {

double step_size(double loss_at_entry, int n) {
    require(loss_at_entry >= 0.0, "step_size: loss must be nonnegative");
    require(n >= 0, "step_size: n must be nonnegative");
    const double denom = std::max(loss_at_entry, 2.0 * static_cast<double>(n));
    require(denom > 0.0, "step_size: max(loss, 2n) must be positive");
    return 1.0 / (72.0 * denom);
}

GDTrace run_inner_gd(NetParams& p, const CoeffVector& lam, const Dataset& data,
                     const MaskSeries& masks, const LossSpec& loss, int K,
                     const GDOptions& options) {
    check_shapes(p, masks);
    check_dataset(data);
    check_coeff_vector(lam, p.m);
    require(data.d == p.d, "run_inner_gd: dataset dimension mismatch");
    require(K >= 1, "run_inner_gd: K must be >= 1");
    const int n = data.n;
    const int m = p.m;
    const double lam0 = lam.lam0;
    require(lam0 * lam0 >= static_cast<double>(n) * (1.0 - 1e-12),
            "run_inner_gd: need lam0 >= sqrt(n)");

    GDTrace trace;
    trace.threshold = options.grad_threshold >= 0.0
                          ? options.grad_threshold
                          : lam0 / (16.0 * K * std::sqrt(static_cast<double>(std::max(n, 1))));

    // Signs and directions are frozen for the whole descent, so each unit's
    // data response reduces to a fixed nonnegative activation A[i][j] scaled
    // by alpha_j^2.
    std::vector<double> sign(static_cast<std::size_t>(m));
    trace.signs_entry.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        sign[static_cast<std::size_t>(j)] = sgn_pos(p.alpha[static_cast<std::size_t>(j)]);
        trace.signs_entry[static_cast<std::size_t>(j)] =
            static_cast<int>(sign[static_cast<std::size_t>(j)]);
    }
    std::vector<double> act(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const double* xi = data.x(i);
        for (int j = 0; j < m; ++j)
            act[static_cast<std::size_t>(i) * m + j] =
                relu(sign[static_cast<std::size_t>(j)] *
                     masks.masked_dot(p.dir(j), xi, masks.mask_of(j)));
    }

    std::vector<double> score(static_cast<std::size_t>(std::max(n, 1)));
    std::vector<double> pull(static_cast<std::size_t>(m));  // beta-weighted response per unit
    std::vector<double> grad(static_cast<std::size_t>(m));

    const auto evaluate = [&](double& loss_value, double& grad_norm) {
        for (int i = 0; i < n; ++i) {
            double f = 0.0;
            const double* row = act.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j)
                f += sign[static_cast<std::size_t>(j)] * p.alpha[static_cast<std::size_t>(j)] *
                     p.alpha[static_cast<std::size_t>(j)] * row[j];
            score[static_cast<std::size_t>(i)] = f;
        }
        double data_loss = 0.0;
        std::fill(pull.begin(), pull.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double z = -data.ys[static_cast<std::size_t>(i)] *
                             score[static_cast<std::size_t>(i)];
            data_loss += loss.ell(z);
            const double w = loss.dell(z) * data.ys[static_cast<std::size_t>(i)];
            const double* row = act.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) pull[static_cast<std::size_t>(j)] += w * row[j];
        }
        double reg = 0.0, gsq = 0.0;
        for (int j = 0; j < m; ++j) {
            const double a = p.alpha[static_cast<std::size_t>(j)];
            reg += lam.lam[static_cast<std::size_t>(j)] * a * a;
            grad[static_cast<std::size_t>(j)] =
                2.0 * a * (lam.lam[static_cast<std::size_t>(j)] -
                           sign[static_cast<std::size_t>(j)] * pull[static_cast<std::size_t>(j)]);
            gsq += grad[static_cast<std::size_t>(j)] * grad[static_cast<std::size_t>(j)];
        }
        loss_value = data_loss + reg;
        grad_norm = std::sqrt(gsq);
    };

    double loss_now = 0.0, grad_norm = 0.0;
    evaluate(loss_now, grad_norm);
    trace.loss_entry = loss_now;
    trace.eta = step_size(loss_now, n);
    trace.min_grad_sq = grad_norm * grad_norm;

    const double cap_scale = 16.0 * K * std::sqrt(static_cast<double>(std::max(n, 1))) / lam0;
    const double cap_raw = std::ceil(144.0 * loss_now *
                                     std::max(loss_now, 2.0 * static_cast<double>(n)) *
                                     cap_scale * cap_scale) + 1.0;
    trace.rate_cap = cap_raw > 9.0e18 ? 9000000000000000000LL : static_cast<long long>(cap_raw);

    if (options.record_curve) {
        trace.loss_curve.push_back(loss_now);
        trace.grad_norms.push_back(grad_norm);
    }

    while (grad_norm > trace.threshold) {
        if (options.max_iters >= 0 && trace.iterations >= options.max_iters) {
            trace.loss_exit = loss_now;
            trace.grad_norm_exit = grad_norm;
            return trace;  // caller-bounded run, reported as not converged
        }
        if (trace.iterations >= trace.rate_cap)
            throw nonconvergence_error("inner descent exceeded its rate cap of " +
                                           std::to_string(trace.rate_cap) + " iterations",
                                       trace.iterations, grad_norm);

        trace.min_grad_sq = std::min(trace.min_grad_sq, grad_norm * grad_norm);
        const double loss_prev = loss_now;
        const double gsq = grad_norm * grad_norm;
        for (int j = 0; j < m; ++j) {
            const double a = p.alpha[static_cast<std::size_t>(j)];
            const double stepped = a - trace.eta * grad[static_cast<std::size_t>(j)];
            const double delta = std::fabs(stepped - a);
            if (delta > 0.5 * std::fabs(a) * (1.0 + 1e-12)) ++trace.halving_violations;
            if (stepped * a < 0.0 ||
                (a != 0.0 && stepped == 0.0) || (a == 0.0 && stepped != 0.0))
                ++trace.sign_violations;
            p.alpha[static_cast<std::size_t>(j)] = stepped;
        }
        ++trace.iterations;
        evaluate(loss_now, grad_norm);
        const double slack = 1e-9 * std::max(1.0, loss_prev);
        if (loss_now > loss_prev + slack) ++trace.monotone_violations;
        if (loss_prev - loss_now < 0.5 * trace.eta * gsq - slack) ++trace.decrease_violations;
        if (options.record_curve) {
            trace.loss_curve.push_back(loss_now);
            trace.grad_norms.push_back(grad_norm);
        }
    }

    trace.converged = true;
    trace.loss_exit = loss_now;
    trace.grad_norm_exit = grad_norm;
    return trace;
}

void write_gd_trace_csv(const GDTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "iteration,loss,grad_norm\n";
    for (std::size_t t = 0; t < trace.loss_curve.size(); ++t)
        out << t << ',' << fmt_full(trace.loss_curve[t]) << ','
            << fmt_full(trace.grad_norms[t]) << '\n';
}

}  // namespace mildnet
