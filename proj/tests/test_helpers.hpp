#pragma once

// Shared construction helpers for the unit suites, plus deliberately
// straight-line reference evaluators.  The references materialize every mask
// as an explicit 0/1 vector and sum term by term, sharing no code path with
// the library's masked evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"
#include "mildnet/rng.hpp"

namespace testutil {

inline bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline mildnet::NetParams random_params(mildnet::Rng& rng, const mildnet::MaskSeries& masks,
                                        int m, double alpha_scale) {
    mildnet::NetParams p;
    p.d = masks.d;
    p.m = m;
    p.alpha.resize(static_cast<std::size_t>(m));
    p.dirs.assign(static_cast<std::size_t>(m) * masks.d, 0.0);
    for (int j = 0; j < m; ++j) {
        p.alpha[static_cast<std::size_t>(j)] = rng.uniform(-alpha_scale, alpha_scale);
        rng.unit_vector(p.dir(j) + masks.mask_of(j), masks.r);
    }
    return p;
}

inline mildnet::Dataset random_dataset(mildnet::Rng& rng, int d, int n) {
    mildnet::Dataset data;
    data.d = d;
    data.n = n;
    data.xs.resize(static_cast<std::size_t>(n) * d);
    data.ys.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rng.ball_point(data.x(i), d);
        data.ys[static_cast<std::size_t>(i)] = rng.uniform01() < 0.5 ? -1 : 1;
    }
    return data;
}

inline double naive_forward(const mildnet::NetParams& p, const mildnet::MaskSeries& masks,
                            const double* x) {
    double f = 0.0;
    for (int j = 0; j < p.m; ++j) {
        const std::vector<double> phi = masks.binary_mask(masks.mask_of(j));
        double z = 0.0;
        for (int k = 0; k < p.d; ++k) z += p.dir(j)[k] * (x[k] * phi[static_cast<std::size_t>(k)]);
        const double arg = p.alpha[static_cast<std::size_t>(j)] * z;
        f += p.alpha[static_cast<std::size_t>(j)] * (arg > 0.0 ? arg : 0.0);
    }
    return f;
}

inline double naive_teacher_eval(const mildnet::Teacher& t, const mildnet::MaskSeries& masks,
                                 const double* x) {
    double h = 0.0;
    for (int j = 0; j < t.units(); ++j) {
        const std::vector<double> phi = masks.binary_mask(masks.mask_of(j));
        double z = 0.0;
        for (int k = 0; k < t.d; ++k) z += t.dir(j)[k] * (x[k] * phi[static_cast<std::size_t>(k)]);
        h += t.coeffs[static_cast<std::size_t>(j)] * (z > 0.0 ? z : 0.0);
    }
    return h;
}

inline double naive_loss(const mildnet::NetParams& p, const mildnet::CoeffVector& lam,
                         const mildnet::Dataset& data, const mildnet::MaskSeries& masks,
                         const mildnet::LossSpec& loss) {
    double total = 0.0;
    for (int i = 0; i < data.n; ++i) {
        const double f = naive_forward(p, masks, data.x(i));
        total += loss.ell(-static_cast<double>(data.ys[static_cast<std::size_t>(i)]) * f);
    }
    for (int j = 0; j < p.m; ++j) {
        const double a = p.alpha[static_cast<std::size_t>(j)];
        total += lam.lam[static_cast<std::size_t>(j)] * a * a;
    }
    return total;
}

inline mildnet::Teacher random_teacher(mildnet::Rng& rng, const mildnet::MaskSeries& masks,
                                       int units) {
    mildnet::Teacher t;
    t.d = masks.d;
    t.coeffs.resize(static_cast<std::size_t>(units));
    t.dirs.assign(static_cast<std::size_t>(units) * masks.d, 0.0);
    double l1 = 0.0;
    for (int j = 0; j < units; ++j) {
        double c = 0.0;
        while (std::fabs(c) < 0.1) c = rng.uniform(-1.0, 1.0);
        t.coeffs[static_cast<std::size_t>(j)] = c;
        l1 += std::fabs(c);
        rng.unit_vector(t.dir(j) + masks.mask_of(j), masks.r);
    }
    for (double& c : t.coeffs) c /= l1;
    return t;
}

}  // namespace testutil
