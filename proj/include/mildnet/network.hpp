#pragma once

#include <cmath>
#include <cstdio>
#include <vector>

#include "mildnet/errors.hpp"
#include "mildnet/mask.hpp"

namespace mildnet {

// Sign with the tie broken upward: sgn(0) = +1.  Used everywhere a hidden
// unit's orientation is read off its trainable scale.
inline double sgn_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

// One-hidden-layer ReLU network in balanced form.  Unit j carries a scalar
// alpha_j and a unit direction u_j supported on its mask; the outer weight is
// alpha_j and the inner weight vector is alpha_j * u_j, so both layers always
// share the same norm per unit.
struct NetParams {
    int d = 0;
    int m = 0;
    std::vector<double> alpha;  // m
    std::vector<double> dirs;   // m x d, row-major; row j is u_j

    const double* dir(int j) const { return dirs.data() + static_cast<std::size_t>(j) * d; }
    double* dir(int j) { return dirs.data() + static_cast<std::size_t>(j) * d; }
};

inline void check_shapes(const NetParams& p, const MaskSeries& masks) {
    if (p.d != masks.d) throw shape_error("params/mask dimension mismatch");
    if (p.m <= 0) throw shape_error("params must contain at least one unit");
    if (static_cast<int>(p.alpha.size()) != p.m) throw shape_error("alpha size != m");
    if (p.dirs.size() != static_cast<std::size_t>(p.m) * p.d) throw shape_error("dirs size != m*d");
    if (p.m < masks.period) throw capacity_error("fewer units than masks");
}

// Network output: sum_j alpha_j * relu(alpha_j * <u_j, x restricted to mask j>).
// Points are expected inside the closed unit ball; out-of-ball inputs are
// evaluated anyway with a one-time warning.
inline double forward(const NetParams& p, const MaskSeries& masks, const double* x) {
    double norm_sq = 0.0;
    for (int k = 0; k < p.d; ++k) norm_sq += x[k] * x[k];
    if (norm_sq > 1.0 + 1e-9) {
        static bool warned = false;
        if (!warned) {
            std::fprintf(stderr, "mildnet: warning: evaluating a point with |x| = %.6f > 1\n",
                         std::sqrt(norm_sq));
            warned = true;
        }
    }
    double f = 0.0;
    for (int j = 0; j < p.m; ++j) {
        const double z = p.alpha[static_cast<std::size_t>(j)] *
                         masks.masked_dot(p.dir(j), x, masks.mask_of(j));
        f += p.alpha[static_cast<std::size_t>(j)] * relu(z);
    }
    return f;
}

inline double forward(const NetParams& p, const MaskSeries& masks, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == p.d, "forward: point dimension mismatch");
    check_shapes(p, masks);
    return forward(p, masks, x.data());
}

// Reference classifier sum_j c_j * relu(<v_j, x restricted to mask j>) with
// l1-normalized coefficients and unit directions.  Unit j uses mask
// (j mod period), same convention as NetParams.
struct Teacher {
    int d = 0;
    std::vector<double> coeffs;  // l1 norm must be 1
    std::vector<double> dirs;    // units x d, row-major, unit rows

    int units() const { return static_cast<int>(coeffs.size()); }
    const double* dir(int j) const { return dirs.data() + static_cast<std::size_t>(j) * d; }
    double* dir(int j) { return dirs.data() + static_cast<std::size_t>(j) * d; }
};

inline void check_teacher(const Teacher& t, const MaskSeries& masks) {
    if (t.d != masks.d) throw shape_error("teacher/mask dimension mismatch");
    if (t.units() == 0) throw shape_error("teacher must contain at least one unit");
    if (t.dirs.size() != static_cast<std::size_t>(t.units()) * t.d)
        throw shape_error("teacher dirs size != units*d");
    double l1 = 0.0;
    for (double c : t.coeffs) l1 += std::fabs(c);
    require(std::fabs(l1 - 1.0) <= 1e-9, "teacher coefficients must be l1-normalized");
    for (int j = 0; j < t.units(); ++j) {
        const int s = masks.mask_of(j);
        double nrm = 0.0;
        for (int k = s; k < s + masks.r; ++k) nrm += t.dir(j)[k] * t.dir(j)[k];
        double off = 0.0;
        for (int k = 0; k < t.d; ++k)
            if (k < s || k >= s + masks.r) off += t.dir(j)[k] * t.dir(j)[k];
        require(std::fabs(nrm - 1.0) <= 1e-9 && off <= 1e-18,
                "teacher directions must be unit vectors on their mask support");
    }
}

inline double teacher_eval(const Teacher& t, const MaskSeries& masks, const double* x) {
    double h = 0.0;
    for (int j = 0; j < t.units(); ++j)
        h += t.coeffs[static_cast<std::size_t>(j)] *
             relu(masks.masked_dot(t.dir(j), x, masks.mask_of(j)));
    return h;
}

inline double teacher_eval(const Teacher& t, const MaskSeries& masks,
                           const std::vector<double>& x) {
    check_teacher(t, masks);
    require(static_cast<int>(x.size()) == t.d, "teacher_eval: point dimension mismatch");
    return teacher_eval(t, masks, x.data());
}

// Express a teacher exactly as balanced NetParams: alpha_j = sgn(c_j)*sqrt(|c_j|)
// and u_j = sgn(c_j)*v_j reproduce c_j * relu(<v_j,.>) unit by unit.
inline NetParams teacher_to_params(const Teacher& t, const MaskSeries& masks) {
    check_teacher(t, masks);
    NetParams p;
    p.d = t.d;
    p.m = t.units();
    p.alpha.resize(static_cast<std::size_t>(p.m));
    p.dirs.assign(static_cast<std::size_t>(p.m) * p.d, 0.0);
    for (int j = 0; j < p.m; ++j) {
        const double c = t.coeffs[static_cast<std::size_t>(j)];
        const double s = sgn_pos(c);
        p.alpha[static_cast<std::size_t>(j)] = s * std::sqrt(std::fabs(c));
        for (int k = 0; k < p.d; ++k) p.dir(j)[k] = s * t.dir(j)[k];
    }
    return p;
}

}  // namespace mildnet
