#pragma once

#include <limits>
#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Per-mask activation matrix: row i, column c give the signed response
// y_i * s_j * relu(s_j * <u_j, x_i restricted to mask s>) of that mask's c-th
// unit (j = unit_ids[c], s_j = sgn(alpha_j)).  Needs strictly more columns
// than rows so an orthogonal unit vector always exists.
struct QBlock {
    int s = 0;
    int n = 0;
    std::vector<int> unit_ids;
    std::vector<double> q;  // n x cols(), row-major

    int cols() const { return static_cast<int>(unit_ids.size()); }
    const double* row(int i) const { return q.data() + static_cast<std::size_t>(i) * cols(); }
};

std::vector<QBlock> build_q_blocks(const NetParams& p, const Dataset& data,
                                   const MaskSeries& masks);

// Unit vector orthogonal to every row, from the smallest right singular
// direction; sign fixed so the first coordinate of largest magnitude is
// positive.  All-zero blocks map to e_1.  residual = max_i |v.q_i| / max(1,|q_i|).
struct OrthoResult {
    std::vector<double> v;
    double residual = 0.0;
};
OrthoResult find_orthogonal_unit(const QBlock& block);

// The decrease rule applied when a block's coefficients sit too close to the
// row span: subtract (lam0/2K) * positive part of v when the positive mass
// dominates, otherwise add (lam0/2K) * negative part.  Either branch lowers
// coefficients and moves the block at least lam0/(8K) away from the span.
void apply_decrease_rule(const std::vector<double>& v, std::vector<double>& lam_block,
                         double lam0, int K);

// Euclidean distance from the block's coefficient subvector to the row span.
double span_distance(const QBlock& block, const std::vector<double>& lam_block);

struct CoeffUpdateRecord {
    bool monotone = true;
    double max_step = 0.0;
    double min_span_distance = std::numeric_limits<double>::infinity();
    double lam_min = 0.0;
    double lam_max = 0.0;
    int unchanged_blocks = 0;
    int decreased_blocks = 0;
};

struct CoeffUpdateResult {
    CoeffVector lam;
    CoeffUpdateRecord record;
};

// One coefficient update across all masks.  At most K calls are allowed per
// training run, which keeps every coefficient inside [lam0/2, lam0].
CoeffUpdateResult update_coefficients(const CoeffVector& lam_old,
                                      const std::vector<QBlock>& blocks, int K);

}  // namespace mildnet
