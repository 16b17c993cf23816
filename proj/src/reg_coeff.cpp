#include "mildnet/reg_coeff.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace mildnet {

std::vector<QBlock> build_q_blocks(const NetParams& p, const Dataset& data,
                                   const MaskSeries& masks) {
    check_shapes(p, masks);
    check_dataset(data);
    require(data.d == p.d, "build_q_blocks: dataset dimension mismatch");
    if (p.m < (data.n + 1) * masks.period)
        throw capacity_error("need at least (n+1) units per mask, have m=" +
                             std::to_string(p.m) + " for n=" + std::to_string(data.n) +
                             " and " + std::to_string(masks.period) + " masks");

    std::vector<QBlock> blocks(static_cast<std::size_t>(masks.period));
    for (int s = 0; s < masks.period; ++s) {
        blocks[static_cast<std::size_t>(s)].s = s;
        blocks[static_cast<std::size_t>(s)].n = data.n;
        for (int j = s; j < p.m; j += masks.period)
            blocks[static_cast<std::size_t>(s)].unit_ids.push_back(j);
    }
    for (auto& block : blocks) {
        const int cols = block.cols();
        block.q.assign(static_cast<std::size_t>(data.n) * cols, 0.0);
        for (int i = 0; i < data.n; ++i) {
            const double* xi = data.x(i);
            const double yi = data.ys[static_cast<std::size_t>(i)];
            for (int c = 0; c < cols; ++c) {
                const int j = block.unit_ids[static_cast<std::size_t>(c)];
                const double sj = sgn_pos(p.alpha[static_cast<std::size_t>(j)]);
                block.q[static_cast<std::size_t>(i) * cols + c] =
                    yi * sj * relu(sj * masks.masked_dot(p.dir(j), xi, block.s));
            }
        }
    }
    return blocks;
}

OrthoResult find_orthogonal_unit(const QBlock& block) {
    const int cols = block.cols();
    require(cols >= 1, "find_orthogonal_unit: empty block");
    require(cols > block.n, "find_orthogonal_unit: need more columns than rows");

    OrthoResult res;
    res.v.assign(static_cast<std::size_t>(cols), 0.0);

    bool all_zero = true;
    for (double q : block.q)
        if (q != 0.0) { all_zero = false; break; }
    if (block.n == 0 || all_zero) {
        res.v[0] = 1.0;
        res.residual = 0.0;
        return res;
    }

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        block.q.data(), block.n, cols);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    // Right singular vectors are ordered by decreasing singular value; with
    // cols > rows the last column spans an exact null direction.
    Eigen::VectorXd v = svd.matrixV().col(cols - 1);

    int lead = 0;
    double best = std::fabs(v(0));
    for (int k = 1; k < cols; ++k)
        if (std::fabs(v(k)) > best) { best = std::fabs(v(k)); lead = k; }
    if (v(lead) < 0.0) v = -v;
    v /= v.norm();

    double residual = 0.0;
    for (int i = 0; i < block.n; ++i) {
        double rn = 0.0, dp = 0.0;
        for (int c = 0; c < cols; ++c) {
            rn += block.row(i)[c] * block.row(i)[c];
            dp += block.row(i)[c] * v(c);
        }
        residual = std::max(residual, std::fabs(dp) / std::max(1.0, std::sqrt(rn)));
    }
    res.residual = residual;
    for (int c = 0; c < cols; ++c) res.v[static_cast<std::size_t>(c)] = v(c);
    return res;
}

void apply_decrease_rule(const std::vector<double>& v, std::vector<double>& lam_block,
                         double lam0, int K) {
    require(v.size() == lam_block.size(), "apply_decrease_rule: size mismatch");
    require(K >= 1 && lam0 > 0.0, "apply_decrease_rule: bad lam0/K");
    double positive_mass = 0.0;
    for (double c : v)
        if (c > 0.0) positive_mass += c * c;
    const double scale = lam0 / (2.0 * K);
    if (positive_mass >= 0.5) {
        for (std::size_t c = 0; c < v.size(); ++c)
            if (v[c] > 0.0) lam_block[c] -= scale * v[c];
    } else {
        for (std::size_t c = 0; c < v.size(); ++c)
            if (v[c] < 0.0) lam_block[c] += scale * v[c];
    }
}

double span_distance(const QBlock& block, const std::vector<double>& lam_block) {
    const int cols = block.cols();
    require(static_cast<int>(lam_block.size()) == cols, "span_distance: size mismatch");
    Eigen::Map<const Eigen::VectorXd> t(lam_block.data(), cols);
    if (block.n == 0) return t.norm();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        block.q.data(), block.n, cols);
    // Distance from t to the row span: residual of least squares on A^T.
    const Eigen::MatrixXd At = A.transpose();
    const Eigen::VectorXd p = At.colPivHouseholderQr().solve(t);
    return (At * p - t).norm();
}

CoeffUpdateResult update_coefficients(const CoeffVector& lam_old,
                                      const std::vector<QBlock>& blocks, int K) {
    require(K >= 1, "update_coefficients: K must be >= 1");
    require(!blocks.empty(), "update_coefficients: no blocks");
    if (lam_old.updates_done >= K)
        throw budget_error("coefficient update budget exhausted (" + std::to_string(K) +
                           " calls)");

    const double lam0 = lam_old.lam0;
    CoeffUpdateResult out;
    out.lam = lam_old;
    out.lam.updates_done = lam_old.updates_done + 1;

    for (const auto& block : blocks) {
        const int cols = block.cols();
        std::vector<double> lam_block(static_cast<std::size_t>(cols));
        for (int c = 0; c < cols; ++c)
            lam_block[static_cast<std::size_t>(c)] =
                lam_old.lam[static_cast<std::size_t>(block.unit_ids[static_cast<std::size_t>(c)])];

        const OrthoResult ortho = find_orthogonal_unit(block);
        double along = 0.0;
        for (int c = 0; c < cols; ++c)
            along += ortho.v[static_cast<std::size_t>(c)] * lam_block[static_cast<std::size_t>(c)];

        if (std::fabs(along) >= lam0 / (8.0 * K)) {
            ++out.record.unchanged_blocks;
        } else {
            apply_decrease_rule(ortho.v, lam_block, lam0, K);
            ++out.record.decreased_blocks;
            for (int c = 0; c < cols; ++c)
                out.lam.lam[static_cast<std::size_t>(
                    block.unit_ids[static_cast<std::size_t>(c)])] =
                    lam_block[static_cast<std::size_t>(c)];
        }
        out.record.min_span_distance =
            std::min(out.record.min_span_distance, span_distance(block, lam_block));
    }

    out.record.lam_min = out.lam.lam[0];
    out.record.lam_max = out.lam.lam[0];
    for (std::size_t j = 0; j < out.lam.lam.size(); ++j) {
        const double delta = lam_old.lam[j] - out.lam.lam[j];
        if (delta < -1e-15) out.record.monotone = false;
        out.record.max_step = std::max(out.record.max_step, std::fabs(delta));
        out.record.lam_min = std::min(out.record.lam_min, out.lam.lam[j]);
        out.record.lam_max = std::max(out.record.lam_max, out.lam.lam[j]);
    }
    check_coeff_vector(out.lam, static_cast<int>(out.lam.lam.size()));
    return out;
}

}  // namespace mildnet
