#pragma once

#include <vector>

#include "mildnet/errors.hpp"

namespace mildnet {

// Sliding-window coordinate masks of width r on inputs of dimension d.
// Mask s (0-based, s = 0..d-r) selects coordinates [s, s+r).  With r = d there
// is a single all-ones mask and the network is fully connected; with r < d the
// masks tile the input like one convolutional layer of stride 1.
// Hidden unit j always uses mask (j mod period).
struct MaskSeries {
    int d = 0;
    int r = 0;
    int period = 0;  // number of distinct masks, d - r + 1

    int mask_of(int j) const { return j % period; }
    int support_begin(int s) const { return s; }
    int support_end(int s) const { return s + r; }

    // Inner product of u against x restricted to mask s.  Both u and x are
    // length-d arrays; coordinates of u outside the mask are ignored.
    double masked_dot(const double* u, const double* x, int s) const {
        double acc = 0.0;
        for (int k = s; k < s + r; ++k) acc += u[k] * x[k];
        return acc;
    }

    // Materialized 0/1 vector of mask s (for serialization and tests).
    std::vector<double> binary_mask(int s) const {
        require(0 <= s && s < period, "MaskSeries::binary_mask: mask index out of range");
        std::vector<double> phi(static_cast<std::size_t>(d), 0.0);
        for (int k = s; k < s + r; ++k) phi[static_cast<std::size_t>(k)] = 1.0;
        return phi;
    }
};

inline MaskSeries build_mask_series(int d, int r) {
    require(d >= 1, "build_mask_series: d must be >= 1");
    require(1 <= r && r <= d, "build_mask_series: need 1 <= r <= d");
    return MaskSeries{d, r, d - r + 1};
}

}  // namespace mildnet
