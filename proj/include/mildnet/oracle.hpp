#pragma once

#include <vector>

#include "mildnet/dataset.hpp"
#include "mildnet/mask.hpp"

namespace mildnet {

// Dense enumeration of max_u |sum_i beta_i y_i relu(<u, x_i masked>)| over
// unit directions supported on mask s, usable when the support has dimension
// at most 3.  value underestimates the true maximum by at most gap:
//   support dim 1: both endpoints, gap 0
//   support dim 2: uniform angular grid, gap = sum(beta) * pi / resolution
//   support dim 3: spherical Fibonacci lattice, gap = sum(beta) * 2*sqrt(pi/resolution)
struct OracleResult {
    double value = 0.0;
    std::vector<double> u;  // length d, support on mask s
    double gap = 0.0;
    long long evals = 0;
};

OracleResult oracle_max_g(const std::vector<double>& beta, const Dataset& data,
                          const MaskSeries& masks, int s, long long resolution);

// Lower-bound cross-check: the maximizer restricted to any fixed active set S
// is parallel to sum_{i in S} beta_i y_i x_i, so enumerating all subsets
// (n <= 12) and both orientations yields a valid lower bound on the maximum.
// No gap certificate; gap is reported as infinity.
OracleResult subset_heuristic_max_g(const std::vector<double>& beta, const Dataset& data,
                                    const MaskSeries& masks, int s);

}  // namespace mildnet
