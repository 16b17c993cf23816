#pragma once

#include <cstdint>

#include "mildnet/dataset.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Random teacher: one unit direction per mask assignment (uniform on the mask
// support sphere) and l1-normalized coefficients drawn uniform on [-1,1].
Teacher generate_teacher(const MaskSeries& masks, int units, std::uint64_t seed);

// n ball-uniform points rejected until |h(x)| >= gamma, labeled by sgn(h),
// then exactly corrupt_count labels flipped at random distinct indices.
// Throws generation_error when rejection exceeds max_attempts (0 = default
// budget).  Teacher/points/corruption use independent seed streams.
Dataset generate_dataset(const Teacher& teacher, const MaskSeries& masks, int n, double gamma,
                         int corrupt_count, std::uint64_t seed, long long max_attempts = 0);

// Linearly separated sample: fixed random unit direction vbar, points rejected
// until |vbar.x| >= 2*gamma, y = sgn(vbar.x).  Clean margin, no corruption.
Dataset generate_linear_margin_dataset(int d, int n, double gamma, std::uint64_t seed,
                                       long long max_attempts = 0);

// Number of samples with y_i * h(x_i) < gamma; equals corrupt_count on
// datasets fresh out of generate_dataset.
int count_margin_violations(const Dataset& data, const Teacher& teacher, const MaskSeries& masks,
                            double gamma);

}  // namespace mildnet
