#include "mildnet/generate.hpp"

#include <cmath>

#include "mildnet/rng.hpp"
#include "mildnet/util.hpp"

namespace mildnet {

namespace {

long long default_budget(int n) { return std::max(100000LL, 5000LL * n); }

}  // namespace

Teacher generate_teacher(const MaskSeries& masks, int units, std::uint64_t seed) {
    require(units >= 1, "generate_teacher: need at least one unit");
    Rng dir_rng(seed, "teacher-dirs");
    Rng coeff_rng(seed, "teacher-coeffs");

    Teacher t;
    t.d = masks.d;
    t.coeffs.resize(static_cast<std::size_t>(units));
    t.dirs.assign(static_cast<std::size_t>(units) * masks.d, 0.0);
    for (int j = 0; j < units; ++j) {
        const int s = masks.mask_of(j);
        dir_rng.unit_vector(t.dir(j) + s, masks.r);
    }
    double l1 = 0.0;
    while (l1 < 1e-9) {
        l1 = 0.0;
        for (int j = 0; j < units; ++j) {
            t.coeffs[static_cast<std::size_t>(j)] = coeff_rng.uniform(-1.0, 1.0);
            l1 += std::fabs(t.coeffs[static_cast<std::size_t>(j)]);
        }
    }
    for (double& c : t.coeffs) c /= l1;
    check_teacher(t, masks);
    return t;
}

Dataset generate_dataset(const Teacher& teacher, const MaskSeries& masks, int n, double gamma,
                         int corrupt_count, std::uint64_t seed, long long max_attempts) {
    check_teacher(teacher, masks);
    require(n >= 1, "generate_dataset: n must be >= 1");
    require(gamma > 0.0, "generate_dataset: gamma must be positive");
    require(0 <= corrupt_count && corrupt_count <= n,
            "generate_dataset: corrupt_count must lie in [0, n]");
    if (max_attempts <= 0) max_attempts = default_budget(n);

    Dataset data;
    data.d = masks.d;
    data.n = n;
    data.gamma = gamma;
    data.corrupt_count = corrupt_count;
    data.seed = seed;
    data.teacher = teacher;
    data.xs.reserve(static_cast<std::size_t>(n) * masks.d);
    data.ys.reserve(static_cast<std::size_t>(n));

    Rng point_rng(seed, "points");
    std::vector<double> x(static_cast<std::size_t>(masks.d));
    long long attempts = 0;
    while (static_cast<int>(data.ys.size()) < n) {
        if (++attempts > max_attempts)
            throw generation_error(
                "margin rejection budget exhausted: accepted " +
                std::to_string(data.ys.size()) + "/" + std::to_string(n) + " after " +
                std::to_string(attempts - 1) + " draws; gamma=" + fmt_full(gamma) +
                " may be too large for this teacher");
        point_rng.ball_point(x.data(), masks.d);
        const double h = teacher_eval(teacher, masks, x.data());
        if (std::fabs(h) < gamma) continue;
        data.xs.insert(data.xs.end(), x.begin(), x.end());
        data.ys.push_back(h > 0.0 ? 1 : -1);
    }

    if (corrupt_count > 0) {
        Rng corrupt_rng(seed, "corruption");
        data.corrupted = corrupt_rng.distinct_indices(n, corrupt_count);
        for (int idx : data.corrupted)
            data.ys[static_cast<std::size_t>(idx)] = -data.ys[static_cast<std::size_t>(idx)];
    }
    check_dataset(data);
    return data;
}

Dataset generate_linear_margin_dataset(int d, int n, double gamma, std::uint64_t seed,
                                       long long max_attempts) {
    require(d >= 1, "generate_linear_margin_dataset: d must be >= 1");
    require(n >= 1, "generate_linear_margin_dataset: n must be >= 1");
    require(gamma > 0.0 && 2.0 * gamma < 1.0,
            "generate_linear_margin_dataset: need 0 < gamma < 1/2");
    if (max_attempts <= 0) max_attempts = default_budget(n);

    Dataset data;
    data.d = d;
    data.n = n;
    data.gamma = gamma;
    data.seed = seed;
    data.xs.reserve(static_cast<std::size_t>(n) * d);
    data.ys.reserve(static_cast<std::size_t>(n));

    std::vector<double> vbar(static_cast<std::size_t>(d));
    Rng dir_rng(seed, "vbar");
    dir_rng.unit_vector(vbar.data(), d);
    data.vbar = vbar;

    Rng point_rng(seed, "points");
    std::vector<double> x(static_cast<std::size_t>(d));
    long long attempts = 0;
    while (static_cast<int>(data.ys.size()) < n) {
        if (++attempts > max_attempts)
            throw generation_error("linear margin rejection budget exhausted at " +
                                   std::to_string(data.ys.size()) + "/" + std::to_string(n));
        point_rng.ball_point(x.data(), d);
        const double t = dot(vbar.data(), x.data(), d);
        if (std::fabs(t) < 2.0 * gamma) continue;
        data.xs.insert(data.xs.end(), x.begin(), x.end());
        data.ys.push_back(t > 0.0 ? 1 : -1);
    }
    check_dataset(data);
    return data;
}

int count_margin_violations(const Dataset& data, const Teacher& teacher, const MaskSeries& masks,
                            double gamma) {
    check_teacher(teacher, masks);
    check_dataset(data);
    require(data.d == masks.d, "count_margin_violations: dimension mismatch");
    int violations = 0;
    for (int i = 0; i < data.n; ++i)
        if (data.ys[static_cast<std::size_t>(i)] * teacher_eval(teacher, masks, data.x(i)) < gamma)
            ++violations;
    return violations;
}

}  // namespace mildnet
