#include <cmath>
#include <vector>

#include "doctest.h"
#include "mildnet/errors.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"
#include "mildnet/rng.hpp"
#include "test_helpers.hpp"

using namespace mildnet;

TEST_SUITE("mask-network") {

TEST_CASE("mask series layout") {
    SUBCASE("full-width window collapses to a single all-ones mask") {
        const MaskSeries masks = build_mask_series(3, 3);
        CHECK(masks.period == 1);
        CHECK(masks.binary_mask(0) == std::vector<double>{1, 1, 1});
    }
    SUBCASE("width-2 windows on d=4") {
        const MaskSeries masks = build_mask_series(4, 2);
        CHECK(masks.period == 3);
        CHECK(masks.binary_mask(0) == std::vector<double>{1, 1, 0, 0});
        CHECK(masks.binary_mask(1) == std::vector<double>{0, 1, 1, 0});
        CHECK(masks.binary_mask(2) == std::vector<double>{0, 0, 1, 1});
    }
    SUBCASE("width-1 windows are the standard basis indicators") {
        const MaskSeries masks = build_mask_series(5, 1);
        CHECK(masks.period == 5);
        for (int s = 0; s < 5; ++s) {
            std::vector<double> e(5, 0.0);
            e[static_cast<std::size_t>(s)] = 1.0;
            CHECK(masks.binary_mask(s) == e);
        }
    }
    SUBCASE("units cycle through masks modulo the period") {
        const MaskSeries masks = build_mask_series(4, 2);
        for (int j = 0; j < 12; ++j) CHECK(masks.mask_of(j) == j % 3);
    }
    SUBCASE("invalid widths are rejected") {
        CHECK_THROWS_AS(build_mask_series(3, 0), contract_error);
        CHECK_THROWS_AS(build_mask_series(3, 4), contract_error);
        CHECK_THROWS_AS(build_mask_series(0, 1), contract_error);
    }
}

TEST_CASE("forward evaluates the balanced sum") {
    const MaskSeries full2 = build_mask_series(2, 2);

    SUBCASE("single unit aligned with its input") {
        NetParams p;
        p.d = 2;
        p.m = 1;
        p.alpha = {1.0};
        p.dirs = {1.0, 0.0};
        CHECK(forward(p, full2, std::vector<double>{1.0, 0.0}) == 1.0);
    }

    SUBCASE("positive and negative units combine") {
        NetParams p;
        p.d = 2;
        p.m = 2;
        const double a = std::sqrt(0.5);
        p.alpha = {a, -a};
        p.dirs = {1.0, 0.0, 0.0, -1.0};
        const double f = forward(p, full2, std::vector<double>{0.6, 0.8});
        CHECK(testutil::close(f, -0.1, 1e-14));
    }

    SUBCASE("a negative unit facing its input contributes zero") {
        NetParams p;
        p.d = 2;
        p.m = 1;
        p.alpha = {-1.0};
        p.dirs = {1.0, 0.0};
        CHECK(forward(p, full2, std::vector<double>{0.9, 0.0}) == 0.0);
    }
}

TEST_CASE("forward agrees with a straight-line reference") {
    Rng rng(2024);
    const MaskSeries masks = build_mask_series(4, 2);
    for (int rep = 0; rep < 50; ++rep) {
        const NetParams p = testutil::random_params(rng, masks, 5, 2.0);
        std::vector<double> x(4);
        rng.ball_point(x.data(), 4);
        const double got = forward(p, masks, x);
        const double want = testutil::naive_forward(p, masks, x.data());
        CHECK(testutil::close(got, want, 1e-13));
    }
}

TEST_CASE("forward homogeneity") {
    Rng rng(7);
    const MaskSeries masks = build_mask_series(5, 3);
    for (int rep = 0; rep < 20; ++rep) {
        NetParams p = testutil::random_params(rng, masks, 7, 1.5);
        std::vector<double> x(5);
        rng.ball_point(x.data(), 5);
        const double f = forward(p, masks, x);

        // Degree 1 in x for nonnegative scalings.
        for (const double c : {0.0, 0.37, 1.0}) {
            std::vector<double> cx(5);
            for (int k = 0; k < 5; ++k) cx[static_cast<std::size_t>(k)] = c * x[static_cast<std::size_t>(k)];
            CHECK(testutil::close(forward(p, masks, cx), c * f, 1e-12));
        }
        // Degree 2 in the scale vector for positive scalings.
        NetParams scaled = p;
        for (double& a : scaled.alpha) a *= 1.7;
        CHECK(testutil::close(forward(scaled, masks, x), 1.7 * 1.7 * f, 1e-12));
    }
}

TEST_CASE("permuting units within one mask leaves forward unchanged") {
    Rng rng(11);
    const MaskSeries masks = build_mask_series(4, 2);
    NetParams p = testutil::random_params(rng, masks, 8, 1.0);
    std::vector<double> x(4);
    rng.ball_point(x.data(), 4);
    const double before = forward(p, masks, x);

    // Units 0 and 3 both use mask 0; swap their full rows.
    REQUIRE(masks.mask_of(0) == masks.mask_of(3));
    std::swap(p.alpha[0], p.alpha[3]);
    for (int k = 0; k < 4; ++k) std::swap(p.dir(0)[k], p.dir(3)[k]);
    CHECK(forward(p, masks, x) == before);
}

TEST_CASE("full-width masking is the identity") {
    Rng rng(13);
    const MaskSeries masks = build_mask_series(6, 6);
    const NetParams p = testutil::random_params(rng, masks, 4, 1.2);
    std::vector<double> x(6);
    rng.ball_point(x.data(), 6);
    double plain = 0.0;
    for (int j = 0; j < p.m; ++j) {
        double z = 0.0;
        for (int k = 0; k < 6; ++k) z += p.dir(j)[k] * x[static_cast<std::size_t>(k)];
        plain += p.alpha[static_cast<std::size_t>(j)] * relu(p.alpha[static_cast<std::size_t>(j)] * z);
    }
    CHECK(testutil::close(forward(p, masks, x), plain, 1e-14));
}

TEST_CASE("forward shape checks") {
    const MaskSeries masks = build_mask_series(4, 2);
    Rng rng(5);
    NetParams p = testutil::random_params(rng, masks, 4, 1.0);
    const std::vector<double> x = {0.1, 0.2, 0.3, 0.1};

    SUBCASE("wrong point dimension") {
        CHECK_THROWS_AS(forward(p, masks, std::vector<double>{0.1, 0.2}), contract_error);
    }
    SUBCASE("alpha length mismatch") {
        p.alpha.push_back(0.0);
        CHECK_THROWS_AS(forward(p, masks, x), shape_error);
    }
    SUBCASE("direction matrix size mismatch") {
        p.dirs.pop_back();
        CHECK_THROWS_AS(forward(p, masks, x), shape_error);
    }
    SUBCASE("fewer units than masks") {
        const NetParams tiny = testutil::random_params(rng, masks, 4, 1.0);
        MaskSeries wide = build_mask_series(4, 2);
        NetParams two;
        two.d = 4;
        two.m = 2;
        two.alpha = {tiny.alpha[0], tiny.alpha[1]};
        two.dirs.assign(tiny.dirs.begin(), tiny.dirs.begin() + 8);
        CHECK_THROWS_AS(forward(two, wide, x), capacity_error);
    }
    SUBCASE("points outside the unit ball evaluate with a warning, no throw") {
        CHECK_NOTHROW(forward(p, masks, std::vector<double>{2.0, 0.0, 0.0, 0.0}));
    }
}

TEST_CASE("teacher evaluation") {
    const MaskSeries full2 = build_mask_series(2, 2);

    SUBCASE("single unit pointed at the input recovers its norm") {
        Teacher t;
        t.d = 2;
        t.coeffs = {1.0};
        t.dirs = {0.6, 0.8};
        CHECK(testutil::close(teacher_eval(t, full2, std::vector<double>{0.3, 0.4}), 0.5, 1e-15));
    }

    SUBCASE("antipodal pair evaluates half the absolute correlation") {
        Rng rng(17);
        Teacher t;
        t.d = 2;
        t.coeffs = {0.5, 0.5};
        t.dirs.assign(4, 0.0);
        rng.unit_vector(t.dir(0), 2);
        t.dir(1)[0] = -t.dir(0)[0];
        t.dir(1)[1] = -t.dir(0)[1];
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> x(2);
            rng.ball_point(x.data(), 2);
            const double corr = t.dir(0)[0] * x[0] + t.dir(0)[1] * x[1];
            CHECK(testutil::close(teacher_eval(t, full2, x), 0.5 * std::fabs(corr), 1e-14));
        }
    }

    SUBCASE("unnormalized coefficients are rejected") {
        Teacher t;
        t.d = 2;
        t.coeffs = {0.7, 0.5};
        t.dirs = {1.0, 0.0, 0.0, 1.0};
        CHECK_THROWS_AS(teacher_eval(t, full2, std::vector<double>{0.1, 0.1}), contract_error);
    }

    SUBCASE("off-support direction mass is rejected") {
        const MaskSeries masks = build_mask_series(3, 2);
        Teacher t;
        t.d = 3;
        t.coeffs = {1.0};
        t.dirs = {0.0, 0.6, 0.8};  // unit 0 uses mask 0 = coords {0,1}; coord 2 must be 0
        CHECK_THROWS_AS(check_teacher(t, masks), contract_error);
    }

    SUBCASE("random teacher matches the straight-line reference and stays bounded") {
        Rng rng(21);
        const MaskSeries masks = build_mask_series(5, 2);
        const Teacher t = testutil::random_teacher(rng, masks, 6);
        for (int rep = 0; rep < 25; ++rep) {
            std::vector<double> x(5);
            rng.ball_point(x.data(), 5);
            const double got = teacher_eval(t, masks, x);
            CHECK(testutil::close(got, testutil::naive_teacher_eval(t, masks, x.data()), 1e-14));
            CHECK(std::fabs(got) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("teachers convert exactly to balanced parameters") {
    Rng rng(23);
    const MaskSeries masks = build_mask_series(4, 3);
    const Teacher t = testutil::random_teacher(rng, masks, 5);
    const NetParams p = teacher_to_params(t, masks);

    for (int j = 0; j < p.m; ++j) {
        const double a = p.alpha[static_cast<std::size_t>(j)];
        CHECK(testutil::close(a * a, std::fabs(t.coeffs[static_cast<std::size_t>(j)]), 1e-15));
        double nrm = 0.0;
        for (int k = 0; k < p.d; ++k) nrm += p.dir(j)[k] * p.dir(j)[k];
        CHECK(testutil::close(nrm, 1.0, 1e-12));
    }
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> x(4);
        rng.ball_point(x.data(), 4);
        CHECK(testutil::close(forward(p, masks, x), teacher_eval(t, masks, x), 1e-13));
    }
}

}  // TEST_SUITE
