#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mildnet/dataset.hpp"
#include "mildnet/errors.hpp"
#include "mildnet/generate.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/rng.hpp"
#include "mildnet/util.hpp"
#include "test_helpers.hpp"

using namespace mildnet;

namespace {

std::string temp_path(const std::string& name) { return "test_tmp_" + name; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

long caught_parse_line(const std::string& path) {
    try {
        load_dataset(path);
    } catch (const parse_error& ex) {
        return ex.line;
    }
    return -1;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("generated teachers are normalized and reproducible") {
    const MaskSeries masks = build_mask_series(6, 3);

    SUBCASE("single unit carries all the coefficient mass") {
        const Teacher t = generate_teacher(masks, 1, 9);
        REQUIRE(t.units() == 1);
        CHECK(testutil::close(std::fabs(t.coeffs[0]), 1.0, 1e-15));
    }

    SUBCASE("coefficients are l1-normalized and directions live on their supports") {
        const Teacher t = generate_teacher(masks, 7, 123);
        double l1 = 0.0;
        for (double c : t.coeffs) l1 += std::fabs(c);
        CHECK(std::fabs(l1 - 1.0) <= 1e-15);
        CHECK_NOTHROW(check_teacher(t, masks));
        for (int j = 0; j < t.units(); ++j) {
            const int s = masks.mask_of(j);
            for (int k = 0; k < t.d; ++k)
                if (k < s || k >= s + masks.r) CHECK(t.dir(j)[k] == 0.0);
        }
    }

    SUBCASE("same seed reproduces bitwise, different seeds differ") {
        const Teacher a = generate_teacher(masks, 5, 77);
        const Teacher b = generate_teacher(masks, 5, 77);
        const Teacher c = generate_teacher(masks, 5, 78);
        CHECK(a.coeffs == b.coeffs);
        CHECK(a.dirs == b.dirs);
        CHECK(a.dirs != c.dirs);
    }
}

TEST_CASE("teacher-margin datasets") {
    const MaskSeries masks = build_mask_series(4, 4);
    const Teacher t = generate_teacher(masks, 3, 5);
    const double gamma = 0.05;

    SUBCASE("clean generation satisfies the margin everywhere") {
        const Dataset data = generate_dataset(t, masks, 30, gamma, 0, 11);
        CHECK(data.n == 30);
        CHECK(data.gamma == gamma);
        CHECK(data.corrupt_count == 0);
        CHECK(data.corrupted.empty());
        CHECK(count_margin_violations(data, t, masks, gamma) == 0);
        for (int i = 0; i < data.n; ++i) {
            const double h = teacher_eval(t, masks, data.x(i));
            CHECK(std::fabs(h) >= gamma);
            CHECK(data.ys[static_cast<std::size_t>(i)] == (h > 0.0 ? 1 : -1));
            CHECK(norm2(data.x(i), data.d) <= 1.0 + 1e-12);
        }
    }

    SUBCASE("corruption flips exactly the recorded labels") {
        const Dataset clean = generate_dataset(t, masks, 30, gamma, 0, 11);
        const Dataset noisy = generate_dataset(t, masks, 30, gamma, 4, 11);
        CHECK(noisy.xs == clean.xs);  // same point stream, corruption is label-only
        REQUIRE(static_cast<int>(noisy.corrupted.size()) == 4);
        CHECK(count_margin_violations(noisy, t, masks, gamma) == 4);
        for (std::size_t a = 1; a < noisy.corrupted.size(); ++a)
            CHECK(noisy.corrupted[a - 1] < noisy.corrupted[a]);
        std::vector<bool> flipped(30, false);
        for (int idx : noisy.corrupted) flipped[static_cast<std::size_t>(idx)] = true;
        for (int i = 0; i < 30; ++i) {
            const int expect = flipped[static_cast<std::size_t>(i)]
                                   ? -clean.ys[static_cast<std::size_t>(i)]
                                   : clean.ys[static_cast<std::size_t>(i)];
            CHECK(noisy.ys[static_cast<std::size_t>(i)] == expect);
        }
    }

    SUBCASE("fully corrupted generation is allowed") {
        const Dataset data = generate_dataset(t, masks, 10, gamma, 10, 3);
        CHECK(count_margin_violations(data, t, masks, gamma) == 10);
    }

    SUBCASE("reproducibility is bitwise") {
        const Dataset a = generate_dataset(t, masks, 12, gamma, 2, 42);
        const Dataset b = generate_dataset(t, masks, 12, gamma, 2, 42);
        CHECK(a.xs == b.xs);
        CHECK(a.ys == b.ys);
        CHECK(a.corrupted == b.corrupted);
    }

    SUBCASE("an unreachable margin exhausts the rejection budget") {
        CHECK_THROWS_AS(generate_dataset(t, masks, 5, 0.999, 0, 1, 300), generation_error);
    }

    SUBCASE("argument validation") {
        CHECK_THROWS_AS(generate_dataset(t, masks, 5, 0.0, 0, 1), contract_error);
        CHECK_THROWS_AS(generate_dataset(t, masks, 5, 0.1, 6, 1), contract_error);
        CHECK_THROWS_AS(generate_dataset(t, masks, 0, 0.1, 0, 1), contract_error);
    }
}

TEST_CASE("ball sampling radius law") {
    // For a uniform ball draw, |x|^d is uniform on [0,1]; its sample mean over
    // many draws concentrates at 1/2.
    Rng rng(101);
    const int d = 4;
    const int trials = 20000;
    double mean_pow = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = 0; i < trials; ++i) {
        rng.ball_point(x.data(), d);
        const double nrm = norm2(x.data(), d);
        CHECK(nrm <= 1.0 + 1e-12);
        mean_pow += std::pow(nrm, d);
    }
    mean_pow /= trials;
    CHECK(std::fabs(mean_pow - 0.5) < 0.01);
}

TEST_CASE("linear-margin datasets") {
    SUBCASE("construction guarantees the doubled margin") {
        const Dataset data = generate_linear_margin_dataset(3, 40, 0.2, 17);
        REQUIRE(data.vbar.has_value());
        CHECK(testutil::close(norm2(*data.vbar), 1.0, 1e-12));
        for (int i = 0; i < data.n; ++i) {
            const double t = dot(data.vbar->data(), data.x(i), 3);
            CHECK(data.ys[static_cast<std::size_t>(i)] * t >= 2.0 * 0.2);
        }
    }
    SUBCASE("reproducibility") {
        const Dataset a = generate_linear_margin_dataset(3, 10, 0.1, 4);
        const Dataset b = generate_linear_margin_dataset(3, 10, 0.1, 4);
        CHECK(a.xs == b.xs);
        CHECK(a.ys == b.ys);
        CHECK(*a.vbar == *b.vbar);
    }
    SUBCASE("margins at or above one half are rejected") {
        CHECK_THROWS_AS(generate_linear_margin_dataset(3, 10, 0.5, 4), contract_error);
        CHECK_THROWS_AS(generate_linear_margin_dataset(3, 10, 0.0, 4), contract_error);
    }
}

TEST_CASE("halfspace measure under the uniform sphere direction") {
    // The measure of {omega : <x, omega> >= 0} over uniform sphere directions
    // is exactly 1/2 for any nonzero x; Monte-Carlo check at one million draws.
    Rng rng(7);
    std::vector<double> x(3);
    rng.ball_point(x.data(), 3);
    REQUIRE(norm2(x) > 0.1);

    Rng omega_rng(999, "halfspace-mc");
    const int draws = 1000000;
    std::vector<double> w(3);
    long long hits = 0;
    for (int i = 0; i < draws; ++i) {
        omega_rng.unit_vector(w.data(), 3);
        if (dot(w.data(), x.data(), 3) >= 0.0) ++hits;
    }
    const double frac = static_cast<double>(hits) / draws;
    CHECK(std::fabs(frac - 0.5) <= 1e-3);
}

TEST_CASE("dataset round trip is lossless") {
    const MaskSeries masks = build_mask_series(5, 2);
    const Teacher t = generate_teacher(masks, 4, 21);
    const Dataset data = generate_dataset(t, masks, 15, 0.02, 3, 33);
    const std::string path = temp_path("roundtrip.csv");
    save_dataset(data, path);
    const Dataset back = load_dataset(path);

    CHECK(back.d == data.d);
    CHECK(back.n == data.n);
    CHECK(back.gamma == data.gamma);
    CHECK(back.corrupt_count == data.corrupt_count);
    CHECK(back.seed == data.seed);
    CHECK(back.xs == data.xs);  // bitwise: %.17g round-trips every double
    CHECK(back.ys == data.ys);
    CHECK(back.corrupted == data.corrupted);
    REQUIRE(back.teacher.has_value());
    CHECK(back.teacher->coeffs == data.teacher->coeffs);
    CHECK(back.teacher->dirs == data.teacher->dirs);
    CHECK(!back.vbar.has_value());

    SUBCASE("linear-margin provenance round-trips too") {
        const Dataset lin = generate_linear_margin_dataset(4, 6, 0.1, 8);
        const std::string lin_path = temp_path("roundtrip_lin.csv");
        save_dataset(lin, lin_path);
        const Dataset lin_back = load_dataset(lin_path);
        CHECK(lin_back.xs == lin.xs);
        REQUIRE(lin_back.vbar.has_value());
        CHECK(*lin_back.vbar == *lin.vbar);
        CHECK(!lin_back.teacher.has_value());
    }
}

TEST_CASE("malformed dataset files raise parse errors with line numbers") {
    const std::string path = temp_path("malformed.csv");

    SUBCASE("missing header") {
        write_file(path, "1,0.5\n");
        CHECK(caught_parse_line(path) == 1);
    }
    SUBCASE("header with wrong field count") {
        write_file(path, "# mildnet-dataset v1, d=2\n");
        CHECK(caught_parse_line(path) == 1);
    }
    SUBCASE("label that is not plus or minus one") {
        write_file(path,
                   "# mildnet-dataset v1, d=2, n=1, gamma=0, E=0, seed=0\n"
                   "2,0.1,0.1\n");
        CHECK(caught_parse_line(path) == 2);
    }
    SUBCASE("non-numeric coordinate") {
        write_file(path,
                   "# mildnet-dataset v1, d=2, n=1, gamma=0, E=0, seed=0\n"
                   "1,0.1,oops\n");
        CHECK(caught_parse_line(path) == 2);
    }
    SUBCASE("wrong coordinate count") {
        write_file(path,
                   "# mildnet-dataset v1, d=3, n=2, gamma=0, E=0, seed=0\n"
                   "1,0.1,0.2,0.3\n"
                   "-1,0.1,0.2\n");
        CHECK(caught_parse_line(path) == 3);
    }
    SUBCASE("row count disagrees with the header") {
        write_file(path,
                   "# mildnet-dataset v1, d=2, n=3, gamma=0, E=0, seed=0\n"
                   "1,0.1,0.2\n");
        CHECK(caught_parse_line(path) > 0);
    }
    SUBCASE("point outside the unit ball") {
        write_file(path,
                   "# mildnet-dataset v1, d=2, n=1, gamma=0, E=0, seed=0\n"
                   "1,2.0,0.0\n");
        CHECK(caught_parse_line(path) > 0);
    }
}

}  // TEST_SUITE
