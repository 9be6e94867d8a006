#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "phaseless1d/csv.hpp"
#include "phaseless1d/dataset.hpp"
#include "phaseless1d/errors.hpp"

using namespace ph1d;

TEST_CASE("zero potential datasets") {
    const KGrid grid{0.5, 5.0, 10};
    for (const auto& r : build_s1(Potential::zero(), -1.0, -2.0, grid)) {
        CHECK(r.r2 == 0.0);
        CHECK(r.i1 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.i2 == doctest::Approx(1.0).epsilon(1e-15));
    }
    for (const auto& r : build_s2(Potential::zero(), -1.0, -2.0, -3.0, grid))
        CHECK(r.i3 == doctest::Approx(1.0).epsilon(1e-15));
    for (const auto& r : build_s3(Potential::zero(), -1.0, grid)) {
        CHECK(r.i == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.di == 0.0);
    }
}

TEST_CASE("positions must be distinct and negative") {
    const KGrid grid{1.0, 1.0, 1};
    const Potential v = Potential::square_barrier(1, 1);
    CHECK_THROWS_AS(build_s1(v, -1.0, -1.0, grid), DegenerateConfiguration);
    CHECK_THROWS_AS(build_s2(v, -1.0, -2.0, -1.0, grid), DegenerateConfiguration);
    CHECK_THROWS_AS(build_s1(v, 0.5, -1.0, grid), ConfigError);
    CHECK_THROWS_AS(build_s3(v, 0.0, grid), ConfigError);
    S3Options bad;
    bad.mode = DerivativeMode::central_difference;
    bad.fd_step = -1e-4;
    CHECK_THROWS_AS(build_s3(v, -1.0, grid, {}, bad), ConfigError);
}

TEST_CASE("s1/s2 intensities match the oracle-driven identity") {
    const Potential v = Potential::square_barrier(2.0, 1.0);
    const double k = 1.0;
    const auto ref = oracle::square_barrier(2.0, 1.0, k);
    auto expect_i = [&](double x) {
        return 1.0 + 2.0 * std::real(ref.reflection * std::exp(Complex(0, -2 * k * x))) +
               std::norm(ref.reflection);
    };
    const auto s1 = build_s1(v, -1.0, -2.0, {k, k, 1});
    CHECK(s1[0].i1 == doctest::Approx(expect_i(-1.0)).epsilon(1e-10));
    CHECK(s1[0].i2 == doctest::Approx(expect_i(-2.0)).epsilon(1e-10));
    const auto s2 = build_s2(v, -1.0, -2.0, -3.0, {k, k, 1});
    CHECK(s2[0].i3 == doctest::Approx(expect_i(-3.0)).epsilon(1e-10));
}

TEST_CASE("s3 derivative modes agree on smooth data") {
    const Potential v = Potential::square_barrier(2.0, 1.0);
    const KGrid grid{0.7, 4.0, 7};
    const auto analytic = build_s3(v, -1.3, grid);
    S3Options fd;
    fd.mode = DerivativeMode::central_difference;
    fd.fd_step = 1e-4;
    const auto diffed = build_s3(v, -1.3, grid, {}, fd);
    for (std::size_t i = 0; i < analytic.size(); ++i)
        CHECK(diffed[i].di == doctest::Approx(analytic[i].di).epsilon(1e-6));

    // oracle value at one point
    const auto ref = oracle::square_barrier(2.0, 1.0, 1.0);
    const auto one = build_s3(v, -1.0, {1.0, 1.0, 1});
    const double expected =
        4.0 * std::imag(ref.reflection * std::exp(Complex(0, 2.0)));  // e^{-2ik x}, x=-1, k=1
    CHECK(one[0].di == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("a_of") {
    CHECK(a_of(1.0).a == 0.0);
    CHECK(a_of(2.25).a == 1.25);
    CHECK(a_of(0.0).a == -1.0);
    CHECK_THROWS_AS(a_of(-0.1), ConfigError);
}

TEST_CASE("noise-free records satisfy a = 2|s21|cos(2kx - alpha) + |s21|^2") {
    const Potential v = Potential::double_barrier(1.0, 0.5, 0.4);
    const auto recs = build_s1(v, -0.7, -1.9, {0.4, 6.0, 25});
    for (const auto& r : recs) {
        const Complex s21 = scatter(v, r.k).s21;
        const double mod = std::abs(s21);
        const double alpha = std::arg(s21);
        for (auto [x, i] : {std::pair{r.x1, r.i1}, std::pair{r.x2, r.i2}}) {
            const double a = i - 1.0;
            CHECK(a == doctest::Approx(2 * mod * std::cos(2 * r.k * x - alpha) + mod * mod)
                           .epsilon(1e-8));
        }
    }
}

TEST_CASE("translation leaves r2 untouched") {
    const Potential v = Potential::square_barrier(2.0, 1.0);
    const auto base = build_s1(v, -1.0, -2.0, {0.5, 5.0, 9});
    const auto moved = build_s1(v.translated(0.8), -1.0, -2.0, {0.5, 5.0, 9});
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i].r2 == doctest::Approx(moved[i].r2).epsilon(1e-12));
}

TEST_CASE("noise is deterministic per (seed, k, x) and vanishes at sigma 0") {
    const Potential v = Potential::square_barrier(1.0, 1.0);
    const KGrid grid{0.5, 3.0, 6};
    const NoiseModel n1{1e-2, 42}, n2{1e-2, 43};
    const auto a = build_s1(v, -1.0, -2.0, grid, n1);
    const auto b = build_s1(v, -1.0, -2.0, grid, n1, {}, Exec::serial);
    const auto c = build_s1(v, -1.0, -2.0, grid, n2);
    const auto clean = build_s1(v, -1.0, -2.0, grid);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].i1 == b[i].i1);  // parallel == serial, bitwise
        CHECK(a[i].r2 == b[i].r2);
        any_diff = any_diff || (a[i].i1 != c[i].i1);
        CHECK(std::abs(a[i].i1 - clean[i].i1) < 0.1);
    }
    CHECK(any_diff);

    const auto noiseless = build_s1(v, -1.0, -2.0, grid, NoiseModel{0.0, 42});
    for (std::size_t i = 0; i < noiseless.size(); ++i) CHECK(noiseless[i].i1 == clean[i].i1);
}

TEST_CASE("dataset csv round trip is bit exact") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "ph1d_test_io";
    fs::create_directories(dir);
    const Potential v = Potential::double_barrier(1.0, 0.5, 0.4);
    Dataset d;
    d.method = Method::s1;
    d.s1 = build_s1(v, -1.1, -2.3, {0.3, 7.0, 11}, NoiseModel{1e-3, 7});
    const std::string path = (dir / "s1.csv").string();
    write_dataset_csv(path, d, {"test", "cafe"});
    const Dataset back = read_dataset_csv(path);
    REQUIRE(back.method == Method::s1);
    REQUIRE(back.s1.size() == d.s1.size());
    for (std::size_t i = 0; i < d.s1.size(); ++i) {
        CHECK(back.s1[i].k == d.s1[i].k);
        CHECK(back.s1[i].x1 == d.s1[i].x1);
        CHECK(back.s1[i].x2 == d.s1[i].x2);
        CHECK(back.s1[i].r2 == d.s1[i].r2);
        CHECK(back.s1[i].i1 == d.s1[i].i1);
        CHECK(back.s1[i].i2 == d.s1[i].i2);
    }
    fs::remove_all(dir);
}
