#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwl/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pwl;

TEST_CASE("minimal PWL function") {
    auto f = model::minimal_curve(0.3);
    CHECK(f.eval(0.0) == doctest::Approx(0.0));
    CHECK(f.eval(0.5) == doctest::Approx(0.2));       // |x| - delta
    CHECK(f.eval(-0.5) == doctest::Approx(0.2));
    CHECK(f.eval(0.3) == doctest::Approx(0.0));       // continuity at the corner
    // closed form |x| - delta outside, 0 inside
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double x = U(rng);
        const double expect = std::abs(x) <= 0.3 ? 0.0 : std::abs(x) - 0.3;
        CHECK(f.eval(x) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("return curve continuity at the fourth-zone fold") {
    const double delta = 0.3, x0 = 1.2;
    auto f = model::return_curve(delta, x0);
    // value at x0 from both adjacent branches equals x0 - delta
    CHECK(f.eval(x0) == doctest::Approx(x0 - delta));
    CHECK(f.eval(x0 - 1e-12) == doctest::Approx(x0 - delta).epsilon(1e-9));
    // fourth-zone slope: value at x0+1 minus value at x0 equals -1
    CHECK(f.eval(x0 + 1.0) - f.eval(x0) == doctest::Approx(-1.0));
}

TEST_CASE("quasi-canard curve matches its closed form") {
    const double k = 0.885;
    auto f = model::quasi_canard_curve(k);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double x = U(rng);
        const double expect = x + 0.5 * (1.0 + k) * (std::abs(x - 1.0) - std::abs(x + 1.0));
        CHECK(f.eval(x) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("four-zone curve of the printed form") {
    auto f = model::four_zone_curve(0.0, 0.7, -2.0);
    CHECK(f.eval(0.1) == doctest::Approx(0.0));  // flat central segment at beta = 0
    CHECK(f.slope_at(-1.0) == doctest::Approx(1.0));
    CHECK(f.slope_at(-3.0) == doctest::Approx(-1.0));
    CHECK(f.slope_at(2.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(model::four_zone_curve(0.0, 0.7, -0.5), std::invalid_argument);
}

TEST_CASE("PwlCurve rejects bad data") {
    CHECK_THROWS_AS(PwlCurve({1.0, 0.5}, {0, 0, 0}, {0, 0, 0}), std::invalid_argument);
    // discontinuous at the breakpoint
    CHECK_THROWS_AS(PwlCurve({0.0}, {1.0, 1.0}, {0.0, 0.5}), std::invalid_argument);
}

TEST_CASE("minimal 3D builder") {
    Params P(1.0, -1.0, 0.2, 0.01);
    auto spec = model::build_minimal_3d(P);
    REQUIRE(spec.zone_count() == 3);
    CHECK(spec.zone(0).x_hi == doctest::Approx(-std::numbers::pi * 0.1).epsilon(1e-14));
    CHECK(spec.zone(1).x_hi == doctest::Approx(std::numbers::pi * 0.1).epsilon(1e-14));
    // z-row: z' = eps p3 = 0.002 in every zone
    for (int i = 0; i < 3; ++i) {
        CHECK(spec.zone(i).M.row(2).norm() == 0.0);
        CHECK(spec.zone(i).c(2) == doctest::Approx(0.002));
    }
    // continuity on the switching planes (checked on a plane basis)
    for (int k = 0; k < 2; ++k) CHECK(spec.continuity_residual(k) <= 1e-14);
    CHECK_THROWS_AS(model::build_minimal_3d(Params(1, -1, 0.2, -1e-2)), std::invalid_argument);
}

TEST_CASE("fast/slow time consistency") {
    Params P(0.7, -1.3, 0.25, 0.02);
    auto spec = model::build_minimal_3d(P);
    const auto& central = spec.zone(1);
    // dividing the fast-time generator by eps recovers the slow-time equations
    // y' = p1 x + p2 z, z' = p3
    CHECK(central.M(1, 0) / P.eps == doctest::Approx(P.p1).epsilon(1e-15));
    CHECK(central.M(1, 2) / P.eps == doctest::Approx(P.p2).epsilon(1e-15));
    CHECK(central.c(2) / P.eps == doctest::Approx(P.p3).epsilon(1e-15));
}

TEST_CASE("global return builder") {
    Params P(1.0, -1.0, 0.2, 0.01);
    ReturnParams zero;
    zero.x0 = 1.0;
    auto ret0 = model::build_global_return(P, zero);
    auto mini = model::build_minimal_3d(P);
    REQUIRE(ret0.zone_count() == 4);
    // zero couplings: zones 1..3 coincide with the minimal system
    for (int i = 0; i < 3; ++i) {
        CHECK((ret0.zone(i).M - mini.zone(i).M).norm() <= 1e-15);
        CHECK((ret0.zone(i).c - mini.zone(i).c).norm() <= 1e-15);
    }
    CHECK(ret0.zone(3).c(2) == doctest::Approx(P.eps * P.p3));

    ReturnParams bad;
    bad.x0 = 0.1;  // <= delta
    CHECK_THROWS_AS(model::build_global_return(P, bad), std::invalid_argument);

    ReturnParams sao;
    sao.alpha2 = 0.1;
    sao.x0 = 1.0;
    CHECK(model::constant_sao_condition(P, sao));  // p2 alpha2 = -0.1 < 0
    sao.alpha3 = 0.05;
    CHECK_FALSE(model::constant_sao_condition(P, sao));
}

TEST_CASE("planar builders") {
    model::QuasiCanard q{0.885, 0.7};
    auto spec = model::build_planar(q, 0.2);
    REQUIRE(spec.dimension() == 2);
    REQUIRE(spec.zone_count() == 3);
    // x' = y - f(x): at (0, 1): f(0) = 0 -> x' = 1; y' = eps (a - x) = 0.14
    State s(2);
    s << 0.0, 1.0;
    auto d = spec.field(s);
    CHECK(d(0) == doctest::Approx(1.0));
    CHECK(d(1) == doctest::Approx(0.2 * 0.7));

    auto spec3 = model::build_planar_drifted(q, -0.001, 0.1);
    REQUIRE(spec3.dimension() == 3);
    State s3(3);
    s3 << 0.0, 1.0, 0.7;
    auto d3 = spec3.field(s3);
    CHECK(d3(1) == doctest::Approx(0.1 * 0.7));   // y' = eps (a - x)
    CHECK(d3(2) == doctest::Approx(-0.0001));     // a' = eps c
}

TEST_CASE("builder continuity holds for random parameters") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int i = 0; i < 40; ++i) {
        Params P(1.0 + std::abs(U(rng)), U(rng), U(rng), 0.001 + 0.01 * std::abs(U(rng)));
        auto spec = model::build_minimal_3d(P);
        for (int k = 0; k + 1 < spec.zone_count(); ++k)
            CHECK(spec.continuity_residual(k) <= 1e-14);
        ReturnParams ret;
        ret.alpha1 = U(rng);
        ret.alpha2 = U(rng);
        ret.alpha3 = U(rng);
        ret.kappa = U(rng);
        ret.zeta = U(rng);
        ret.xi = U(rng);
        ret.x0 = P.delta + 0.5 + std::abs(U(rng));
        auto ret_spec = model::build_global_return(P, ret);
        for (int k = 0; k + 1 < ret_spec.zone_count(); ++k)
            CHECK(ret_spec.continuity_residual(k) <= 1e-14);
    }
}
