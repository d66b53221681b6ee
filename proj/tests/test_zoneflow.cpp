#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwl/geometry.hpp"
#include "pwl/hybrid.hpp"
#include "pwl/model.hpp"
#include "pwl/zoneflow.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pwl;

namespace {
const Params kFig3(1.0, -1.0, 0.2, 0.01);

State rand_state(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> U(-scale, scale);
    State s(3);
    s << U(rng), U(rng), U(rng);
    return s;
}

// Independent closed form for an outer zone: eigen-decomposition of the x-y
// block plus an affine-in-t particular solution for the z forcing.
State outer_closed_form(const Params& P, int side, const State& s0, double t) {
    const double sg = side > 0 ? 1.0 : -1.0;           // slope of f in the zone
    const double q = -P.delta;                         // intercept of f
    const double e = P.eps;
    Eigen::Matrix2d M;
    M << sg, -1.0, e * P.p1, 0.0;
    const double z0 = s0(2);
    // forcing g(t) = (q, e p2 (z0 + e p3 t)) = g0 + g1 t
    Eigen::Vector2d g0(q, e * P.p2 * z0), g1(0.0, e * P.p2 * e * P.p3);
    const Eigen::Vector2d w = -M.inverse() * g1;
    const Eigen::Vector2d u = M.inverse() * (w - g0);
    Eigen::Vector2d h0 = s0.head<2>() - u;  // homogeneous part at t = 0
    Eigen::EigenSolver<Eigen::Matrix2d> es(M);
    Eigen::Vector2cd lam = es.eigenvalues();
    Eigen::Matrix2cd V = es.eigenvectors();
    Eigen::Vector2cd c = V.inverse() * h0.cast<std::complex<double>>();
    Eigen::Vector2cd ht = V * (c.array() * (lam.array() * t).exp()).matrix();
    State out(3);
    out(0) = ht(0).real() + u(0) + w(0) * t;
    out(1) = ht(1).real() + u(1) + w(1) * t;
    out(2) = z0 + e * P.p3 * t;
    return out;
}
}  // namespace

TEST_CASE("flow identity and semigroup") {
    auto spec = model::build_minimal_3d(kFig3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> T(-40.0, 40.0);
    for (int zi = 0; zi < 3; ++zi) {
        ZoneFlow zf(spec.zone(zi));
        for (int i = 0; i < 25; ++i) {
            const State s = rand_state(rng, 0.5);
            CHECK((zf.flow(s, 0.0) - s).norm() <= 1e-14);
            const double t1 = T(rng), t2 = T(rng);
            const State a = zf.flow(s, t1 + t2);
            const State b = zf.flow(zf.flow(s, t1), t2);
            CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
        }
    }
}

TEST_CASE("central closed form agrees with the exponential path") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const State s = rand_state(rng, 0.3);
        std::uniform_real_distribution<double> T(0.0, 300.0);
        const double t = T(rng);
        const State a = central.flow(s, t);
        const State b = central_flow_closed_form(kFig3, s, t);
        CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
    }
    // hyperbolic branch (p1 < 0)
    Params Pn(-1.0, 1.0, 0.1, 0.01);
    auto specn = model::build_minimal_3d(Pn);
    ZoneFlow centraln(specn.zone(1));
    for (int i = 0; i < 25; ++i) {
        const State s = rand_state(rng, 0.2);
        const double t = 3.0;
        CHECK((centraln.flow(s, t) - central_flow_closed_form(Pn, s, t)).norm() <= 1e-11);
    }
}

TEST_CASE("outer-zone closed-form oracle") {
    auto spec = model::build_minimal_3d(kFig3);
    std::mt19937_64 rng(9);
    for (int side : {-1, +1}) {
        ZoneFlow zf(spec.zone(side < 0 ? 0 : 2));
        for (int i = 0; i < 25; ++i) {
            State s = rand_state(rng, 0.4);
            s(0) = side < 0 ? s(0) - 1.0 : s(0) + 1.0;
            std::uniform_real_distribution<double> T(0.0, 5.0);
            const double t = T(rng);
            const State a = zf.flow(s, t);
            const State b = outer_closed_form(kFig3, side, s, t);
            CHECK((a - b).norm() <= 1e-10 * std::max(1.0, a.norm()));
        }
    }
}

TEST_CASE("rk45 oracle agrees with the affine flow") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    const Zone& z = spec.zone(1);
    auto field = [&](double, const State& s) { return State(z.M * s + z.c); };
    State s0(3);
    s0 << -0.2, 0.003, -0.15;
    auto samples = hybrid::rk45(field, s0, 150.0, 1e-11, 1e-13, 0.0);
    CHECK((samples.back().second - central.flow(s0, 150.0)).norm() <= 1e-8);
}

TEST_CASE("first integral on and off the rotation axis") {
    State axis(3);
    axis << 0.1, -0.002, 0.1;
    CHECK(first_integral_H(kFig3, axis) == doctest::Approx(0.0).epsilon(1e-30));
    State origin = State::Zero(3);
    CHECK(first_integral_H(kFig3, origin) == doctest::Approx(4e-6).epsilon(1e-12));

    // constancy along the central flow over a full rotation and beyond
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    State s(3);
    s << -0.25, -0.004, -0.2;
    const double H0 = first_integral_H(kFig3, s);
    for (double t = 5.0; t <= 100.0; t += 5.0) {
        const double Ht = first_integral_H(kFig3, central.flow(s, t));
        CHECK(std::abs(Ht - H0) <= 1e-12 * H0);
    }
}

TEST_CASE("axis flow stays on the axis") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    State axis(3);
    axis << 0.1, -0.002, 0.1;
    const State s50 = central.flow(axis, 50.0);
    CHECK(s50(0) == doctest::Approx(0.1 + 0.002 * 50.0).epsilon(1e-12));
    CHECK(s50(1) == doctest::Approx(-0.002).epsilon(1e-10));
    CHECK(s50(2) == doctest::Approx(s50(0)).epsilon(1e-12));  // axis: x = z here
}

TEST_CASE("reversibility equivariance of the central flow") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    std::mt19937_64 rng(13);
    auto R = [](const State& s) {
        State r(3);
        r << -s(0), s(1), -s(2);
        return r;
    };
    for (int i = 0; i < 30; ++i) {
        const State s = rand_state(rng, 0.3);
        std::uniform_real_distribution<double> T(0.0, 200.0);
        const double t = T(rng);
        const State a = central.flow(R(s), -t);
        const State b = R(central.flow(s, t));
        CHECK((a - b).norm() <= 1e-12 * std::max(1.0, b.norm()));
    }
}

TEST_CASE("crossing times: flight across the central zone") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    const double tstar = geometry::t_star(kFig3);

    // axis start on the left plane reaches the right plane at t*
    State s(3);
    s << -kFig3.delta, -0.002, -kFig3.delta;
    auto c = central.crossing_time(s, kFig3.delta, 10.0 * tstar);
    REQUIRE(c.has_value());
    CHECK(c->t == doctest::Approx(tstar).epsilon(1e-12));
    CHECK(std::abs(c->state(0) - kFig3.delta) <= 1e-12 * std::max(1.0, kFig3.delta));

    // Prop-2 entry with delta = delta_0 crosses at pi / sqrt(eps p1)
    const double d0 = 0.2 * (0.05 * std::numbers::pi + 1.0);
    Params P0(1.0, -1.0, 0.2, 0.01, d0);
    auto spec0 = model::build_minimal_3d(P0);
    ZoneFlow central0(spec0.zone(1));
    State p0(3);
    p0 << -d0, -0.002, -0.5 * std::numbers::pi * 0.2 * 0.1;
    auto c0 = central0.crossing_time(p0, d0, 1000.0);
    REQUIRE(c0.has_value());
    CHECK(c0->t == doctest::Approx(std::numbers::pi / 0.1).epsilon(1e-10));
}

TEST_CASE("departing along the axis never returns") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    // On the axis at the right plane, moving right: no positive root.
    State s(3);
    s << kFig3.delta, -0.002, kFig3.delta;
    CHECK_FALSE(central.crossing_time(s, kFig3.delta, 500.0).has_value());
}

TEST_CASE("exact tangency resolved by curvature") {
    // FSN-II central zone: fixed axis at the origin, so a radius-delta orbit
    // grazes the plane forever without crossing.
    Params P(1.0, -1.0, 0.0, 0.01);
    auto spec = model::build_minimal_3d(P);
    ZoneFlow central(spec.zone(1));
    State s(3);
    s << 0.0, -P.delta * 0.1, 0.0;  // amplitude exactly delta (y = -delta*omega)
    CHECK_FALSE(central.crossing_time(s, P.delta, 400.0).has_value());
}

TEST_CASE("x extrema of the central flow") {
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow central(spec.zone(1));
    State s(3);
    s << -0.2, 0.01, -0.1;
    auto ext = central.x_extrema_times(s, 130.0);  // ~two rotations
    REQUIRE(ext.size() >= 3);
    for (double te : ext) CHECK(std::abs(central.flow(s, te)(1)) <= 1e-10);  // x' = -y = 0
}
