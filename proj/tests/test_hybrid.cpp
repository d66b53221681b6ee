#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwl/canard.hpp"
#include "pwl/geometry.hpp"
#include "pwl/hybrid.hpp"
#include "pwl/model.hpp"
#include "pwl/zoneflow.hpp"

#include <cmath>
#include <numbers>

using namespace pwl;

namespace {
const Params kFig3(1.0, -1.0, 0.2, 0.01);
}

TEST_CASE("horizon zero gives a single empty segment") {
    auto spec = model::build_minimal_3d(kFig3);
    State s0(3);
    s0 << -0.5, 0.1, 0.0;
    auto traj = hybrid::integrate(spec, s0, 0.0);
    REQUIRE(traj.segments.size() == 1);
    CHECK(traj.segments[0].t_exit == 0.0);
    CHECK((traj.final_state() - s0).norm() == 0.0);
}

TEST_CASE("segment chaining and increasing times") {
    auto spec = model::build_minimal_3d(kFig3);
    State s0(3);
    s0 << -kFig3.delta, -0.004, -0.25;
    auto traj = hybrid::integrate(spec, s0, 400.0);
    REQUIRE(traj.segments.size() >= 2);
    for (std::size_t i = 1; i < traj.segments.size(); ++i) {
        const auto& a = traj.segments[i - 1];
        const auto& b = traj.segments[i];
        CHECK(b.t_enter == a.t_exit);
        CHECK((b.s_enter - a.s_exit).norm() <= 1e-12 * std::max(1.0, a.s_exit.norm()));
        CHECK(b.t_exit > b.t_enter);
    }
    for (std::size_t i = 1; i < traj.t.size(); ++i) CHECK(traj.t[i] >= traj.t[i - 1]);
}

TEST_CASE("H is constant along central-zone samples of a trajectory") {
    auto spec = model::build_minimal_3d(kFig3);
    State s0(3);
    s0 << -kFig3.delta, -0.004, -0.25;
    auto traj = hybrid::integrate(spec, s0, 300.0);
    double H_ref = -1.0;
    for (std::size_t i = 0; i < traj.s.size(); ++i) {
        if (traj.sample_zone[i] != 1) {
            H_ref = -1.0;
            continue;
        }
        const double H = first_integral_H(kFig3, traj.s[i]);
        if (H_ref < 0.0) H_ref = H;
        CHECK(std::abs(H - H_ref) <= 1e-12 * std::max(H_ref, 1e-300));
    }
}

TEST_CASE("maximal-canard transit exits at the mirrored point") {
    auto res = canard::maximal_canards(kFig3);
    REQUIRE(!res.canards.empty());
    auto spec = model::build_minimal_3d(kFig3);
    const auto& sol = res.canards.front();  // strong canard gamma_0
    auto traj = hybrid::integrate(spec, sol.entry, sol.flight_time);
    State mirrored(3);
    mirrored << kFig3.delta, sol.entry(1), -sol.entry(2);
    CHECK((traj.final_state() - mirrored).norm() <= 1e-8);
}

TEST_CASE("winding of gamma_2 equals two turns") {
    auto res = canard::maximal_canards(kFig3);
    REQUIRE(res.canards.size() >= 3);
    const auto& g2 = res.canards[2];
    REQUIRE(g2.k == 2);
    auto spec = model::build_minimal_3d(kFig3);
    auto traj = hybrid::integrate(spec, g2.entry, g2.flight_time * (1.0 - 1e-12));
    auto w = hybrid::winding_number(traj, kFig3);
    CHECK(w.turns == 2);
}

TEST_CASE("winding of the selected canards equals k") {
    for (int k = 0; k <= 3; ++k) {
        auto sel = canard::selected_canard(1.0, -1.0, 0.2, 0.01, k);
        auto spec = model::build_minimal_3d(sel.params);
        auto traj = hybrid::integrate(spec, sel.entry, sel.flight_time * (1.0 - 1e-12));
        auto w = hybrid::winding_number(traj, sel.params);
        CHECK(w.turns == k);
        // total rotation angle is (2k+1) pi by construction
        CHECK(w.total_angle ==
              doctest::Approx((2.0 * k + 1.0) * std::numbers::pi).epsilon(1e-6));
    }
}

TEST_CASE("no rotation count for p1 <= 0, none off the central zone") {
    auto spec = model::build_minimal_3d(kFig3);
    State s0(3);
    s0 << -2.0, 1.0, 0.4;  // stays left of the central zone over this horizon
    auto traj = hybrid::integrate(spec, s0, 5.0);
    auto w = hybrid::winding_number(traj, kFig3);
    CHECK(w.turns == 0);
    CHECK(w.residual == doctest::Approx(0.0));
    CHECK_THROWS_AS(hybrid::winding_number(traj, Params(-1.0, 1.0, 0.1, 0.01)),
                    std::invalid_argument);
}

TEST_CASE("switch limit aborts with a diagnostic") {
    auto ret = model::build_global_return(kFig3, [] {
        ReturnParams r;
        r.x0 = 1.0;
        return r;
    }());
    State s0(3);
    s0 << -1.0, 0.6, -0.1;
    hybrid::IntegrateOptions opts;
    opts.max_switches = 3;
    CHECK_THROWS_AS(hybrid::integrate(ret, s0, 3000.0, opts), std::runtime_error);
}

TEST_CASE("deep left-zone start contracts onto the slow manifold at rate lambda_A") {
    auto spec = model::build_minimal_3d(kFig3);
    auto sm = geometry::slow_manifolds(kFig3);
    ZoneFlow left(spec.zone(0));
    State s0(3);
    s0 << -1.5, -1.0, 0.2;  // well below S^A
    double r_prev = std::abs(sm.plane_A_residual(s0));
    double x_prev = s0(0);
    for (int i = 1; i <= 6; ++i) {
        const State st = left.flow(s0, 0.5 * i);
        const double r = std::abs(sm.plane_A_residual(st));
        const double expected = std::exp(sm.lambda_A * 0.5);
        CHECK(r / r_prev == doctest::Approx(expected).epsilon(0.15));
        if (r > 1e-3) {
            CHECK(st(0) < x_prev);  // x decreases until the manifold is reached
            x_prev = st(0);
        }
        r_prev = r;
    }
}

TEST_CASE("smooth reference: folded-saddle fan keeps its ordering") {
    Params P(1.0, 1.0, 0.1, 0.01);
    std::vector<double> z_exit;
    for (int i = 0; i < 20; ++i) {
        const double z0 = -0.45 + 0.02 * i;
        State s0(3);
        s0 << -0.8, 0.66, z0;  // only z varies across the sweep
        auto traj = hybrid::integrate_smooth_reference(P, s0, 400.0, 1e-10, 1.2);
        z_exit.push_back(traj.s.back()(2));
    }
    for (std::size_t i = 1; i < z_exit.size(); ++i) CHECK(z_exit[i] > z_exit[i - 1]);
}

TEST_CASE("smooth and PWL fast linearizations share signs away from the fold") {
    // d/dx of the fast equation: 2x for f = x^2, sgn(x) for the PWL f.
    for (double x : {-1.0, -0.5, 0.5, 1.0}) {
        const double smooth_sign = 2.0 * x;
        const double pwl_sign = x > kFig3.delta ? 1.0 : (x < -kFig3.delta ? -1.0 : 0.0);
        CHECK(smooth_sign * pwl_sign > 0.0);
    }
}

TEST_CASE("smooth folded-saddle trajectory winds at least once") {
    Params P(1.0, 1.0, 0.1, 0.01);
    State s0(3);
    s0 << 0.05, 0.05 * 0.05 + 0.0025, -0.05;
    auto traj = hybrid::integrate_smooth_reference(P, s0, 2500.0, 1e-10, 1.5);
    auto w = hybrid::winding_of_path(traj.s, P);
    CHECK(w.total_angle >= 2.0 * std::numbers::pi);
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < traj.s.size(); ++i)
        if (traj.s[i](0) >= traj.s[i - 1](0) && traj.s[i](0) > traj.s[i + 1](0) &&
            std::abs(traj.s[i](0)) < 0.5)
            ++maxima;
    CHECK(maxima >= 2);
}

TEST_CASE("next_plane_crossing finds interior sections with orientation") {
    auto spec = model::build_minimal_3d(kFig3);
    State s0(3);
    s0 << -kFig3.delta, -0.004, -0.25;
    // section strictly inside the central zone
    auto hit = hybrid::next_plane_crossing(spec, s0, 0.05, +1, 500.0);
    REQUIRE(hit.has_value());
    CHECK(std::abs(hit->second(0) - 0.05) <= 1e-11);
    ZoneFlow central(spec.zone(1));
    CHECK(central.x_dot(hit->second) > 0.0);
}
