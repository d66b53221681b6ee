#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwl/geometry.hpp"
#include "pwl/model.hpp"
#include "pwl/zoneflow.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pwl;
using namespace pwl::geometry;

namespace {
const Params kFig3(1.0, -1.0, 0.2, 0.01);
}

TEST_CASE("fast eigenvalues") {
    auto sm = slow_manifolds(kFig3);
    CHECK(sm.lambda_A ==
          doctest::Approx(-(1.0 + std::sqrt(1.0 - 0.04)) / 2.0).epsilon(1e-15));
    CHECK(sm.lambda_A == doctest::Approx(-0.98989794855663559).epsilon(1e-13));
    CHECK(sm.lambda_R == -sm.lambda_A);  // exact by construction
    // eps -> 0 limit
    auto sm0 = slow_manifolds(Params(1.0, -1.0, 0.2, 1e-10));
    CHECK(sm0.lambda_A == doctest::Approx(-1.0).epsilon(1e-9));
    // complex fast eigenvalues rejected
    CHECK_THROWS_AS(slow_manifolds(Params(1.0, -1.0, 0.2, 0.3)), std::invalid_argument);
}

TEST_CASE("slow-manifold planes are flow invariant") {
    auto sm = slow_manifolds(kFig3);
    auto spec = model::build_minimal_3d(kFig3);
    ZoneFlow left(spec.zone(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> Ux(-3.0, -0.35), Uz(-1.0, 1.0), Ut(0.0, 4.0);
    int tested = 0;
    for (int i = 0; i < 200 && tested < 50; ++i) {
        State s(3);
        s(0) = Ux(rng);
        s(2) = Uz(rng);
        // place on S^A: solve the plane equation for y
        s(1) = (sm.plane_A_rhs + sm.lambda_A * sm.lambda_A * s(0) -
                kFig3.eps * kFig3.p2 * s(2)) /
               sm.lambda_A;
        REQUIRE(std::abs(sm.plane_A_residual(s)) <= 1e-12);
        const double t = Ut(rng);
        const State st = left.flow(s, t);
        if (st(0) >= -kFig3.delta) continue;  // left the zone; invariance claim ends there
        CHECK(std::abs(sm.plane_A_residual(st)) <= 1e-10);
        ++tested;
    }
    CHECK(tested >= 30);
}

TEST_CASE("switching-plane lines and intercepts") {
    auto sm = slow_manifolds(kFig3);
    // L^R = R(L^A): shared y-intercept, mirrored z-intercepts
    CHECK(sm.line_R_rhs == doctest::Approx(sm.line_A_rhs).epsilon(1e-14));
    CHECK(sm.z_star_R == doctest::Approx(-sm.z_star_A).epsilon(1e-12));
    CHECK(sm.y_star == doctest::Approx(sm.line_A_rhs));

    // z*_A leading term delta p1 / p2 for the saddle set
    Params Psad(1.0, 1.0, 0.1, 0.01);
    auto sms = slow_manifolds(Psad);
    CHECK(std::abs(sms.z_star_A - Psad.delta) <= 2.0 * Psad.eps);

    // a point of L^A lies on S^A
    State s(3);
    s << -kFig3.delta, 0.0, 0.3;
    s(1) = sm.line_A_rhs - sm.line_A_bz * s(2);
    CHECK(std::abs(sm.plane_A_residual(s)) <= 1e-13);
}

TEST_CASE("classification of the six reference parameter sets") {
    CHECK(classify(1, 1, 0.1).kind == SingularityKind::FoldedSaddle);
    CHECK(classify(1, -1, 0.1).kind == SingularityKind::FoldedNode);
    CHECK(classify(1, -2, 1).kind == SingularityKind::FoldedFocus);
    CHECK(classify(1, 0, 0.1).kind == SingularityKind::FsnI);
    CHECK(classify(1, -1, 0).kind == SingularityKind::FsnII);
    auto nr = classify(-1, 1, 0.1);
    CHECK(nr.kind == SingularityKind::NonRotating);
    REQUIRE(nr.sign_class.has_value());
    CHECK(*nr.sign_class == SingularityKind::FoldedSaddle);
    CHECK_FALSE(nr.rotating);

    auto deg = classify(1, 0, 0);
    CHECK(deg.kind == SingularityKind::Degenerate);

    // node/focus threshold: p2 p3 = -p1 sqrt(p1)
    CHECK(classify(1, -2, 0.49).kind == SingularityKind::FoldedNode);
    CHECK(classify(1, -2, 0.51).kind == SingularityKind::FoldedFocus);
}

TEST_CASE("winding bound mu") {
    CHECK(max_winding(1, -1, 0.2) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(max_winding(1, -1, 0.22) == doctest::Approx(1.0 / 0.22).epsilon(1e-13));
    // p1^{3/2} homogeneity
    CHECK(max_winding(2, -1, 0.2) / max_winding(1, -1, 0.2) ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
    // eps-independence under delta = pi sqrt(eps)
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        Params P(1.0, -1.0, 0.2, eps);
        CHECK(std::abs(max_winding(P) - 5.0) <= 1e-12);
    }
    CHECK_THROWS_AS(max_winding(1, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(max_winding(-1, 1, 0.1), std::invalid_argument);
}

TEST_CASE("rotation axis and flight time") {
    auto ax = rotation_axis(kFig3);
    const State p = ax.point_at_z(0.1);
    CHECK(p(0) == doctest::Approx(0.1));
    CHECK(p(1) == doctest::Approx(-0.002));
    CHECK(first_integral_H(kFig3, p) <= 1e-30);

    CHECK(t_star(kFig3) == doctest::Approx(2.0 * kFig3.p1 * kFig3.delta / 0.002).epsilon(1e-14));
    CHECK(t_star(kFig3) == doctest::Approx(100.0 * std::numbers::pi).epsilon(1e-13));

    // FSN-I: the axis degenerates and is flagged
    auto axI = rotation_axis(Params(1.0, 0.0, 0.1, 0.01));
    CHECK_FALSE(axI.canard_direction);
    CHECK(axI.slope_xz == 0.0);
    CHECK_THROWS_AS(t_star(Params(1.0, 0.0, 0.1, 0.01)), std::invalid_argument);
}

TEST_CASE("classification thresholds match the smooth scaling") {
    // Up to the positive factor sqrt(p1)/8, the node/focus split sits where the
    // smooth threshold -p1^2/8 sits: compare the two inequalities directly.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double p1 = U(rng);
        const double pp = -U(rng);
        const bool pwl_node = pp > -p1 * std::sqrt(p1);
        const bool smooth_node = pp * (std::sqrt(p1) / 8.0) > -p1 * p1 / 8.0;
        CHECK(pwl_node == smooth_node);
    }
}
