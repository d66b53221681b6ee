#include "pwl/geometry.hpp"

#include <cmath>
#include <numbers>

namespace pwl::geometry {

double SlowManifolds::plane_A_residual(const State& s) const {
    return plane_A_normal.dot(Eigen::Vector3d(s(0), s(1), s(2))) - plane_A_rhs;
}

double SlowManifolds::plane_R_residual(const State& s) const {
    return plane_R_normal.dot(Eigen::Vector3d(s(0), s(1), s(2))) - plane_R_rhs;
}

SlowManifolds slow_manifolds(const Params& params) {
    params.validate();
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    const double disc = 1.0 - 4.0 * e * p1;
    if (!(disc > 0.0))
        throw std::invalid_argument("slow_manifolds: complex fast eigenvalues (1 - 4 eps p1 <= 0)");
    SlowManifolds sm;
    sm.lambda_A = -(1.0 + std::sqrt(disc)) / 2.0;
    sm.lambda_R = -sm.lambda_A;
    const double lA = sm.lambda_A, lR = sm.lambda_R, d = params.delta;

    sm.plane_A_normal = Eigen::Vector3d(-lA * lA, lA, e * p2);
    sm.plane_A_rhs = -d * lA - (p2 * p3 / lA) * e * e;
    sm.plane_R_normal = Eigen::Vector3d(-lR * lR, lR, e * p2);
    sm.plane_R_rhs = -d * lR - (p2 * p3 / lR) * e * e;

    sm.line_A_bz = e * p2 / lA;
    sm.line_A_rhs = -d * (1.0 + lA) - (p2 * p3 / (lA * lA)) * e * e;
    sm.line_R_bz = e * p2 / lR;
    sm.line_R_rhs = -d * (1.0 - lR) - (p2 * p3 / (lR * lR)) * e * e;

    sm.y_star = sm.line_A_rhs;
    if (p2 != 0.0) {
        sm.z_star_A = sm.line_A_rhs / sm.line_A_bz;
        sm.z_star_R = sm.line_R_rhs / sm.line_R_bz;
    } else {
        sm.z_star_A = sm.z_star_R = std::numeric_limits<double>::quiet_NaN();
    }
    return sm;
}

const char* to_string(SingularityKind kind) {
    switch (kind) {
        case SingularityKind::FoldedSaddle: return "FoldedSaddle";
        case SingularityKind::FoldedNode: return "FoldedNode";
        case SingularityKind::FoldedFocus: return "FoldedFocus";
        case SingularityKind::FsnI: return "FSN-I";
        case SingularityKind::FsnII: return "FSN-II";
        case SingularityKind::NonRotating: return "NonRotating";
        case SingularityKind::Degenerate: return "Degenerate";
    }
    return "?";
}

SingularityClass classify(double p1, double p2, double p3) {
    if (!(std::isfinite(p1) && std::isfinite(p2) && std::isfinite(p3)))
        throw std::invalid_argument("classify: inputs must be finite");
    SingularityClass out;
    out.rotating = p1 > 0.0;
    if (p2 == 0.0 && p3 == 0.0) {
        out.kind = SingularityKind::Degenerate;
        return out;
    }
    if (p2 == 0.0) {
        out.kind = SingularityKind::FsnI;
        return out;
    }
    if (p3 == 0.0) {
        out.kind = SingularityKind::FsnII;
        return out;
    }
    const double pp = p2 * p3;
    if (p1 <= 0.0) {
        out.kind = SingularityKind::NonRotating;
        out.sign_class =
            pp > 0.0 ? SingularityKind::FoldedSaddle : SingularityKind::FoldedNode;
        return out;
    }
    out.mu = max_winding(p1, p2, p3);
    out.mu_integer_boundary = std::abs(*out.mu - std::round(*out.mu)) < 1e-9;
    if (pp > 0.0) {
        out.kind = SingularityKind::FoldedSaddle;
    } else if (pp > -p1 * std::sqrt(p1)) {
        out.kind = SingularityKind::FoldedNode;
    } else {
        out.kind = SingularityKind::FoldedFocus;
    }
    return out;
}

double max_winding(double p1, double p2, double p3) {
    if (!(p1 > 0.0)) throw std::invalid_argument("max_winding: requires p1 > 0");
    if (p2 * p3 == 0.0)
        throw std::invalid_argument("max_winding: undefined for p2 p3 = 0 (FSN)");
    return p1 * std::sqrt(p1) / std::abs(p2 * p3);
}

double max_winding(const Params& params) {
    const double base = max_winding(params.p1, params.p2, params.p3);
    return base * params.delta / (std::numbers::pi * std::sqrt(params.eps));
}

State RotationAxis::point_at_z(double z) const {
    State s(3);
    s(0) = slope_xz * z;
    s(1) = y_level;
    s(2) = z;
    return s;
}

std::optional<double> RotationAxis::z_at_x(double x) const {
    if (slope_xz == 0.0) return std::nullopt;
    return x / slope_xz;
}

RotationAxis rotation_axis(const Params& params) {
    params.validate();
    if (params.p1 == 0.0) throw std::invalid_argument("rotation_axis: requires p1 != 0");
    RotationAxis ax;
    ax.y_level = params.eps * params.p2 * params.p3 / params.p1;
    ax.slope_xz = -params.p2 / params.p1;
    ax.delta = params.delta;
    ax.canard_direction = params.p2 != 0.0;
    return ax;
}

double t_star(const Params& params) {
    params.validate();
    if (params.p2 * params.p3 == 0.0)
        throw std::invalid_argument("t_star: undefined for p2 p3 = 0 (FSN)");
    return 2.0 * params.p1 * params.delta / (params.eps * std::abs(params.p2 * params.p3));
}

}  // namespace pwl::geometry
