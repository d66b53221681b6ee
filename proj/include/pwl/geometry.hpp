#pragma once

#include "pwl/types.hpp"

namespace pwl::geometry {

/// Invariant half-planes of the outer zones and their traces on the switching
/// planes. Plane: n . (x,y,z) = rhs; line on {x = +-delta}: y + b z = rhs.
struct SlowManifolds {
    double lambda_A = 0.0;  // fast eigenvalue of the attracting zone, < 0
    double lambda_R = 0.0;  // = -lambda_A

    Eigen::Vector3d plane_A_normal;
    double plane_A_rhs = 0.0;
    Eigen::Vector3d plane_R_normal;
    double plane_R_rhs = 0.0;

    double line_A_bz = 0.0;  // L^A on {x=-delta}: y + line_A_bz * z = line_A_rhs
    double line_A_rhs = 0.0;
    double line_R_bz = 0.0;  // L^R on {x=+delta}
    double line_R_rhs = 0.0;

    double y_star = 0.0;   // common y-axis intercept of L^A and L^R
    double z_star_A = 0.0;  // z-axis intercept of L^A
    double z_star_R = 0.0;  // z-axis intercept of L^R

    double plane_A_residual(const State& s) const;
    double plane_R_residual(const State& s) const;
    double line_A_residual(double y, double z) const { return y + line_A_bz * z - line_A_rhs; }
    double line_R_residual(double y, double z) const { return y + line_R_bz * z - line_R_rhs; }
};

SlowManifolds slow_manifolds(const Params& params);

enum class SingularityKind {
    FoldedSaddle,
    FoldedNode,
    FoldedFocus,
    FsnI,        // p2 = 0, p3 != 0
    FsnII,       // p3 = 0, p2 != 0
    NonRotating, // p1 <= 0: no central rotation
    Degenerate,  // p2 = p3 = 0
};

const char* to_string(SingularityKind kind);

struct SingularityClass {
    SingularityKind kind = SingularityKind::Degenerate;
    bool rotating = false;                       // p1 > 0
    std::optional<double> mu;                    // winding bound, when defined
    std::optional<SingularityKind> sign_class;   // saddle/node sign for p1 <= 0
    bool mu_integer_boundary = false;            // mu within 1e-9 of an integer
};

SingularityClass classify(double p1, double p2, double p3);

/// mu = p1 sqrt(p1) / |p2 p3| under delta = pi sqrt(eps). Pre: p1 > 0, p2 p3 != 0.
double max_winding(double p1, double p2, double p3);

/// General-delta winding bound (delta / (pi sqrt(eps))) * p1 sqrt(p1) / |p2 p3|.
double max_winding(const Params& params);

/// Rotation axis of the central zone: x = -(p2/p1) z, y = eps p2 p3 / p1,
/// clipped to |x| <= delta. H vanishes exactly on it.
struct RotationAxis {
    double y_level = 0.0;
    double slope_xz = 0.0;  // dx/dz = -p2/p1
    double delta = 0.0;
    bool canard_direction = true;  // false for FSN-I (axis degenerates to {x=0})

    State point_at_z(double z) const;
    std::optional<double> z_at_x(double x) const;  // absent when slope is zero
};

RotationAxis rotation_axis(const Params& params);

/// Flight time of an axis-started orbit between the switching planes,
/// t* = 2 p1 delta / (eps |p2 p3|), in fast time.
double t_star(const Params& params);

}  // namespace pwl::geometry
