#pragma once

#include "pwl/geometry.hpp"
#include "pwl/types.hpp"

namespace pwl::singular {

/// Exact flow of the reduced (eps = 0) slow system projected on (x, z).
/// zone_sign = +1 for the repelling half-plane {x > 0}, -1 for the attracting
/// one; 0 selects the degenerate central dynamics (motion along the weak line).
/// States are (x, z).
State reduced_flow(const Params& params, int zone_sign, const State& xz, double t);

/// Reduced system of the smooth minimal model, dx = sgn(x)(p1 x + p2 z),
/// dz = 2 p3 |x| (adaptive integration; comparison only).
State smooth_reduced_flow(const Params& params, const State& xz, double t);

struct CanardDirections {
    // Weak: the line p1 x + p2 z = 0 in the (z, x) plane.
    double weak_coef_x = 0.0;
    double weak_coef_z = 0.0;
    // Strong: direction (dz, dx) through the origin.
    double strong_dz = 0.0;
    double strong_dx = 1.0;
    bool weak_exists_as_canard = true;  // false for FSN-I and FSN-II
    bool degenerate = false;            // FSN-II: all central dynamics gone
};

CanardDirections singular_canard_directions(const Params& params);

enum class TangencyKind { VisibleVisible, InvisibleInvisible, Degenerate };
const char* to_string(TangencyKind kind);

/// Visible-visible for the folded saddle, invisible-invisible (Teixeira) for
/// the folded node, degenerate when p2 p3 = 0.
TangencyKind tangency_classification(const Params& params);

struct Window {
    double z_min = -1.0, z_max = 1.0;
    double x_min = -1.0, x_max = 1.0;
    bool contains(double z, double x) const {
        return z >= z_min && z <= z_max && x >= x_min && x <= x_max;
    }
};

struct FieldSample {
    double z = 0.0, x = 0.0;
    double dz = 0.0, dx = 0.0;
    int zone = 0;
};

struct Polyline {
    std::vector<Eigen::Vector2d> pts;  // (z, x)
    int zone = 0;                      // -1 / 0 / +1
    std::string role;
};

struct Funnel {
    double gate_z_lo = 0.0;  // boundary segment between the strong-canard
    double gate_z_hi = 0.0;  // connection point and the tangency point
    std::vector<Polyline> boundary;
};

struct SingularPortrait {
    geometry::SingularityKind kind = geometry::SingularityKind::Degenerate;
    TangencyKind tangency = TangencyKind::Degenerate;
    bool opened = false;
    double delta_tilde = 0.0;
    Window window;

    std::vector<FieldSample> field;
    std::vector<Polyline> half_lines;
    std::vector<Eigen::Vector2d> tangency_points;  // (z, x)
    std::vector<Polyline> weak_pieces;
    std::vector<Polyline> strong_pieces;
    std::vector<Polyline> equilibria_lines;  // FSN-II only
    std::optional<Funnel> funnel;            // folded node only

    bool weak_connected = false;
    bool strong_connected = false;
    bool weak_exists_as_canard = true;
};

/// Assemble the singular phase-portrait dataset. When `opened` the central
/// strip of half-width delta_tilde stays open; it carries only the weak line
/// and the strong chord (the central reduced system has no field to draw).
SingularPortrait singular_portrait(const Params& params, const Window& window, bool opened,
                                   double delta_tilde, int grid_n = 24);

/// Forward reduced-flow probe: does the orbit of (x, z) reach the open strip
/// through the funnel gate before leaving the window?
bool funnel_reaches_strip(const Params& params, const Window& window, double delta_tilde,
                          const State& xz, double* z_hit = nullptr);

}  // namespace pwl::singular
