#pragma once

#include "pwl/types.hpp"

#include <memory>
#include <span>

namespace pwl {

struct Crossing {
    double t = 0.0;
    State state;
    bool grazing = false;  // |x'(t)| below the tangency threshold at the crossing
};

/// Exact flow of a single affine zone, evaluated through the exponential of the
/// augmented homogeneous system (scaling-and-squaring), so zero or defective
/// eigenvalues and secular terms need no special-casing.
class ZoneFlow {
  public:
    explicit ZoneFlow(Zone zone);

    const Zone& zone() const { return zone_; }
    int dimension() const { return static_cast<int>(zone_.M.rows()); }

    State flow(const State& s, double t) const;
    double x_dot(const State& s) const;
    State field(const State& s) const { return zone_.M * s + zone_.c; }

    /// True when the x-y block rotates (complex pair); omega is its frequency.
    bool rotating() const { return rotating_; }
    double omega() const { return omega_; }

    /// Smallest t > 0 with x(t) = plane_x within `horizon`. Bracketing by
    /// sampling, bisection to |dt| <= 1e-14 max(1,t), one Newton polish.
    /// Tangential grazings are resolved by the curvature of x(t): a graze that
    /// bends back into the zone is not a crossing.
    std::optional<Crossing> crossing_time(const State& s, double plane_x, double horizon) const;

    /// Earliest crossing among several planes, found in one sampling sweep.
    struct MultiCrossing {
        int plane_index = -1;
        Crossing crossing;
    };
    std::optional<MultiCrossing> first_crossing_multi(const State& s,
                                                      std::span<const double> planes,
                                                      double horizon) const;

    /// Times of x'(t) = 0 in (0, t_end) (local extrema of x along the flow).
    std::vector<double> x_extrema_times(const State& s, double t_end) const;

  private:
    struct Impl;
    double sample_step(double horizon) const;

    Zone zone_;
    std::shared_ptr<Impl> impl_;
    bool rotating_ = false;
    double omega_ = 0.0;
    double rate_ = 1.0;  // largest |Re lambda| of the generator
};

/// First integral of the central zone of the minimal system,
/// H = eps p1 (p1 x + p2 z)^2 + (p1 y - eps p2 p3)^2.
double first_integral_H(const Params& params, const State& s);

/// Closed-form central-zone flow (trigonometric for p1 > 0, hyperbolic for
/// p1 < 0). Retained as a cross-check for the generic exponential path.
State central_flow_closed_form(const Params& params, const State& s, double t);

}  // namespace pwl
