#pragma once

#include "pwl/hybrid.hpp"
#include "pwl/model.hpp"
#include "pwl/types.hpp"

#include <functional>

namespace pwl::planar {

struct Cycle {
    double a = 0.0;
    double section_x = 0.0;
    double y_fixed = 0.0;             // section ordinate of the fixed point
    double amplitude = 0.0;           // x-range of the periodic orbit
    double period = 0.0;              // fast time
    double displacement_residual = 0.0;
    bool neutral_edge = false;        // returned fixed point bounds a neutral family
    hybrid::Trajectory orbit;         // one period from the section point
};

/// Limit cycle of a planar spec, located as a fixed point of the first-return
/// map on the vertical section through the middle-branch abscissa (bracketing
/// + secant on the return displacement). Absent when no cycle exists.
std::optional<Cycle> find_cycle(const SystemSpec& spec, double a);

struct ExplosionScan {
    std::vector<double> a;
    std::vector<double> amplitude;  // NaN where no cycle was found
    std::vector<double> period;
    double relaxation_amplitude = 0.0;
    bool transition_found = false;
    double a_lo = 0.0;  // refined transition interval
    double a_hi = 0.0;
    double width() const { return a_hi - a_lo; }
};

/// Amplitude-versus-a table over [a_min, a_max] with n samples; the first pair
/// jumping by more than half the relaxation amplitude is refined by bisection.
ExplosionScan explosion_scan(const std::function<SystemSpec(double)>& build_at_a, double a_min,
                             double a_max, int n, double refine_width = 1e-7);

ExplosionScan explosion_scan(const model::Arima& base, double eps, double a_min, double a_max,
                             int n, double refine_width = 1e-7);
ExplosionScan explosion_scan(const model::QuasiCanard& base, double eps, double a_min,
                             double a_max, int n, double refine_width = 1e-7);

struct OscillationEvent {
    double t_start = 0.0;
    double t_end = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    bool lao = false;
    double range() const { return x_max - x_min; }
};

struct TransientMmo {
    hybrid::Trajectory trajectory;
    std::vector<OscillationEvent> events;
    double threshold = 0.0;
};

/// Integrate a drifted planar system and label each oscillation arc (between
/// consecutive x-minima) as SAO or LAO by its x-range against `theta`
/// (default: half the breakpoint span of the critical manifold).
TransientMmo transient_mmo(const SystemSpec& spec, const PwlCurve& curve, const State& s0,
                           double horizon, double theta = 0.0);

}  // namespace pwl::planar
