#pragma once

#include "pwl/types.hpp"
#include "pwl/zoneflow.hpp"

#include <functional>

namespace pwl::hybrid {

enum class Termination { Horizon, LeftDomain, Event, SwitchLimit };

struct Segment {
    int zone = 0;
    double t_enter = 0.0;
    double t_exit = 0.0;
    State s_enter;
    State s_exit;
};

struct Trajectory {
    std::vector<Segment> segments;
    std::vector<double> t;        // dense sample times
    std::vector<State> s;         // dense sample states
    std::vector<int> sample_zone;
    Termination termination = Termination::Horizon;
    std::string diagnostic;

    double duration() const { return segments.empty() ? 0.0 : segments.back().t_exit; }
    const State& final_state() const;
};

struct IntegrateOptions {
    long max_switches = 10'000'000;
    double dense_step = 0.0;  // 0: per-zone default (period/64 rotating, horizon/4096 else)
    // Optional stopping event, checked at switching planes: (state, time) -> stop.
    std::function<bool(const State&, double)> stop_at_switch;
};

Trajectory integrate(const SystemSpec& spec, const State& s0, double horizon,
                     const IntegrateOptions& opts = {});

struct WindingCount {
    long turns = 0;
    double residual = 0.0;     // in [0, 2 pi)
    double total_angle = 0.0;  // turns * 2 pi + residual
};

/// Accumulated angle of (p1 x + p2 z, p1 y - eps p2 p3) over the trajectory's
/// central-zone segments. Pre: p1 > 0.
WindingCount winding_number(const Trajectory& traj, const Params& params);

/// Same accumulation along an arbitrary dense path (used for smooth orbits).
WindingCount winding_of_path(const std::vector<State>& path, const Params& params);

/// Adaptive Dormand-Prince integration of the smooth minimal system (f = x^2)
/// in fast time, for side-by-side comparisons. rtol defaults to 1e-10.
Trajectory integrate_smooth_reference(const Params& params, const State& s0, double horizon,
                                      double rtol = 1e-10,
                                      double stop_when_abs_x_exceeds = 0.0);

/// Generic adaptive RK45 on a user field (test oracle duty as well).
/// `stop` is checked after each accepted step and ends the integration early.
std::vector<std::pair<double, State>> rk45(
    const std::function<State(double, const State&)>& field, const State& s0, double t_end,
    double rtol, double atol, double sample_step,
    const std::function<bool(double, const State&)>& stop = {});

/// First crossing of the interior plane {x = plane_x} with sgn(x') = direction,
/// tracked across switching planes. The plane need not be a zone boundary.
std::optional<std::pair<double, State>> next_plane_crossing(const SystemSpec& spec,
                                                            const State& s0, double plane_x,
                                                            int direction, double horizon);

}  // namespace pwl::hybrid
