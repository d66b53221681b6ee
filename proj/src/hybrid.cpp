#include "pwl/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pwl::hybrid {

const State& Trajectory::final_state() const {
    if (!s.empty()) return s.back();
    if (!segments.empty()) return segments.back().s_exit;
    throw std::runtime_error("Trajectory: empty");
}

namespace {

double default_dense_step(const ZoneFlow& zf, double horizon) {
    if (zf.rotating()) return (2.0 * std::numbers::pi / zf.omega()) / 64.0;
    return std::max(horizon / 4096.0, 1e-9);
}

void sample_segment(Trajectory& traj, const ZoneFlow& zf, const State& s0, double t0,
                    double t_len, int zone, double step, bool include_start) {
    const int n = std::max(1, static_cast<int>(std::ceil(t_len / step)));
    for (int i = include_start ? 0 : 1; i <= n; ++i) {
        const double tau = std::min(t_len, i * t_len / n);
        traj.t.push_back(t0 + tau);
        traj.s.push_back(i == 0 ? s0 : zf.flow(s0, tau));
        traj.sample_zone.push_back(zone);
        if (tau >= t_len) break;
    }
}

}  // namespace

Trajectory integrate(const SystemSpec& spec, const State& s0, double horizon,
                     const IntegrateOptions& opts) {
    if (s0.size() != spec.dimension())
        throw std::invalid_argument("integrate: state dimension mismatch");
    if (!s0.allFinite()) throw std::invalid_argument("integrate: state must be finite");
    if (horizon < 0.0) throw std::invalid_argument("integrate: horizon must be >= 0");

    Trajectory traj;
    if (horizon == 0.0) {
        Segment seg;
        seg.zone = spec.zone_index(s0);
        seg.s_enter = seg.s_exit = s0;
        traj.segments.push_back(seg);
        traj.t.push_back(0.0);
        traj.s.push_back(s0);
        traj.sample_zone.push_back(seg.zone);
        return traj;
    }

    std::vector<ZoneFlow> flows;
    flows.reserve(static_cast<std::size_t>(spec.zone_count()));
    for (const auto& z : spec.zones()) flows.emplace_back(z);

    State s = s0;
    double t_now = 0.0;
    int zone = spec.zone_index(s);
    long switches = 0;

    while (t_now < horizon) {
        const ZoneFlow& zf = flows[static_cast<std::size_t>(zone)];
        const double remaining = horizon - t_now;

        std::optional<Crossing> next;
        int exit_side = 0;  // -1: left plane, +1: right plane
        const Zone& zdef = zf.zone();
        {
            std::vector<double> planes;
            std::vector<int> sides;
            for (int side : {-1, +1}) {
                const double plane = side < 0 ? zdef.x_lo : zdef.x_hi;
                if (!std::isfinite(plane)) continue;
                planes.push_back(plane);
                sides.push_back(side);
            }
            if (auto mc = zf.first_crossing_multi(s, planes, remaining)) {
                next = std::move(mc->crossing);
                exit_side = sides[static_cast<std::size_t>(mc->plane_index)];
            }
        }

        const double t_len = next ? next->t : remaining;
        const double step = opts.dense_step > 0.0 ? opts.dense_step
                                                  : default_dense_step(zf, horizon);
        sample_segment(traj, zf, s, t_now, t_len, zone, step, traj.t.empty());

        Segment seg;
        seg.zone = zone;
        seg.t_enter = t_now;
        seg.t_exit = t_now + t_len;
        seg.s_enter = s;
        seg.s_exit = next ? next->state : zf.flow(s, t_len);
        traj.segments.push_back(seg);

        t_now += t_len;
        s = traj.segments.back().s_exit;

        if (!next) {
            traj.termination = Termination::Horizon;
            break;
        }
        zone += exit_side;
        if (zone < 0 || zone >= spec.zone_count()) {
            traj.termination = Termination::LeftDomain;
            traj.diagnostic = "orbit left the zone range";
            break;
        }
        if (opts.stop_at_switch && opts.stop_at_switch(s, t_now)) {
            traj.termination = Termination::Event;
            break;
        }
        if (++switches > opts.max_switches) {
            traj.termination = Termination::SwitchLimit;
            traj.diagnostic = "switch limit exceeded (runaway chatter)";
            throw std::runtime_error("integrate: " + traj.diagnostic);
        }
        if (t_now >= horizon) {
            traj.termination = Termination::Horizon;
            break;
        }
    }
    return traj;
}

namespace {
// Accumulate atan2 increments of (u, v) along consecutive samples.
void accumulate_angle(double& total, double& prev_angle, bool& have_prev, double u, double v) {
    if (u == 0.0 && v == 0.0) return;
    const double a = std::atan2(v, u);
    if (have_prev) {
        double d = a - prev_angle;
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
        total += d;
    }
    prev_angle = a;
    have_prev = true;
}

WindingCount pack_winding(double total) {
    WindingCount w;
    w.total_angle = total;
    const double two_pi = 2.0 * std::numbers::pi;
    w.turns = static_cast<long>(std::floor(total / two_pi));
    w.residual = total - two_pi * static_cast<double>(w.turns);
    if (w.residual >= two_pi) {  // guard the floating boundary
        w.residual -= two_pi;
        ++w.turns;
    }
    return w;
}
}  // namespace

WindingCount winding_number(const Trajectory& traj, const Params& params) {
    if (!(params.p1 > 0.0))
        throw std::invalid_argument("winding_number: no rotation for p1 <= 0");
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    const double x_bound = params.delta * (1.0 + 1e-9);

    // Walk the dense table; accumulate per contiguous central-zone run so the
    // angle never connects across an outer-zone excursion. The default dense
    // step resolves a rotation with 64 samples, ample for atan2 tracking.
    double total = 0.0, prev_angle = 0.0;
    bool have_prev = false;
    for (const auto& si : traj.s) {
        if (std::abs(si(0)) > x_bound) {
            have_prev = false;
            continue;
        }
        const double u = p1 * si(0) + p2 * si(2);
        const double v = p1 * si(1) - e * p2 * p3;
        accumulate_angle(total, prev_angle, have_prev, u, v);
    }
    return pack_winding(total);
}

WindingCount winding_of_path(const std::vector<State>& path, const Params& params) {
    double total = 0.0, prev_angle = 0.0;
    bool have_prev = false;
    for (const auto& si : path) {
        const double u = params.p1 * si(0) + params.p2 * si(2);
        const double v = params.p1 * si(1) - params.eps * params.p2 * params.p3;
        accumulate_angle(total, prev_angle, have_prev, u, v);
    }
    return pack_winding(total);
}

std::vector<std::pair<double, State>> rk45(
    const std::function<State(double, const State&)>& field, const State& s0, double t_end,
    double rtol, double atol, double sample_step,
    const std::function<bool(double, const State&)>& stop) {
    // Dormand-Prince 5(4) coefficients.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<std::pair<double, State>> out;
    out.emplace_back(0.0, s0);
    State s = s0;
    double t = 0.0;
    double h = std::min(1e-3, t_end > 0 ? t_end : 1e-3);  // controller step
    double next_sample = sample_step > 0.0 ? sample_step : t_end;

    State k1 = field(t, s);
    long safety = 0;
    while (t < t_end) {
        if (++safety > 50'000'000) throw std::runtime_error("rk45: step limit exceeded");
        // The attempted step may be clipped to land on a sample time or t_end;
        // the controller step h is updated from the error alone.
        double h_try = std::min(h, t_end - t);
        bool land_on_sample = false;
        if (sample_step > 0.0 && t + h_try >= next_sample - 1e-15 && next_sample < t_end) {
            h_try = std::max(next_sample - t, 1e-16 * std::max(1.0, std::abs(t)));
            land_on_sample = true;
        }
        const double hs = h_try;
        const State k2 = field(t + c2 * hs, s + hs * (a21 * k1));
        const State k3 = field(t + c3 * hs, s + hs * (a31 * k1 + a32 * k2));
        const State k4 = field(t + c4 * hs, s + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 =
            field(t + c5 * hs, s + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const State k6 =
            field(t + hs, s + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const State s_new = s + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = field(t + hs, s_new);
        const State err_v = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < s.size(); ++i) {
            const double sc = atol + rtol * std::max(std::abs(s(i)), std::abs(s_new(i)));
            err = std::max(err, std::abs(err_v(i)) / sc);
        }
        if (err <= 1.0) {
            t += hs;
            s = s_new;
            k1 = k7;
            const bool stopping = stop && stop(t, s);
            if (land_on_sample || sample_step <= 0.0 || t >= t_end || stopping) {
                out.emplace_back(t, s);
                if (land_on_sample) next_sample += sample_step;
            }
            if (stopping) break;
        }
        const double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2);
        const double h_new = hs * std::clamp(fac, 0.2, 5.0);
        // A clipped accepted step must not throttle the controller.
        h = (err <= 1.0 && land_on_sample) ? std::max(h, h_new) : h_new;
        if (err > 1.0 && hs < 1e-14 * std::max(1.0, std::abs(t)))
            throw std::runtime_error("rk45: step-size underflow at t=" + std::to_string(t));
    }
    return out;
}

std::optional<std::pair<double, State>> next_plane_crossing(const SystemSpec& spec,
                                                            const State& s0, double plane_x,
                                                            int direction, double horizon) {
    std::vector<ZoneFlow> flows;
    for (const auto& z : spec.zones()) flows.emplace_back(z);

    State s = s0;
    double t_now = 0.0;
    int zone = spec.zone_index(s);
    long guard = 0;
    while (t_now < horizon && ++guard < 10'000'000) {
        const ZoneFlow& zf = flows[static_cast<std::size_t>(zone)];
        const Zone& zd = zf.zone();
        const double remaining = horizon - t_now;

        // One sweep brackets the zone boundaries and (when interior to the
        // zone) the section plane together; continue past crossings of the
        // section with the wrong orientation.
        std::vector<double> planes;
        std::vector<int> sides;  // 0 marks the section itself
        for (int side : {-1, +1}) {
            const double plane = side < 0 ? zd.x_lo : zd.x_hi;
            if (!std::isfinite(plane)) continue;
            planes.push_back(plane);
            sides.push_back(side);
        }
        const bool section_here = plane_x >= zd.x_lo && plane_x <= zd.x_hi;
        if (section_here) {
            planes.push_back(plane_x);
            sides.push_back(0);
        }

        State probe = s;
        double t_base = 0.0;
        bool advanced = false;
        for (int tries = 0; tries < 256; ++tries) {
            auto mc = zf.first_crossing_multi(probe, planes, remaining - t_base);
            if (!mc) return std::nullopt;
            const int side = sides[static_cast<std::size_t>(mc->plane_index)];
            if (side == 0) {
                const double xd = zf.x_dot(mc->crossing.state);
                if (xd * direction > 0.0)
                    return std::make_pair(t_now + t_base + mc->crossing.t, mc->crossing.state);
                const double nudge = 1e-12 * std::max(1.0, mc->crossing.t);
                t_base += mc->crossing.t + nudge;
                probe = zf.flow(probe, mc->crossing.t + nudge);
                continue;
            }
            t_now += t_base + mc->crossing.t;
            s = mc->crossing.state;
            zone += side;
            // The section may coincide with the switching plane just crossed.
            if (std::abs(s(0) - plane_x) <= 1e-13 * std::max(1.0, std::abs(plane_x)) &&
                zf.x_dot(s) * direction > 0.0 && t_now > 0.0)
                return std::make_pair(t_now, s);
            advanced = true;
            break;
        }
        if (!advanced) return std::nullopt;
        if (zone < 0 || zone >= spec.zone_count()) return std::nullopt;
    }
    return std::nullopt;
}

Trajectory integrate_smooth_reference(const Params& params, const State& s0, double horizon,
                                      double rtol, double stop_when_abs_x_exceeds) {
    params.validate();
    if (s0.size() != 3) throw std::invalid_argument("smooth reference: 3D state expected");
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    auto field = [&](double, const State& s) {
        State d(3);
        d(0) = -s(1) + s(0) * s(0);
        d(1) = e * (p1 * s(0) + p2 * s(2));
        d(2) = e * p3;
        return d;
    };

    Trajectory traj;
    const double step = horizon / 4096.0;
    std::function<bool(double, const State&)> stop;
    if (stop_when_abs_x_exceeds > 0.0)
        stop = [bound = stop_when_abs_x_exceeds](double, const State& s) {
            return std::abs(s(0)) > bound;
        };
    auto samples = rk45(field, s0, horizon, rtol, 1e-12 * rtol / 1e-10, step, stop);
    traj.termination = Termination::Horizon;
    for (auto& [ti, si] : samples) {
        traj.t.push_back(ti);
        traj.s.push_back(si);
        traj.sample_zone.push_back(0);
        if (stop_when_abs_x_exceeds > 0.0 && std::abs(si(0)) > stop_when_abs_x_exceeds) {
            traj.termination = Termination::Event;
            break;
        }
    }
    Segment seg;
    seg.zone = 0;
    seg.t_enter = 0.0;
    seg.t_exit = traj.t.back();
    seg.s_enter = s0;
    seg.s_exit = traj.s.back();
    traj.segments.push_back(seg);
    return traj;
}

}  // namespace pwl::hybrid
