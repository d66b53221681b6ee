#include "pwl/singular.hpp"

#include "pwl/hybrid.hpp"
#include "pwl/zoneflow.hpp"

#include <cmath>

namespace pwl::singular {

namespace {

Zone reduced_zone(const Params& params, int zone_sign) {
    Zone z;
    z.M = Matrix::Zero(2, 2);
    z.M(0, 0) = zone_sign * params.p1;
    z.M(0, 1) = zone_sign * params.p2;
    z.c = State::Zero(2);
    z.c(1) = params.p3;
    z.x_lo = zone_sign > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    z.x_hi = zone_sign > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return z;
}

State reduced_field(const Params& params, int zone_sign, const State& xz) {
    State d(2);
    d(0) = zone_sign * (params.p1 * xz(0) + params.p2 * xz(1));
    d(1) = params.p3;
    return d;
}

}  // namespace

State reduced_flow(const Params& params, int zone_sign, const State& xz, double t) {
    params.validate();
    if (xz.size() != 2) throw std::invalid_argument("reduced_flow: state is (x, z)");
    if (zone_sign == 0) {
        const double constraint = params.p1 * xz(0) + params.p2 * xz(1);
        const double scale = std::max({1.0, std::abs(params.p1 * xz(0)), std::abs(params.p2 * xz(1))});
        if (std::abs(constraint) > 1e-12 * scale)
            throw std::invalid_argument(
                "reduced_flow: central-zone state must satisfy p1 x + p2 z = 0");
        if (params.p1 == 0.0)
            throw std::invalid_argument("reduced_flow: central constraint needs p1 != 0");
        State out(2);
        out(1) = xz(1) + params.p3 * t;
        out(0) = -params.p2 * out(1) / params.p1;
        return out;
    }
    if (zone_sign != 1 && zone_sign != -1)
        throw std::invalid_argument("reduced_flow: zone_sign must be -1, 0 or +1");
    ZoneFlow zf(reduced_zone(params, zone_sign));
    return zf.flow(xz, t);
}

State smooth_reduced_flow(const Params& params, const State& xz, double t) {
    params.validate();
    if (xz.size() != 2) throw std::invalid_argument("smooth_reduced_flow: state is (x, z)");
    auto field = [&](double, const State& s) {
        State d(2);
        const double sg = s(0) > 0.0 ? 1.0 : (s(0) < 0.0 ? -1.0 : 0.0);
        d(0) = sg * (params.p1 * s(0) + params.p2 * s(1));
        d(1) = 2.0 * params.p3 * std::abs(s(0));
        return d;
    };
    if (t == 0.0) return xz;
    const double dir = t > 0.0 ? 1.0 : -1.0;
    auto rev = [&](double tau, const State& s) { return State(dir * field(tau, s)); };
    auto samples = hybrid::rk45(rev, xz, std::abs(t), 1e-10, 1e-13, 0.0);
    return samples.back().second;
}

CanardDirections singular_canard_directions(const Params& params) {
    params.validate();
    if (params.p1 == 0.0)
        throw std::invalid_argument("singular_canard_directions: requires p1 != 0");
    CanardDirections d;
    d.weak_coef_x = params.p1;
    d.weak_coef_z = params.p2;
    d.strong_dz = 0.5 * params.p3 / std::sqrt(std::abs(params.p1));
    d.strong_dx = 1.0;
    if (params.p2 == 0.0) d.weak_exists_as_canard = false;  // FSN-I: axis -> {x = 0}
    if (params.p3 == 0.0) {
        d.weak_exists_as_canard = false;  // FSN-II: line of equilibria instead
        d.degenerate = true;
    }
    return d;
}

const char* to_string(TangencyKind kind) {
    switch (kind) {
        case TangencyKind::VisibleVisible: return "visible-visible";
        case TangencyKind::InvisibleInvisible: return "invisible-invisible";
        case TangencyKind::Degenerate: return "degenerate";
    }
    return "?";
}

TangencyKind tangency_classification(const Params& params) {
    params.validate();
    const double pp = params.p2 * params.p3;
    // Curvature of x(t) at a tangency of the outer reduced flow with a vertical
    // line is sgn(x) p2 p3: positive keeps the orbit in its zone (visible).
    if (pp > 0.0) return TangencyKind::VisibleVisible;
    if (pp < 0.0) return TangencyKind::InvisibleInvisible;
    return TangencyKind::Degenerate;
}

namespace {

// Orbit of the outer reduced flow through `start`, traced in `time_dir` until
// it leaves the window or enters the strip |x| < strip (0 disables the strip).
Polyline trace_orbit(const Params& params, int zone_sign, const State& start, double time_dir,
                     const Window& win, double strip, const char* role) {
    Polyline line;
    line.zone = zone_sign;
    line.role = role;
    ZoneFlow zf(reduced_zone(params, zone_sign));

    const double span_z = win.z_max - win.z_min;
    const double speed_z = std::max(std::abs(params.p3), 1e-6);
    const double rate_x = std::max(std::abs(params.p1), 1e-6);
    const double dt = std::min(span_z / speed_z / 400.0, 0.25 / rate_x) * time_dir;

    State s = start;
    line.pts.emplace_back(s(1), s(0));
    for (int i = 0; i < 20000; ++i) {
        State nxt = zf.flow(s, dt);
        const bool out = !win.contains(nxt(1), nxt(0)) ||
                         (strip > 0.0 && std::abs(nxt(0)) < strip &&
                          std::abs(s(0)) >= strip);
        if (out) {
            // Bisect onto the first boundary for a clean endpoint.
            double lo = 0.0, hi = dt;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                State sm = zf.flow(s, mid);
                const bool bad = !win.contains(sm(1), sm(0)) ||
                                 (strip > 0.0 && std::abs(sm(0)) < strip);
                (bad ? hi : lo) = mid;
            }
            State edge = zf.flow(s, 0.5 * (lo + hi));
            line.pts.emplace_back(edge(1), edge(0));
            return line;
        }
        s = nxt;
        line.pts.emplace_back(s(1), s(0));
    }
    return line;
}

Polyline segment(double z0, double x0, double z1, double x1, int zone, const char* role) {
    Polyline p;
    p.zone = zone;
    p.role = role;
    p.pts.emplace_back(z0, x0);
    p.pts.emplace_back(z1, x1);
    return p;
}

bool endpoints_touch(const Polyline& a, const Polyline& b, double tol) {
    if (a.pts.empty() || b.pts.empty()) return false;
    for (const auto& pa : {a.pts.front(), a.pts.back()})
        for (const auto& pb : {b.pts.front(), b.pts.back()})
            if ((pa - pb).norm() <= tol) return true;
    return false;
}

}  // namespace

SingularPortrait singular_portrait(const Params& params, const Window& window, bool opened,
                                   double delta_tilde, int grid_n) {
    params.validate();
    if (opened && !(delta_tilde > 0.0))
        throw std::invalid_argument("singular_portrait: opened needs delta_tilde > 0");
    if (!(window.z_max > window.z_min && window.x_max > window.x_min))
        throw std::invalid_argument("singular_portrait: empty window");
    const double p1 = params.p1, p2 = params.p2, p3 = params.p3;
    const double dt_ = opened ? delta_tilde : 0.0;

    SingularPortrait out;
    out.kind = geometry::classify(p1, p2, p3).kind;
    out.tangency = tangency_classification(params);
    out.opened = opened;
    out.delta_tilde = dt_;
    out.window = window;

    // Field samples per outer zone (the open strip carries no field).
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            FieldSample fs;
            fs.z = window.z_min + (window.z_max - window.z_min) * (i + 0.5) / grid_n;
            fs.x = window.x_min + (window.x_max - window.x_min) * (j + 0.5) / grid_n;
            if (std::abs(fs.x) <= dt_) continue;
            fs.zone = fs.x > 0.0 ? 1 : -1;
            State d = reduced_field(params, fs.zone, (State(2) << fs.x, fs.z).finished());
            fs.dx = d(0);
            fs.dz = d(1);
            out.field.push_back(fs);
        }
    }

    // Invariant half-lines p1 x + p2 z = -+ p2 p3 / p1 (hsl1 in x>0, hsl2 in x<0).
    if (p1 != 0.0 && p2 != 0.0) {
        auto clip_halfline = [&](double rhs, int zone, const char* role) {
            // x = (rhs - p2 z)/p1, restricted to the zone side and window.
            std::vector<Eigen::Vector2d> pts;
            const int n = 64;
            for (int i = 0; i <= n; ++i) {
                const double z = window.z_min + (window.z_max - window.z_min) * i / n;
                const double x = (rhs - p2 * z) / p1;
                if (!window.contains(z, x)) continue;
                if (zone > 0 && x < std::max(dt_, 0.0)) continue;
                if (zone < 0 && x > -std::max(dt_, 0.0)) continue;
                pts.emplace_back(z, x);
            }
            if (pts.size() >= 2) {
                Polyline p;
                p.zone = zone;
                p.role = role;
                p.pts = {pts.front(), pts.back()};
                out.half_lines.push_back(std::move(p));
            }
        };
        clip_halfline(-p2 * p3 / p1, +1, "hsl1");
        clip_halfline(+p2 * p3 / p1, -1, "hsl2");
    }

    // Tangency points on the x-nullcline.
    if (p2 != 0.0) {
        if (opened) {
            out.tangency_points.emplace_back(-p1 * dt_ / p2, dt_);
            out.tangency_points.emplace_back(p1 * dt_ / p2, -dt_);
        } else {
            out.tangency_points.emplace_back(0.0, 0.0);
        }
    }

    const auto dirs = singular_canard_directions(params);
    out.weak_exists_as_canard = dirs.weak_exists_as_canard;
    const double sdz = dirs.strong_dz;

    if (opened) {
        // Central pieces.
        if (p2 != 0.0 && p3 != 0.0)
            out.weak_pieces.push_back(
                segment(p1 * dt_ / p2, -dt_, -p1 * dt_ / p2, dt_, 0, "weak-central"));
        out.strong_pieces.push_back(segment(-sdz * dt_, -dt_, sdz * dt_, dt_, 0, "strong-central"));

        const Eigen::Vector2d Tm(p1 * dt_ / p2, -dt_);   // tangency on x = -dt
        const Eigen::Vector2d Tp(-p1 * dt_ / p2, dt_);   // tangency on x = +dt
        const Eigen::Vector2d Em(-sdz * dt_, -dt_);      // strong chord on x = -dt
        const Eigen::Vector2d Ep(sdz * dt_, dt_);        // strong chord on x = +dt

        auto as_state = [](const Eigen::Vector2d& zx) {
            return (State(2) << zx(1), zx(0)).finished();
        };

        switch (out.kind) {
            case geometry::SingularityKind::FoldedSaddle:
            case geometry::SingularityKind::NonRotating: {
                // Visible tangencies: each tangency orbit stays in its zone and
                // its two halves continue the weak (faux) and strong canards.
                out.weak_pieces.push_back(trace_orbit(params, +1, as_state(Tp), -1.0, window,
                                                      dt_, "weak-outer"));
                out.weak_pieces.push_back(trace_orbit(params, -1, as_state(Tm), +1.0, window,
                                                      dt_, "weak-outer"));
                out.strong_pieces.push_back(trace_orbit(params, -1, as_state(Tm), -1.0, window,
                                                        dt_, "strong-outer"));
                out.strong_pieces.push_back(trace_orbit(params, +1, as_state(Tp), +1.0, window,
                                                        dt_, "strong-outer"));
                break;
            }
            case geometry::SingularityKind::FoldedNode:
            case geometry::SingularityKind::FoldedFocus: {
                // Invisible tangencies: outer weak pieces are the separatrix
                // half-lines; the strong canard continues through its own
                // boundary points and bounds the funnel.
                for (const auto& hl : out.half_lines) {
                    Polyline p = hl;
                    p.role = "weak-outer";
                    out.weak_pieces.push_back(std::move(p));
                }
                out.strong_pieces.push_back(trace_orbit(params, -1, as_state(Em), -1.0, window,
                                                        dt_, "strong-outer"));
                out.strong_pieces.push_back(trace_orbit(params, +1, as_state(Ep), +1.0, window,
                                                        dt_, "strong-outer"));
                if (out.kind == geometry::SingularityKind::FoldedNode) {
                    Funnel f;
                    f.gate_z_lo = std::min(Tm(0), Em(0));
                    f.gate_z_hi = std::max(Tm(0), Em(0));
                    f.boundary.push_back(out.strong_pieces[1]);  // attracting-zone piece
                    f.boundary.push_back(
                        segment(f.gate_z_lo, -dt_, f.gate_z_hi, -dt_, -1, "fold-gate"));
                    out.funnel = std::move(f);
                }
                break;
            }
            case geometry::SingularityKind::FsnI: {
                // Tangency points at infinity; only the strong direction has a
                // continuation through its boundary hits.
                out.weak_pieces.clear();
                out.strong_pieces.push_back(trace_orbit(params, -1, as_state(Em), -1.0, window,
                                                        dt_, "strong-outer"));
                out.strong_pieces.push_back(trace_orbit(params, +1, as_state(Ep), +1.0, window,
                                                        dt_, "strong-outer"));
                break;
            }
            case geometry::SingularityKind::FsnII: {
                // z is conserved; the weak line becomes a line of equilibria.
                for (int zone : {-1, +1}) {
                    std::vector<Eigen::Vector2d> pts;
                    const int n = 64;
                    for (int i = 0; i <= n; ++i) {
                        const double z = window.z_min + (window.z_max - window.z_min) * i / n;
                        const double x = -p2 * z / p1;
                        if (!window.contains(z, x)) continue;
                        if (zone > 0 && x < dt_) continue;
                        if (zone < 0 && x > -dt_) continue;
                        pts.emplace_back(z, x);
                    }
                    if (pts.size() >= 2) {
                        Polyline p;
                        p.zone = zone;
                        p.role = "equilibria";
                        p.pts = {pts.front(), pts.back()};
                        out.equilibria_lines.push_back(std::move(p));
                    }
                }
                out.strong_pieces.push_back(trace_orbit(params, -1, as_state(Em), -1.0, window,
                                                        dt_, "strong-outer"));
                out.strong_pieces.push_back(trace_orbit(params, +1, as_state(Ep), +1.0, window,
                                                        dt_, "strong-outer"));
                break;
            }
            default: break;
        }
    }

    // Connectivity: every adjacent pair of pieces must share an endpoint.
    const double tol = 1e-9 * std::max({1.0, std::abs(window.z_max), std::abs(window.x_max)});
    auto connected = [&](const std::vector<Polyline>& pieces) {
        if (pieces.size() <= 1) return false;
        const Polyline* central = nullptr;
        for (const auto& p : pieces)
            if (p.zone == 0) central = &p;
        if (!central) return false;
        bool all = true;
        for (const auto& p : pieces) {
            if (p.zone == 0) continue;
            all = all && endpoints_touch(*central, p, tol);
        }
        return all;
    };
    out.weak_connected = connected(out.weak_pieces);
    out.strong_connected = connected(out.strong_pieces);
    return out;
}

bool funnel_reaches_strip(const Params& params, const Window& window, double delta_tilde,
                          const State& xz, double* z_hit) {
    params.validate();
    if (!(xz(0) < -delta_tilde))
        throw std::invalid_argument("funnel_reaches_strip: start in the attracting zone");
    ZoneFlow zf(reduced_zone(params, -1));
    const double span_z = window.z_max - window.z_min;
    const double dt = std::min(span_z / std::max(std::abs(params.p3), 1e-6) / 800.0,
                               0.1 / std::max(std::abs(params.p1), 1e-6));
    State s = xz;
    const auto dirs = singular_canard_directions(params);
    const double gate_lo = std::min(params.p1 * delta_tilde / params.p2,
                                    -dirs.strong_dz * delta_tilde);
    const double gate_hi = std::max(params.p1 * delta_tilde / params.p2,
                                    -dirs.strong_dz * delta_tilde);
    for (int i = 0; i < 200000; ++i) {
        State nxt = zf.flow(s, dt);
        if (nxt(0) >= -delta_tilde) {
            double lo = 0.0, hi = dt;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (zf.flow(s, mid)(0) >= -delta_tilde ? hi : lo) = mid;
            }
            const State edge = zf.flow(s, 0.5 * (lo + hi));
            if (z_hit) *z_hit = edge(1);
            return edge(1) > gate_lo && edge(1) < gate_hi;
        }
        if (!window.contains(nxt(1), nxt(0))) return false;
        s = nxt;
    }
    return false;
}

}  // namespace pwl::singular
