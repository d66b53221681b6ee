#include "pwl/planar.hpp"

#include <algorithm>
#include <cmath>

namespace pwl::planar {

namespace {

// Critical-manifold ordinate at x for a planar spec: y = f(x) where
// x' = y - f(x), i.e. f(x) = -(M(0,0) x + c(0)).
double manifold_y(const SystemSpec& spec, double x) {
    const Zone& z = spec.zone(spec.zone_index_interior(x));
    return -(z.M(0, 0) * x + z.c(0));
}

struct ReturnResult {
    double y = 0.0;
    double period = 0.0;
    double x_min = 0.0, x_max = 0.0;
};

// One full turn of the return map on the section {x = a, x' > 0}, with the
// orbit's x-range tracked along the way.
std::optional<ReturnResult> return_map(const SystemSpec& spec, double a, double y,
                                       double horizon) {
    State s0(2);
    s0 << a, y;
    auto hit = hybrid::next_plane_crossing(spec, s0, a, +1, horizon);
    if (!hit) return std::nullopt;
    // Track the x-range by re-integrating the same stretch.
    hybrid::IntegrateOptions opts;
    opts.dense_step = hit->first / 512.0;
    auto traj = hybrid::integrate(spec, s0, hit->first, opts);
    ReturnResult r;
    r.y = hit->second(1);
    r.period = hit->first;
    r.x_min = r.x_max = a;
    for (const auto& si : traj.s) {
        r.x_min = std::min(r.x_min, si(0));
        r.x_max = std::max(r.x_max, si(0));
    }
    return r;
}

}  // namespace

std::optional<Cycle> find_cycle(const SystemSpec& spec, double a) {
    if (spec.dimension() != 2)
        throw std::invalid_argument("find_cycle: planar (2D) spec expected");
    const double fa = manifold_y(spec, a);
    const auto& zones = spec.zones();
    double span = 1.0;
    if (zones.size() >= 2) {
        const double b0 = zones.front().x_hi, b1 = zones.back().x_lo;
        span = std::max(1.0, std::abs(b1 - b0) + 1.0);
    }
    const double horizon = 400.0 / spec.eps();
    const double g_tol = 1e-10;

    // Scan the displacement g(y) = P(y) - y upward from the section base on a
    // geometric ladder, so both tiny and relaxation-sized cycles are resolved.
    const int n_scan = 80;
    double y_prev = 0.0, g_prev = 0.0;
    bool have_prev = false;
    double neutral_edge_y = std::numeric_limits<double>::quiet_NaN();
    double lo = 0.0, hi = 0.0, glo = 0.0, ghi = 0.0;
    bool bracket = false;
    for (int i = 1; i <= n_scan; ++i) {
        const double frac = static_cast<double>(i) / n_scan;
        const double y = fa + 3.0 * span * std::pow(10.0, -4.0 * (1.0 - frac));
        auto r = return_map(spec, a, y, horizon);
        if (!r) {
            have_prev = false;
            continue;
        }
        const double g = r->y - y;
        if (std::abs(g) <= g_tol) neutral_edge_y = y;
        if (have_prev && ((g_prev > g_tol && g < -g_tol) || (g_prev < -g_tol && g > g_tol))) {
            lo = y_prev;
            hi = y;
            glo = g_prev;
            ghi = g;
            bracket = true;
            break;
        }
        if (have_prev && std::abs(g_prev) <= g_tol && g < -g_tol && bracket == false) {
            // Contraction just outside a neutral family: the cycle is the
            // family edge. Keep scanning for a proper sign change first.
        }
        y_prev = y;
        g_prev = g;
        have_prev = true;
    }

    double y_star = std::numeric_limits<double>::quiet_NaN();
    bool neutral = false;
    if (bracket) {
        // Secant refinement inside the bracket, bisection fallback.
        double x0 = lo, x1 = hi, f0 = glo, f1 = ghi;
        double y_best = std::abs(glo) < std::abs(ghi) ? lo : hi;
        double g_best = std::min(std::abs(glo), std::abs(ghi));
        for (int it = 0; it < 200; ++it) {
            if (std::abs(f1 - f0) < 1e-300) break;
            double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if (!(x2 > std::min(lo, hi) && x2 < std::max(lo, hi))) x2 = 0.5 * (lo + hi);
            auto r2 = return_map(spec, a, x2, horizon);
            if (!r2) break;
            const double f2 = r2->y - x2;
            if (std::abs(f2) < g_best) {
                g_best = std::abs(f2);
                y_best = x2;
            }
            if ((f2 < 0.0) == (glo < 0.0)) {
                lo = x2;
                glo = f2;
            } else {
                hi = x2;
                ghi = f2;
            }
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f2;
            if (std::abs(f2) <= g_tol || std::abs(hi - lo) < 1e-14 * std::max(1.0, std::abs(hi)))
                break;
        }
        y_star = y_best;
    } else if (std::isfinite(neutral_edge_y)) {
        y_star = neutral_edge_y;
        neutral = true;
    } else {
        return std::nullopt;
    }

    auto r = return_map(spec, a, y_star, horizon);
    if (!r) return std::nullopt;
    Cycle cyc;
    cyc.a = a;
    cyc.section_x = a;
    cyc.y_fixed = y_star;
    cyc.amplitude = r->x_max - r->x_min;
    cyc.period = r->period;
    cyc.displacement_residual = std::abs(r->y - y_star);
    cyc.neutral_edge = neutral;
    State s0(2);
    s0 << a, y_star;
    cyc.orbit = hybrid::integrate(spec, s0, r->period);
    return cyc;
}

ExplosionScan explosion_scan(const std::function<SystemSpec(double)>& build_at_a, double a_min,
                             double a_max, int n, double refine_width) {
    if (n < 2) n = 2;
    ExplosionScan scan;
    for (int i = 0; i < n; ++i) {
        const double a = a_min + (a_max - a_min) * i / (n - 1);
        scan.a.push_back(a);
        auto cyc = find_cycle(build_at_a(a), a);
        scan.amplitude.push_back(cyc ? cyc->amplitude : std::numeric_limits<double>::quiet_NaN());
        scan.period.push_back(cyc ? cyc->period : std::numeric_limits<double>::quiet_NaN());
    }
    for (double amp : scan.amplitude)
        if (std::isfinite(amp)) scan.relaxation_amplitude = std::max(scan.relaxation_amplitude, amp);
    const double jump = 0.5 * scan.relaxation_amplitude;

    double lo = 0.0, hi = 0.0, amp_lo = 0.0, amp_hi = 0.0;
    for (std::size_t i = 1; i < scan.a.size(); ++i) {
        if (!std::isfinite(scan.amplitude[i - 1]) || !std::isfinite(scan.amplitude[i])) continue;
        if (std::abs(scan.amplitude[i] - scan.amplitude[i - 1]) > jump) {
            lo = scan.a[i - 1];
            hi = scan.a[i];
            amp_lo = scan.amplitude[i - 1];
            amp_hi = scan.amplitude[i];
            scan.transition_found = true;
            break;
        }
    }
    if (!scan.transition_found) return scan;

    auto amp_at = [&](double a) {
        auto cyc = find_cycle(build_at_a(a), a);
        return cyc ? cyc->amplitude : std::numeric_limits<double>::quiet_NaN();
    };
    while (hi - lo > refine_width) {
        const double mid = 0.5 * (lo + hi);
        const double am = amp_at(mid);
        if (!std::isfinite(am)) break;
        if (std::abs(am - amp_lo) <= std::abs(am - amp_hi)) {
            lo = mid;
            amp_lo = am;
        } else {
            hi = mid;
            amp_hi = am;
        }
        if (std::abs(amp_hi - amp_lo) < jump) break;  // intrinsic width reached
    }
    scan.a_lo = lo;
    scan.a_hi = hi;
    return scan;
}

ExplosionScan explosion_scan(const model::Arima& base, double eps, double a_min, double a_max,
                             int n, double refine_width) {
    return explosion_scan(
        [&](double a) {
            model::Arima k = base;
            k.a = a;
            return model::build_planar(k, eps);
        },
        a_min, a_max, n, refine_width);
}

ExplosionScan explosion_scan(const model::QuasiCanard& base, double eps, double a_min,
                             double a_max, int n, double refine_width) {
    return explosion_scan(
        [&](double a) {
            model::QuasiCanard k = base;
            k.a = a;
            return model::build_planar(k, eps);
        },
        a_min, a_max, n, refine_width);
}

namespace {

// Half the horizontal separation of the two outer branches, measured at the
// mid-height of the curve's breakpoint values.
double default_threshold(const PwlCurve& curve) {
    const auto& b = curve.breakpoints();
    double y_mid = 0.0;
    for (double bx : b) y_mid += curve.eval(bx);
    y_mid /= static_cast<double>(b.size());
    const double sl = curve.slopes().front(), ql = curve.intercepts().front();
    const double sr = curve.slopes().back(), qr = curve.intercepts().back();
    if (sl == 0.0 || sr == 0.0) return 0.5 * (b.back() - b.front());
    const double xl = (y_mid - ql) / sl, xr = (y_mid - qr) / sr;
    return 0.5 * std::abs(xr - xl);
}

}  // namespace

TransientMmo transient_mmo(const SystemSpec& spec, const PwlCurve& curve, const State& s0,
                           double horizon, double theta) {
    if (spec.dimension() != 3)
        throw std::invalid_argument("transient_mmo: drifted (3D) spec expected");
    TransientMmo out;
    out.threshold = theta > 0.0 ? theta : default_threshold(curve);
    out.trajectory = hybrid::integrate(spec, s0, horizon);

    // Split at x-local-minima of the dense samples and classify each arc.
    const auto& t = out.trajectory.t;
    const auto& s = out.trajectory.s;
    if (s.size() < 3) return out;
    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < s.size(); ++i)
        if (s[i](0) <= s[i - 1](0) && s[i](0) < s[i + 1](0)) minima.push_back(i);
    if (minima.size() < 2) return out;
    for (std::size_t m = 0; m + 1 < minima.size(); ++m) {
        OscillationEvent ev;
        ev.t_start = t[minima[m]];
        ev.t_end = t[minima[m + 1]];
        ev.x_min = s[minima[m]](0);
        ev.x_max = ev.x_min;
        for (std::size_t i = minima[m]; i <= minima[m + 1]; ++i) {
            ev.x_min = std::min(ev.x_min, s[i](0));
            ev.x_max = std::max(ev.x_max, s[i](0));
        }
        ev.lao = ev.range() >= out.threshold;
        out.events.push_back(ev);
    }
    return out;
}

}  // namespace pwl::planar
