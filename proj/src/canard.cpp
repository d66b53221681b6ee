#include "pwl/canard.hpp"

#include "pwl/hybrid.hpp"
#include "pwl/model.hpp"
#include "pwl/parallel.hpp"
#include "pwl/zoneflow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pwl::canard {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSystemTol = 1e-12;
constexpr double kReversibilityTol = 1e-8;
constexpr double kResidenceTol = 1e-10;
}  // namespace

RootScaffold::RootScaffold(const Params& params) : p_(params) {
    const double e = p_.eps, p1 = p_.p1, p2 = p_.p2, p3 = p_.p3, d = p_.delta;
    const double disc = 1.0 - 4.0 * e * p1;
    if (!(disc > 0.0)) throw std::invalid_argument("RootScaffold: 1 - 4 eps p1 must be > 0");
    lambda_A_ = -(1.0 + std::sqrt(disc)) / 2.0;
    const double L = std::abs(lambda_A_);
    gain_ = 2.0 * L * std::sqrt(e * std::abs(p1));

    if (p2 == 0.0) throw std::invalid_argument("RootScaffold: p2 = 0 (FSN-I)");
    if (p3 == 0.0) throw std::invalid_argument("RootScaffold: p3 = 0 (FSN-II)");
    z1_ = d * p1 / p2;
    z2_ = d * p1 / p2 + p3 / p1;

    if (p1 > 0.0) {
        // Poles solve sqrt(eps) m(z) = +- |lambda_A| sqrt(p1) n(z), both linear in z.
        const double se = std::sqrt(e), sp = std::sqrt(p1);
        auto solve = [&](double sign) {
            const double coef = p2 * (se * p1 - sign * L * sp);
            const double rhs = se * (d * p1 * p1 + p2 * p3) - sign * L * sp * d * p1;
            return rhs / coef;
        };
        const double pa = solve(+1.0), pb = solve(-1.0);
        pole1_ = std::abs(pa) < std::abs(pb) ? pa : pb;
        pole2_ = std::abs(pa) < std::abs(pb) ? pb : pa;
    } else {
        pole1_ = pole2_ = std::numeric_limits<double>::quiet_NaN();
    }
}

double RootScaffold::r(int j) const {
    return -j * (p_.p3 * std::sqrt(p_.eps) / std::sqrt(p_.p1)) * (kPi / 2.0);
}

double RootScaffold::rt(int j) const {
    return -((2.0 * j + 1.0) / 2.0) * (p_.p3 * std::sqrt(p_.eps) / std::sqrt(p_.p1)) *
           (kPi / 2.0);
}

double RootScaffold::cylinder_amplitude(int k) const {
    return p_.delta *
           (1.0 + (p_.p2 * p_.p3 / (p_.p1 * std::sqrt(p_.p1))) * (k + 0.5));
}

double RootScaffold::theta(double z) const {
    return -2.0 * std::sqrt(std::abs(p_.p1)) * z / (p_.p3 * std::sqrt(p_.eps));
}

double RootScaffold::numerator(double z) const {
    const double m = p_.p1 * p_.p2 * z - p_.delta * p_.p1 * p_.p1 - p_.p2 * p_.p3;
    const double n = p_.p2 * z - p_.delta * p_.p1;
    return m * n;
}

double RootScaffold::denominator(double z) const {
    const double m = p_.p1 * p_.p2 * z - p_.delta * p_.p1 * p_.p1 - p_.p2 * p_.p3;
    const double n = p_.p2 * z - p_.delta * p_.p1;
    return p_.eps * m * m - lambda_A_ * lambda_A_ * p_.p1 * n * n;
}

double RootScaffold::q(double z) const {
    const double den = denominator(z);
    const double scale = std::max({1.0, std::abs(pole1_), std::abs(z)});
    if (p_.p1 > 0.0 &&
        (std::abs(z - pole1_) < 1e-12 * scale || std::abs(z - pole2_) < 1e-12 * scale))
        throw std::domain_error("q_rational: z is within 1e-12 of a pole");
    return numerator(z) / den;
}

double RootScaffold::cos_rhs(double z) const {
    const double m = p_.p1 * p_.p2 * z - p_.delta * p_.p1 * p_.p1 - p_.p2 * p_.p3;
    const double n = p_.p2 * z - p_.delta * p_.p1;
    const double norm = p_.eps * m * m + lambda_A_ * lambda_A_ * p_.p1 * n * n;
    return (p_.eps * m * m - lambda_A_ * lambda_A_ * p_.p1 * n * n) / norm;
}

double RootScaffold::sin_rhs(double z) const {
    const double m = p_.p1 * p_.p2 * z - p_.delta * p_.p1 * p_.p1 - p_.p2 * p_.p3;
    const double n = p_.p2 * z - p_.delta * p_.p1;
    const double norm = p_.eps * m * m + lambda_A_ * lambda_A_ * p_.p1 * n * n;
    return -2.0 * lambda_A_ * std::sqrt(p_.eps * p_.p1) * m * n / norm;
}

double RootScaffold::w(double z) const {
    const double th = theta(z);
    return std::sin(th) * denominator(z) - gain_ * numerator(z) * std::cos(th);
}

double RootScaffold::w_prime(double z) const {
    const double th = theta(z);
    const double thp = -2.0 * std::sqrt(std::abs(p_.p1)) / (p_.p3 * std::sqrt(p_.eps));
    const double m = p_.p1 * p_.p2 * z - p_.delta * p_.p1 * p_.p1 - p_.p2 * p_.p3;
    const double n = p_.p2 * z - p_.delta * p_.p1;
    const double mp = p_.p1 * p_.p2, np = p_.p2;
    const double Np = mp * n + m * np;
    const double Dp = 2.0 * p_.eps * m * mp - 2.0 * lambda_A_ * lambda_A_ * p_.p1 * n * np;
    return thp * std::cos(th) * denominator(z) + std::sin(th) * Dp -
           gain_ * (Np * std::cos(th) - numerator(z) * thp * std::sin(th));
}

namespace {

struct ValidationOutcome {
    bool exited = false;
    double reversibility_error = 0.0;
    double flight_time_error = 0.0;
    double residence_sup_x = 0.0;
    long winding = 0;
    double t_exit = 0.0;
};

ValidationOutcome validate_by_flowing(const Params& params, const State& entry,
                                      double t_closed_form) {
    ValidationOutcome out;
    const auto spec = model::build_minimal_3d(params);
    ZoneFlow central(spec.zone(1));

    const double horizon = 1.5 * t_closed_form + 20.0 / params.omega();
    auto crossing = central.crossing_time(entry, params.delta, horizon);
    if (!crossing) return out;
    out.exited = true;
    out.t_exit = crossing->t;
    out.flight_time_error = std::abs(crossing->t - t_closed_form) / t_closed_form;

    State mirrored(3);
    mirrored << params.delta, entry(1), -entry(2);
    out.reversibility_error = (crossing->state - mirrored).norm();

    double sup_x = params.delta;  // the transit touches the planes at both ends
    for (double te : central.x_extrema_times(entry, crossing->t))
        sup_x = std::max(sup_x, std::abs(central.flow(entry, te)(0)));
    out.residence_sup_x = sup_x;

    // Winding measured on the integrated transit, 32 samples per rotation.
    const double step = (2.0 * kPi / params.omega()) / 32.0;
    const int nsamp = std::max(4, static_cast<int>(std::ceil(crossing->t / step)));
    std::vector<State> path;
    path.reserve(static_cast<std::size_t>(nsamp) + 1);
    for (int i = 0; i <= nsamp; ++i) path.push_back(central.flow(entry, i * crossing->t / nsamp));
    out.winding = hybrid::winding_of_path(path, params).turns;
    return out;
}

std::vector<double> scan_roots(const RootScaffold& sc, double z_lo, double z_hi) {
    // Subdivide at every tan zero/pole and Q-pole inside the window, then do a
    // fixed-resolution sign scan of the pole-free W inside each cell.
    std::vector<double> grid{z_lo, z_hi};
    for (int j = 0;; ++j) {
        const double rj = sc.r(j), rtj = sc.rt(j);
        if (rj > z_lo && rj < z_hi) grid.push_back(rj);
        if (rtj > z_lo && rtj < z_hi) grid.push_back(rtj);
        if (std::min(rj, rtj) < z_lo) break;
        if (j > 100000) break;
    }
    if (std::isfinite(sc.pole1()) && sc.pole1() > z_lo && sc.pole1() < z_hi)
        grid.push_back(sc.pole1());
    if (std::isfinite(sc.pole2()) && sc.pole2() > z_lo && sc.pole2() < z_hi)
        grid.push_back(sc.pole2());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<std::vector<double>> per_cell(grid.size() > 0 ? grid.size() - 1 : 0);
    parallel_for(per_cell.size(), [&](std::size_t i) {
        const double a = grid[i], b = grid[i + 1];
        const int n = 40;
        double zp = a, fp = sc.w(zp);
        for (int s = 1; s <= n; ++s) {
            const double zc = a + (b - a) * s / n;
            const double fc = sc.w(zc);
            if ((fp < 0.0 && fc >= 0.0) || (fp > 0.0 && fc <= 0.0)) {
                double lo = zp, hi = zc, flo = fp;
                for (int it = 0; it < 200 && (hi - lo) > 1e-16 * std::max(1.0, std::abs(hi));
                     ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = sc.w(mid);
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                double root = 0.5 * (lo + hi);
                for (int it = 0; it < 4; ++it) {  // Newton polish from the bisection result
                    const double wv = sc.w(root), wp = sc.w_prime(root);
                    if (wp == 0.0) break;
                    const double next = root - wv / wp;
                    if (next <= lo || next >= hi) break;
                    root = next;
                }
                per_cell[i].push_back(root);
            }
            zp = zc;
            fp = fc;
        }
    });

    std::vector<double> roots;
    for (const auto& cell : per_cell) roots.insert(roots.end(), cell.begin(), cell.end());
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                                return std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a));
                            }),
                roots.end());
    return roots;
}

CanardSearch solve_normalized(const Params& params) {
    // Pre: p3 > 0. Handles p1 of either sign.
    CanardSearch out;
    const double p1 = params.p1, p2 = params.p2, p3 = params.p3, e = params.eps;

    if (p1 < 0.0) {
        if (p2 < 0.0) {
            out.warnings.push_back(
                "p1 < 0, p2 < 0: no admissible boundary segment, no maximal canards");
            return out;
        }
        // tanh branch (p1 < 0, p2 > 0): scan the residual for completeness.
        RootScaffold sc(params);
        const auto sm = geometry::slow_manifolds(params);
        const double z_hi = sm.z_star_A;
        const double z_lo = z_hi - 20.0 * std::max(params.delta, std::abs(z_hi));
        out.window_lo = z_lo;
        out.window_hi = z_hi;
        auto tanh_res = [&](double z) {
            const double th = -2.0 * std::sqrt(-p1) * z / (p3 * std::sqrt(e));
            return std::tanh(th) * sc.gain() * sc.numerator(z) - sc.denominator(z);
        };
        double zp = z_lo, fp = tanh_res(zp);
        for (int i = 1; i <= 4000; ++i) {
            const double zc = z_lo + (z_hi - z_lo) * i / 4000.0;
            const double fc = tanh_res(zc);
            if ((fp < 0.0) != (fc < 0.0)) {
                CanardCandidate cand;
                cand.z = 0.5 * (zp + zc);
                cand.note = "unexpected tanh-equation sign change";
                out.candidates.push_back(cand);
            }
            zp = zc;
            fp = fc;
        }
        if (!out.candidates.empty())
            out.warnings.push_back("tanh scan found sign changes; inspect candidates");
        return out;
    }

    RootScaffold sc(params);
    const auto sm = geometry::slow_manifolds(params);
    const double mu = geometry::max_winding(params);

    // Admissible entry window on {x = -delta}: orbits must move inward (y < 0
    // side of L^A), which bounds z below by z*_A when p2 < 0 and only by the
    // scan depth when p2 > 0 (deep roots fail residence anyway).
    const int j_max = std::min(1000, 2 * static_cast<int>(std::ceil(mu)) + 4);
    double z_lo = sc.rt(j_max);
    if (p2 < 0.0) z_lo = std::max(z_lo, sm.z_star_A);
    const double z_hi = -1e-300;
    out.window_lo = z_lo;
    out.window_hi = 0.0;

    if (std::abs(mu - std::round(mu)) < 1e-9)
        out.warnings.push_back("mu is at an integer boundary; the k = floor(mu) canard "
                               "may not exist and is reported only if validated");

    const auto roots = scan_roots(sc, z_lo, z_hi);
    std::vector<CanardCandidate> cands(roots.size());
    std::vector<std::optional<CanardSolution>> sols(roots.size());

    parallel_for(roots.size(), [&](std::size_t i) {
        const double z = roots[i];
        CanardCandidate cand;
        cand.z = z;
        cand.theta = sc.theta(z);
        cand.k = static_cast<int>(std::floor(cand.theta / (2.0 * kPi) + 1e-12));
        const double cres = std::abs(std::cos(cand.theta) - sc.cos_rhs(z));
        const double sres = std::abs(std::sin(cand.theta) - sc.sin_rhs(z));
        cand.system_residual = std::max(cres, sres);
        cand.system_ok = cand.system_residual <= kSystemTol;
        if (!cand.system_ok) {
            cand.note = "tan-equation root failing the (cos, sin) system";
            cands[i] = cand;
            return;
        }
        CanardSolution sol;
        sol.k = cand.k;
        sol.z = z;
        sol.theta = cand.theta;
        sol.root_residual = cand.system_residual;
        sol.y = sm.line_A_rhs - sm.line_A_bz * z;
        sol.entry = State(3);
        sol.entry << -params.delta, sol.y, z;
        sol.flight_time = -2.0 * z / (e * p3);
        const double frac = cand.theta - 2.0 * kPi * std::floor(cand.theta / (2.0 * kPi));
        sol.parity = frac < 1.5 * kPi ? "odd" : "even";

        const auto v = validate_by_flowing(params, sol.entry, sol.flight_time);
        if (!v.exited) {
            cand.note = "no exit through x = +delta within horizon";
            cands[i] = cand;
            return;
        }
        sol.reversibility_error = v.reversibility_error;
        sol.flight_time_error = v.flight_time_error;
        sol.residence_sup_x = v.residence_sup_x;
        sol.winding = v.winding;
        sol.reversible = v.reversibility_error <= kReversibilityTol;
        sol.resident = v.residence_sup_x <= params.delta * (1.0 + kResidenceTol);
        sol.winding_ok = v.winding == sol.k;
        cand.validated = sol.reversible && sol.resident && sol.winding_ok &&
                         sol.flight_time_error <= 1e-8;
        if (!cand.validated) cand.note = "failed flow validation";
        cands[i] = cand;
        if (cand.validated) sols[i] = std::move(sol);
    });

    out.candidates = std::move(cands);
    for (auto& s : sols)
        if (s) out.canards.push_back(std::move(*s));
    std::sort(out.canards.begin(), out.canards.end(),
              [](const CanardSolution& a, const CanardSolution& b) {
                  return a.k != b.k ? a.k < b.k : a.z > b.z;
              });

    for (std::size_t i = 1; i < out.canards.size(); ++i) {
        const double ta = out.canards[i - 1].flight_time, tb = out.canards[i].flight_time;
        if (std::abs(ta - tb) <= 1e-10 * std::max(ta, tb)) {
            std::ostringstream msg;
            msg << "maximal canards k=" << out.canards[i - 1].k << " and k="
                << out.canards[i].k << " have equal flight times within 1e-10";
            out.warnings.push_back(msg.str());
        }
        if (out.canards[i - 1].k == out.canards[i].k)
            out.warnings.push_back("two validated canards share winding k=" +
                                   std::to_string(out.canards[i].k) +
                                   " (relaxed-uniqueness case)");
    }
    return out;
}

}  // namespace

CanardSearch maximal_canards(const Params& params) {
    params.validate();
    if (params.p2 == 0.0 || params.p3 == 0.0)
        throw std::invalid_argument(
            "maximal_canards: FSN parameters (p2 p3 = 0); use the singular module");
    if (params.p3 > 0.0) return solve_normalized(params);

    // p3 < 0: solve the (p2, p3) -> (-p2, -p3) system and map z -> -z back.
    Params flipped(params.p1, -params.p2, -params.p3, params.eps, params.delta);
    CanardSearch res = solve_normalized(flipped);
    for (auto& c : res.canards) {
        c.z = -c.z;
        c.entry(2) = -c.entry(2);
    }
    for (auto& c : res.candidates) c.z = -c.z;
    std::swap(res.window_lo, res.window_hi);
    res.window_lo = -res.window_lo;
    res.window_hi = -res.window_hi;
    return res;
}

LeadingCoordinates canard_coordinates_leading(const Params& params, int k) {
    params.validate();
    if (!(params.p1 > 0.0))
        throw std::invalid_argument("canard_coordinates_leading: requires p1 > 0");
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    LeadingCoordinates lc;
    lc.y = -((k + 0.5) * p2 * p3 / std::sqrt(p1) + p1) * kPi * std::pow(e, 1.5) -
           p2 * p3 * e * e;
    lc.z = -(k + 0.5) * (p3 / std::sqrt(p1)) * kPi * std::sqrt(e);
    return lc;
}

State SelectedCanard::eval(double t) const {
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    const double w = std::sqrt(e * p1);
    const double C = p2 * p3 / (p1 * p1);
    State s(3);
    s(0) = C * std::cos(w * t) - w * C * (w * t - (k + 0.5) * kPi);
    s(1) = w * C * std::sin(w * t) + e * p2 * p3 / p1;
    s(2) = e * p3 * t + entry(2);
    return s;
}

SelectedCanard selected_canard(double p1, double p2, double p3, double eps, int k) {
    if (!(p1 > 0.0 && p2 < 0.0 && p3 > 0.0))
        throw std::invalid_argument("selected_canard: requires p1 > 0, p2 < 0, p3 > 0");
    if (k < 0) throw std::invalid_argument("selected_canard: k must be >= 0");
    const double mu = geometry::max_winding(p1, p2, p3);
    if (k > static_cast<int>(std::floor(mu)))
        throw std::invalid_argument("selected_canard: k exceeds floor(mu)");
    SelectedCanard sel;
    sel.k = k;
    sel.delta_k = -(p2 * p3 / (p1 * p1)) * ((k + 0.5) * kPi * std::sqrt(eps * p1) + 1.0);
    sel.params = Params(p1, p2, p3, eps, sel.delta_k);
    sel.entry = State(3);
    sel.entry << -sel.delta_k, eps * p2 * p3 / p1,
        -(k + 0.5) * kPi * (p3 / p1) * std::sqrt(eps * p1);
    sel.flight_time = (2.0 * k + 1.0) * kPi / std::sqrt(eps * p1);
    return sel;
}

double weak_canard_gap(const Params& params) {
    params.validate();
    if (!(params.p1 > 0.0)) throw std::invalid_argument("weak_canard_gap: requires p1 > 0");
    const auto sm = geometry::slow_manifolds(params);
    const auto ax = geometry::rotation_axis(params);
    const auto z_end = ax.z_at_x(params.delta);
    if (!z_end) return 0.0;  // FSN-I: axis never reaches the plane
    const double y0 = ax.y_level, z0 = *z_end;
    return std::abs(y0 + sm.line_R_bz * z0 - sm.line_R_rhs) /
           std::sqrt(1.0 + sm.line_R_bz * sm.line_R_bz);
}

QReport q_rational(const Params& params, double z) {
    RootScaffold sc(params);
    QReport rep;
    rep.value = sc.q(z);
    rep.z1 = sc.z1();
    rep.z2 = sc.z2();
    rep.pole1 = sc.pole1();
    rep.pole2 = sc.pole2();
    const double disc = std::sqrt(1.0 - 4.0 * params.eps * params.p1);
    const double lA = -(1.0 + disc) / 2.0;
    rep.asymptote = 1.0 / (params.eps * params.p1 - lA * lA);
    return rep;
}

}  // namespace pwl::canard
