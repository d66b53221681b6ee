#include "pwl/mmo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwl::mmo {

CentralSpectrum central_spectrum(const Params& params, const ReturnParams& ret) {
    params.validate();
    const double e = params.eps;
    Matrix M = Matrix::Zero(3, 3);
    M(0, 1) = -1.0;
    M(1, 0) = e * params.p1;
    M(1, 2) = e * params.p2;
    M(2, 0) = e * ret.alpha1;
    M(2, 1) = e * ret.alpha2;
    M(2, 2) = e * ret.alpha3;
    Eigen::EigenSolver<Matrix> es(M);
    CentralSpectrum cs;
    for (int i = 0; i < 3; ++i) {
        cs.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        cs.max_abs_real = std::max(cs.max_abs_real, std::abs(es.eigenvalues()(i).real()));
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-14) cs.rotating_pair = true;
    }
    cs.constant_sao = cs.rotating_pair && cs.max_abs_real <= 1e-12;
    return cs;
}

std::optional<State> poincare_map(const SystemSpec& spec, const Section& section,
                                  const State& s, double horizon) {
    auto hit = hybrid::next_plane_crossing(spec, s, section.x, section.direction, horizon);
    if (!hit) return std::nullopt;
    return hit->second;
}

std::string MmoSignature::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) os << ' ';
        os << pairs[i].first << '^' << pairs[i].second;
    }
    return os.str();
}

MmoSignature signature(const hybrid::Trajectory& traj, double delta, double x0, double margin,
                       bool cyclic) {
    MmoSignature sig;
    sig.lao_threshold_x = x0;
    sig.sao_band = delta * (1.0 + margin);
    const auto& s = traj.s;

    struct Ev {
        double t;
        bool lao;
    };
    std::vector<Ev> events;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i](0) > x0 && s[i - 1](0) <= x0) events.push_back({traj.t[i], true});
        if (i + 1 < s.size() && s[i](0) >= s[i - 1](0) && s[i](0) > s[i + 1](0) &&
            std::abs(s[i](0)) <= sig.sao_band)
            events.push_back({traj.t[i], false});
    }
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });

    int L = 0, small = 0;
    bool open = false;
    for (const auto& ev : events) {
        if (ev.lao) {
            if (open && small > 0) {
                sig.pairs.emplace_back(L, small);
                L = 0;
                small = 0;
            }
            ++L;
            open = true;
        } else {
            ++small;
            open = true;
        }
    }
    if (open) sig.pairs.emplace_back(L, small);

    // Periodic data: leading SAOs belong to the LAO group that closes the loop.
    if (cyclic && sig.pairs.size() >= 2 && sig.pairs.front().first == 0 &&
        sig.pairs.back().second == 0) {
        sig.pairs.back().second = sig.pairs.front().second;
        sig.pairs.erase(sig.pairs.begin());
    }
    return sig;
}

SaoStats sao_amplitude_stats(const SystemSpec& spec, const hybrid::Trajectory& traj,
                             double delta) {
    SaoStats st;
    int central = -1;
    for (int i = 0; i < spec.zone_count(); ++i)
        if (spec.zone(i).x_lo == -delta && spec.zone(i).x_hi == delta) central = i;
    if (central < 0) return st;
    ZoneFlow zf(spec.zone(central));

    for (const auto& seg : traj.segments) {
        if (seg.zone != central) continue;
        const double len = seg.t_exit - seg.t_enter;
        // Alternating extrema of x along the segment, located exactly.
        std::vector<double> extrema;
        for (double te : zf.x_extrema_times(seg.s_enter, len))
            extrema.push_back(zf.flow(seg.s_enter, te)(0));
        for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
            if (extrema[i + 1] > extrema[i])  // min followed by max: one rotation
                st.amplitudes.push_back(extrema[i + 1] - extrema[i]);
        }
    }
    if (st.amplitudes.size() >= 2) {
        const double hi = *std::max_element(st.amplitudes.begin(), st.amplitudes.end());
        const double lo = *std::min_element(st.amplitudes.begin(), st.amplitudes.end());
        st.spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    }
    return st;
}

PeriodicOrbit find_periodic_mmo(const SystemSpec& spec, const Params& params,
                                const ReturnParams& ret, const State& seed,
                                const MmoOptions& opts) {
    const Section section{-params.delta, +1};
    const double horizon =
        opts.horizon_per_return > 0.0 ? opts.horizon_per_return : 400.0 / params.eps;

    // Burn-in toward the attractor, then anchor on the section.
    auto burn = hybrid::integrate(spec, seed, opts.burn_in);
    auto anchored = poincare_map(spec, section, burn.final_state(), horizon);
    if (!anchored)
        throw std::runtime_error("find_periodic_mmo: burn-in orbit never returned to the "
                                 "section (z may be monotone; zero return coupling cannot "
                                 "sustain periodic orbits)");
    State anchor = *anchored;

    auto P = [&](const State& on_section) -> State {
        auto nxt = poincare_map(spec, section, on_section, horizon);
        if (!nxt) {
            std::ostringstream os;
            os << "find_periodic_mmo: return map diverged at (y,z)=(" << on_section(1) << ", "
               << on_section(2) << ")";
            throw std::runtime_error(os.str());
        }
        return *nxt;
    };

    Eigen::Vector2d g_vec;
    auto eval_g = [&](const State& a) {
        const State pa = P(a);
        return Eigen::Vector2d(pa(1) - a(1), pa(2) - a(2));
    };

    g_vec = eval_g(anchor);
    double gnorm = g_vec.norm();
    Eigen::Matrix2d J;
    for (int it = 0; it < opts.max_newton && gnorm > opts.tol; ++it) {
        // Finite-difference Jacobian of the displacement on the section plane.
        for (int c = 0; c < 2; ++c) {
            const double h = 1e-7 * std::max(1.0, std::abs(anchor(c + 1)));
            State ap = anchor;
            ap(c + 1) += h;
            J.col(c) = (eval_g(ap) - g_vec) / h;
        }
        Eigen::Vector2d step = J.fullPivLu().solve(-g_vec);
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 8; ++back) {
            State trial = anchor;
            trial(1) += lambda * step(0);
            trial(2) += lambda * step(1);
            try {
                const Eigen::Vector2d gt = eval_g(trial);
                if (gt.norm() < gnorm || gt.norm() < opts.tol) {
                    anchor = trial;
                    g_vec = gt;
                    gnorm = gt.norm();
                    accepted = true;
                    break;
                }
            } catch (const std::runtime_error&) {
                // fall through to smaller step
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            std::ostringstream os;
            os << "find_periodic_mmo: damped Newton stalled at (y,z)=(" << anchor(1) << ", "
               << anchor(2) << "), residual " << gnorm;
            throw std::runtime_error(os.str());
        }
    }
    if (gnorm > opts.tol) {
        std::ostringstream os;
        os << "find_periodic_mmo: no convergence, last iterate (y,z)=(" << anchor(1) << ", "
           << anchor(2) << "), residual " << gnorm;
        throw std::runtime_error(os.str());
    }

    PeriodicOrbit orbit;
    orbit.anchor = anchor;
    orbit.residual = gnorm;
    auto hit = hybrid::next_plane_crossing(spec, anchor, section.x, section.direction, horizon);
    orbit.period = hit->first;
    orbit.orbit = hybrid::integrate(spec, anchor, orbit.period);

    for (int c = 0; c < 2; ++c) {
        const double h = 1e-7 * std::max(1.0, std::abs(anchor(c + 1)));
        State ap = anchor;
        ap(c + 1) += h;
        const State pp = P(ap);
        J(0, c) = (pp(1) - P(anchor)(1)) / h;
        J(1, c) = (pp(2) - P(anchor)(2)) / h;
    }
    const Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    orbit.multipliers[0] = es.eigenvalues()(0);
    orbit.multipliers[1] = es.eigenvalues()(1);

    orbit.orbit_signature = signature(orbit.orbit, params.delta, ret.x0, 0.05, true);
    const auto st = sao_amplitude_stats(spec, orbit.orbit, params.delta);
    orbit.sao_amplitude_spread = st.spread;
    orbit.sao_count = static_cast<int>(st.amplitudes.size());
    return orbit;
}

Params demo_params() { return Params(1.0, -1.0, 0.2, 1e-2); }

ReturnParams demo_return_params(bool constant_sao) {
    ReturnParams ret;
    if (constant_sao) {
        // alpha1 = alpha3 = 0 and p2 alpha2 < 0 keep the central spectrum on
        // the imaginary axis; used for the constant-amplitude SAO measurement.
        ret.x0 = 1.4;
        ret.alpha1 = 0.0;
        ret.alpha3 = 0.0;
        ret.alpha2 = 0.12;
        ret.zeta = 0.0;
    } else {
        // Found by coarse random search at the demo local parameters: a stable
        // periodic MMO with signature 1^4.
        ret.x0 = 1.4;
        ret.alpha1 = -0.086;
        ret.alpha2 = -0.224;
        ret.alpha3 = -0.119;
        ret.kappa = -0.317;
        ret.zeta = -0.323;
        ret.xi = -0.508;
    }
    return ret;
}

State demo_seed() {
    State s(3);
    s << -1.0, 0.6, -0.1;
    return s;
}

}  // namespace pwl::mmo
