#include "pwl/zoneflow.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pwl {

namespace {
constexpr double kGrazeTol = 1e-10;
constexpr double kBisectTol = 1e-14;
}  // namespace

struct ZoneFlow::Impl {
    int dim = 0;
    Eigen::Matrix3d aug3;  // augmented homogeneous generator, dim 2
    Eigen::Matrix4d aug4;  // dim 3

    State propagate(const State& s, double t) const {
        if (dim == 2) {
            const Eigen::Matrix3d phi = (aug3 * t).exp();
            Eigen::Vector3d v(s(0), s(1), 1.0);
            const Eigen::Vector3d out = phi * v;
            return (State(2) << out(0), out(1)).finished();
        }
        const Eigen::Matrix4d phi = (aug4 * t).exp();
        Eigen::Vector4d v(s(0), s(1), s(2), 1.0);
        const Eigen::Vector4d out = phi * v;
        return (State(3) << out(0), out(1), out(2)).finished();
    }
};

ZoneFlow::ZoneFlow(Zone zone) : zone_(std::move(zone)), impl_(std::make_shared<Impl>()) {
    const int d = static_cast<int>(zone_.M.rows());
    impl_->dim = d;
    if (d == 2) {
        impl_->aug3.setZero();
        impl_->aug3.topLeftCorner<2, 2>() = zone_.M;
        impl_->aug3.topRightCorner<2, 1>() = zone_.c;
    } else if (d == 3) {
        impl_->aug4.setZero();
        impl_->aug4.topLeftCorner<3, 3>() = zone_.M;
        impl_->aug4.topRightCorner<3, 1>() = zone_.c;
    } else {
        throw std::invalid_argument("ZoneFlow: dimension must be 2 or 3");
    }
    Eigen::EigenSolver<Matrix> es(zone_.M);
    double max_im = 0.0;
    for (int i = 0; i < d; ++i) {
        max_im = std::max(max_im, std::abs(es.eigenvalues()(i).imag()));
        rate_ = std::max(rate_, std::abs(es.eigenvalues()(i).real()));
    }
    if (max_im > 0.0) {
        rotating_ = true;
        omega_ = max_im;
    }
}

State ZoneFlow::flow(const State& s, double t) const { return impl_->propagate(s, t); }

double ZoneFlow::x_dot(const State& s) const { return (zone_.M.row(0) * s)(0) + zone_.c(0); }

double ZoneFlow::sample_step(double horizon) const {
    if (rotating_) return std::min(std::numbers::pi / (8.0 * omega_), horizon / 1024.0);
    return horizon / 1024.0;
}

std::optional<ZoneFlow::MultiCrossing> ZoneFlow::first_crossing_multi(
    const State& s, std::span<const double> planes, double horizon) const {
    if (!(horizon > 0.0) || planes.empty()) return std::nullopt;
    const double step_cap = sample_step(horizon);
    double h = rotating_ ? step_cap : std::min(step_cap, 1e-3 / rate_);

    // Sign bookkeeping per plane; a state starting on a plane uses the sign of
    // its departure direction so later returns still bracket.
    std::vector<double> f_prev(planes.size());
    for (std::size_t p = 0; p < planes.size(); ++p) {
        double f = s(0) - planes[p];
        if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(planes[p]))) {
            double dir = x_dot(s);
            if (dir == 0.0) dir = (zone_.M * (zone_.M * s + zone_.c))(0);
            f = (dir > 0.0) ? 1.0 : (dir < 0.0 ? -1.0 : 0.0);
        }
        f_prev[p] = f;
    }

    State s_prev = s;      // state at t_prev, advanced incrementally
    double t_prev = 0.0;
    while (t_prev < horizon) {
        const double dt = std::min(h, horizon - t_prev);
        const State s_next = impl_->propagate(s_prev, dt);
        if (!rotating_) h = std::min(h * 1.35, step_cap);

        double best_t = std::numeric_limits<double>::infinity();
        int best_plane = -1;
        State best_state;
        bool best_grazing = false;
        std::vector<double> f_next(planes.size());
        for (std::size_t p = 0; p < planes.size(); ++p) {
            f_next[p] = s_next(0) - planes[p];
            const bool bracket = (f_prev[p] < 0.0 && f_next[p] >= 0.0) ||
                                 (f_prev[p] > 0.0 && f_next[p] <= 0.0);
            if (!bracket) continue;
            // Bisect within [0, dt] from s_prev, then refine from the origin
            // state for full precision.
            double lo = 0.0, hi = dt, flo = f_prev[p];
            while ((hi - lo) > kBisectTol * std::max(1.0, t_prev + hi)) {
                const double mid = 0.5 * (lo + hi);
                const double fm = impl_->propagate(s_prev, mid)(0) - planes[p];
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            double tc = t_prev + 0.5 * (lo + hi);
            State sc = impl_->propagate(s, tc);
            const double xd = x_dot(sc);
            if (std::abs(xd) > kGrazeTol) {
                const double tn = tc - (sc(0) - planes[p]) / xd;  // one Newton polish
                if (tn > 0.0 && tn <= horizon) {
                    tc = tn;
                    sc = impl_->propagate(s, tc);
                }
            }
            const bool grazing = std::abs(x_dot(sc)) < kGrazeTol;
            if (grazing) {
                // Curvature decides a tangency: bending back into the zone
                // means no crossing here.
                const State acc = zone_.M * (zone_.M * sc + zone_.c);
                const double outward = (f_prev[p] < 0.0) ? 1.0 : -1.0;
                if (acc(0) * outward < 0.0) continue;
            }
            if (tc < best_t) {
                best_t = tc;
                best_plane = static_cast<int>(p);
                best_state = sc;
                best_grazing = grazing;
            }
        }
        if (best_plane >= 0) {
            best_state(0) = planes[static_cast<std::size_t>(best_plane)];
            return MultiCrossing{best_plane, Crossing{best_t, std::move(best_state), best_grazing}};
        }
        t_prev += dt;
        s_prev = s_next;
        f_prev = std::move(f_next);
    }
    return std::nullopt;
}

std::optional<Crossing> ZoneFlow::crossing_time(const State& s, double plane_x,
                                                double horizon) const {
    const double planes[1] = {plane_x};
    auto mc = first_crossing_multi(s, planes, horizon);
    if (!mc) return std::nullopt;
    return mc->crossing;
}

std::vector<double> ZoneFlow::x_extrema_times(const State& s, double t_end) const {
    std::vector<double> out;
    if (!(t_end > 0.0)) return out;
    const double step =
        rotating_ ? std::numbers::pi / (8.0 * omega_) : std::max(t_end / 1024.0, 1e-6);
    State s_prev = s;
    double t_prev = 0.0, f_prev = x_dot(s);
    while (t_prev < t_end) {
        const double dt = std::min(step, t_end - t_prev);
        const State s_next = impl_->propagate(s_prev, dt);
        const double f_next = x_dot(s_next);
        if ((f_prev < 0.0) != (f_next < 0.0)) {
            double lo = 0.0, hi = dt, flo = f_prev;
            for (int it = 0; it < 200 && (hi - lo) > kBisectTol * std::max(1.0, t_prev + hi);
                 ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = x_dot(impl_->propagate(s_prev, mid));
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(t_prev + 0.5 * (lo + hi));
        }
        t_prev += dt;
        s_prev = s_next;
        f_prev = f_next;
    }
    return out;
}

double first_integral_H(const Params& params, const State& s) {
    const double u = params.p1 * s(0) + params.p2 * s(2);
    const double v = params.p1 * s(1) - params.eps * params.p2 * params.p3;
    return params.eps * params.p1 * u * u + v * v;
}

State central_flow_closed_form(const Params& params, const State& s, double t) {
    const double e = params.eps, p1 = params.p1, p2 = params.p2, p3 = params.p3;
    const double u0 = p1 * s(0) + p2 * s(2);
    const double v0 = p1 * s(1) - e * p2 * p3;
    double u, v;
    if (p1 > 0.0) {
        const double w = std::sqrt(e * p1);
        u = u0 * std::cos(w * t) - (v0 / w) * std::sin(w * t);
        v = v0 * std::cos(w * t) + w * u0 * std::sin(w * t);
    } else if (p1 < 0.0) {
        const double w = std::sqrt(-e * p1);
        u = u0 * std::cosh(w * t) - (v0 / w) * std::sinh(w * t);
        v = v0 * std::cosh(w * t) - w * u0 * std::sinh(w * t);
    } else {
        u = u0 - v0 * t;
        v = v0;
    }
    const double z = s(2) + e * p3 * t;
    State out(3);
    out(0) = (u - p2 * z) / p1;
    out(1) = (v + e * p2 * p3) / p1;
    out(2) = z;
    return out;
}

}  // namespace pwl
