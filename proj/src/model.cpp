#include "pwl/model.hpp"

#include <cmath>
#include <limits>

namespace pwl::model {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Zones of a 3D system x' = -y + f(x), rows (y,z) shared across zones.
std::vector<Zone> zones_from_curve(const PwlCurve& f, const Eigen::RowVector3d& y_row,
                                   const Eigen::RowVector3d& z_row, double c_y, double c_z) {
    std::vector<Zone> zones;
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.segment_count(); ++i) {
        Zone z;
        z.M = Matrix::Zero(3, 3);
        z.M(0, 0) = f.slopes()[i];
        z.M(0, 1) = -1.0;
        z.M.row(1) = y_row;
        z.M.row(2) = z_row;
        z.c = State::Zero(3);
        z.c(0) = f.intercepts()[i];
        z.c(1) = c_y;
        z.c(2) = c_z;
        z.x_lo = (i == 0) ? -kInf : b[i - 1];
        z.x_hi = (i == f.segment_count() - 1) ? kInf : b[i];
        zones.push_back(std::move(z));
    }
    return zones;
}
}  // namespace

PwlCurve minimal_curve(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("minimal_curve: delta must be > 0");
    return PwlCurve({-delta, delta}, {-1.0, 0.0, 1.0}, {-delta, 0.0, -delta});
}

PwlCurve four_zone_curve(double beta, double delta, double x0) {
    return four_zone_curve(beta, delta, x0, -1.0, 1.0, -1.0);
}

PwlCurve four_zone_curve(double beta, double delta, double x0, double s_left, double s_mid,
                         double s_right) {
    if (!(delta > 0.0)) throw std::invalid_argument("four_zone_curve: delta must be > 0");
    if (!(x0 < -delta)) throw std::invalid_argument("four_zone_curve: requires x0 < -delta");
    // Segments for x <= x0, x0 <= x <= -delta, |x| <= delta, x >= delta;
    // intercepts chained from the central segment beta*x for continuity.
    const double q_mid = -beta * delta - s_mid * (-delta);
    const double q_left = s_mid * x0 + q_mid - s_left * x0;
    const double q_right = beta * delta - s_right * delta;
    return PwlCurve({x0, -delta, delta}, {s_left, s_mid, beta, s_right},
                    {q_left, q_mid, 0.0, q_right});
}

PwlCurve return_curve(double delta, double x0) {
    if (!(delta > 0.0)) throw std::invalid_argument("return_curve: delta must be > 0");
    if (!(x0 > delta)) throw std::invalid_argument("return_curve: requires x0 > delta");
    return PwlCurve({-delta, delta, x0}, {-1.0, 0.0, 1.0, -1.0},
                    {-delta, 0.0, -delta, 2.0 * x0 - delta});
}

PwlCurve quasi_canard_curve(double k) {
    return PwlCurve({-1.0, 1.0}, {1.0, -k, 1.0}, {1.0 + k, 0.0, -(1.0 + k)});
}

SystemSpec build_minimal_3d(const Params& params) {
    params.validate();
    const double e = params.eps;
    Eigen::RowVector3d y_row(e * params.p1, 0.0, e * params.p2);
    Eigen::RowVector3d z_row(0.0, 0.0, 0.0);
    auto zones = zones_from_curve(minimal_curve(params.delta), y_row, z_row, 0.0, e * params.p3);
    return SystemSpec(3, std::move(zones), e, "minimal3d");
}

SystemSpec build_global_return(const Params& params, const ReturnParams& ret) {
    params.validate();
    if (!(ret.x0 > params.delta))
        throw std::invalid_argument("build_global_return: requires x0 > delta");
    const double e = params.eps;
    Eigen::RowVector3d y_row(e * params.p1, 0.0, e * params.p2);
    Eigen::RowVector3d z_row(e * ret.alpha1, e * ret.alpha2, e * ret.alpha3);
    const double c_z =
        e * (params.p3 - ret.alpha1 * ret.kappa - ret.alpha2 * ret.zeta - ret.alpha3 * ret.xi);
    auto zones =
        zones_from_curve(return_curve(params.delta, ret.x0), y_row, z_row, 0.0, c_z);
    return SystemSpec(3, std::move(zones), e, "global_return");
}

bool constant_sao_condition(const Params& params, const ReturnParams& ret) {
    return ret.alpha1 == 0.0 && ret.alpha3 == 0.0 && params.p2 * ret.alpha2 < 0.0;
}

namespace {
SystemSpec planar_from_curve(const PwlCurve& f, double a, double eps, const char* tag) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_planar: eps must be > 0");
    std::vector<Zone> zones;
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.segment_count(); ++i) {
        Zone z;
        z.M = Matrix::Zero(2, 2);
        z.M(0, 0) = -f.slopes()[i];
        z.M(0, 1) = 1.0;
        z.M(1, 0) = -eps;
        z.c = State::Zero(2);
        z.c(0) = -f.intercepts()[i];
        z.c(1) = eps * a;
        z.x_lo = (i == 0) ? -kInf : b[i - 1];
        z.x_hi = (i == f.segment_count() - 1) ? kInf : b[i];
        zones.push_back(std::move(z));
    }
    return SystemSpec(2, std::move(zones), eps, tag);
}

SystemSpec planar_drifted_from_curve(const PwlCurve& f, double c, double eps, const char* tag) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_planar_drifted: eps must be > 0");
    std::vector<Zone> zones;
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.segment_count(); ++i) {
        Zone z;
        z.M = Matrix::Zero(3, 3);
        z.M(0, 0) = -f.slopes()[i];
        z.M(0, 1) = 1.0;
        z.M(1, 0) = -eps;
        z.M(1, 2) = eps;
        z.c = State::Zero(3);
        z.c(0) = -f.intercepts()[i];
        z.c(2) = eps * c;
        z.x_lo = (i == 0) ? -kInf : b[i - 1];
        z.x_hi = (i == f.segment_count() - 1) ? kInf : b[i];
        zones.push_back(std::move(z));
    }
    return SystemSpec(3, std::move(zones), eps, tag);
}
}  // namespace

PwlCurve planar_curve(const QuasiCanard& kind) { return quasi_canard_curve(kind.k); }

PwlCurve planar_curve(const Arima& kind) {
    return four_zone_curve(kind.beta, kind.delta, kind.x0, kind.s_left, kind.s_mid,
                           kind.s_right);
}

SystemSpec build_planar(const QuasiCanard& kind, double eps) {
    return planar_from_curve(planar_curve(kind), kind.a, eps, "planar_quasi");
}

SystemSpec build_planar(const Arima& kind, double eps) {
    return planar_from_curve(planar_curve(kind), kind.a, eps, "planar_arima");
}

SystemSpec build_planar_drifted(const QuasiCanard& kind, double c, double eps) {
    return planar_drifted_from_curve(planar_curve(kind), c, eps, "planar_quasi_drifted");
}

SystemSpec build_planar_drifted(const Arima& kind, double c, double eps) {
    return planar_drifted_from_curve(planar_curve(kind), c, eps, "planar_arima_drifted");
}

double eval_pwl(const PwlCurve& curve, double x) { return curve.eval(x); }

}  // namespace pwl::model
