#include "pwl/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pwl {

namespace {
constexpr double kContinuityTol = 1e-14;

bool finite(double v) { return std::isfinite(v); }
}  // namespace

Params::Params(double p1_, double p2_, double p3_, double eps_)
    : p1(p1_), p2(p2_), p3(p3_), eps(eps_), delta(default_delta(eps_)) {
    validate();
}

Params::Params(double p1_, double p2_, double p3_, double eps_, double delta_)
    : p1(p1_), p2(p2_), p3(p3_), eps(eps_), delta(delta_) {
    validate();
}

double Params::default_delta(double eps) { return std::numbers::pi * std::sqrt(eps); }

double Params::omega() const { return std::sqrt(eps * p1); }

void Params::validate() const {
    if (!(finite(p1) && finite(p2) && finite(p3) && finite(eps) && finite(delta)))
        throw std::invalid_argument("Params: all fields must be finite");
    if (!(eps > 0.0)) throw std::invalid_argument("Params: eps must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("Params: delta must be > 0");
}

PwlCurve::PwlCurve(std::vector<double> breakpoints, std::vector<double> slopes,
                   std::vector<double> intercepts)
    : breaks_(std::move(breakpoints)), slopes_(std::move(slopes)),
      intercepts_(std::move(intercepts)) {
    if (slopes_.size() != intercepts_.size() || slopes_.size() != breaks_.size() + 1)
        throw std::invalid_argument("PwlCurve: need one segment more than breakpoints");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i - 1] < breaks_[i]))
            throw std::invalid_argument("PwlCurve: breakpoints must be strictly increasing");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const double x = breaks_[i];
        const double left = slopes_[i] * x + intercepts_[i];
        const double right = slopes_[i + 1] * x + intercepts_[i + 1];
        const double scale = std::max({1.0, std::abs(left), std::abs(right)});
        if (std::abs(left - right) > kContinuityTol * scale) {
            std::ostringstream msg;
            msg << "PwlCurve: discontinuous at breakpoint x=" << x << " (" << left
                << " vs " << right << ")";
            throw std::invalid_argument(msg.str());
        }
    }
}

int PwlCurve::segment_index(double x) const {
    int i = 0;
    while (i < static_cast<int>(breaks_.size()) && x > breaks_[static_cast<std::size_t>(i)]) ++i;
    return i;
}

double PwlCurve::eval(double x) const {
    if (!std::isfinite(x)) throw std::invalid_argument("PwlCurve::eval: x must be finite");
    const int i = segment_index(x);
    return slopes_[static_cast<std::size_t>(i)] * x + intercepts_[static_cast<std::size_t>(i)];
}

double PwlCurve::slope_at(double x) const {
    return slopes_[static_cast<std::size_t>(segment_index(x))];
}

SystemSpec::SystemSpec(int dimension, std::vector<Zone> zones, double eps,
                       std::string provenance)
    : dim_(dimension), zones_(std::move(zones)), eps_(eps), provenance_(std::move(provenance)) {
    if (zones_.empty()) throw std::invalid_argument("SystemSpec: no zones");
    for (const auto& z : zones_) {
        if (z.M.rows() != dim_ || z.M.cols() != dim_ || z.c.size() != dim_)
            throw std::invalid_argument("SystemSpec: generator dimension mismatch");
    }
    for (std::size_t i = 1; i < zones_.size(); ++i) {
        if (!(zones_[i - 1].x_hi == zones_[i].x_lo))
            throw std::invalid_argument("SystemSpec: zones must tile the x-axis");
    }
    for (int k = 0; k + 1 < zone_count(); ++k) {
        const double r = continuity_residual(k);
        if (r > kContinuityTol) {
            std::ostringstream msg;
            msg << "SystemSpec: field discontinuous across plane x=" << zones_[static_cast<std::size_t>(k)].x_hi
                << " (relative residual " << r << ")";
            throw std::invalid_argument(msg.str());
        }
    }
}

double SystemSpec::continuity_residual(int plane) const {
    const Zone& L = zones_[static_cast<std::size_t>(plane)];
    const Zone& R = zones_[static_cast<std::size_t>(plane) + 1];
    const double b = L.x_hi;
    double worst = 0.0;
    // Check on an affine basis of the plane {x = b}: the base point and unit
    // offsets in each remaining coordinate.
    for (int j = 0; j <= dim_ - 1; ++j) {
        State s = State::Zero(dim_);
        s(0) = b;
        if (j >= 1) s(j) = 1.0;
        const State fl = L.M * s + L.c;
        const State fr = R.M * s + R.c;
        const double scale = std::max({1.0, fl.norm(), fr.norm()});
        worst = std::max(worst, (fl - fr).norm() / scale);
    }
    return worst;
}

int SystemSpec::zone_index_interior(double x) const {
    for (int i = 0; i < zone_count(); ++i) {
        const Zone& z = zones_[static_cast<std::size_t>(i)];
        if (x < z.x_hi || i == zone_count() - 1) {
            if (x >= z.x_lo || i == 0) return i;
        }
    }
    return zone_count() - 1;
}

int SystemSpec::zone_index(const State& s) const {
    const double x = s(0);
    for (int i = 0; i < zone_count(); ++i) {
        const Zone& z = zones_[static_cast<std::size_t>(i)];
        if (x > z.x_lo && x < z.x_hi) return i;
        if (x == z.x_lo || x == z.x_hi) {
            // On a plane: pick the side the flow enters. The field is continuous,
            // so the sign of x' is well defined.
            const double xdot = (z.M.row(0) * s + z.c.row(0))(0);
            if (x == z.x_lo && xdot >= 0.0) return i;
            if (x == z.x_hi && xdot <= 0.0) return i;
        }
    }
    // Fall back to interval lookup (x numerically at a boundary, flow tangent).
    return zone_index_interior(x);
}

State SystemSpec::field(const State& s) const {
    const Zone& z = zones_[static_cast<std::size_t>(zone_index(s))];
    return z.M * s + z.c;
}

}  // namespace pwl
