#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwl {

using State = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameters of the three-dimensional minimal slow-fast family.
/// All generators built from these are stored in fast time.
struct Params {
    double p1 = 1.0;
    double p2 = -1.0;
    double p3 = 0.1;
    double eps = 1e-2;   // timescale ratio, > 0
    double delta = 0.0;  // half-width of the central zone, > 0

    Params() = default;
    Params(double p1_, double p2_, double p3_, double eps_);
    Params(double p1_, double p2_, double p3_, double eps_, double delta_);

    /// pi * sqrt(eps), the scaling that makes the winding bound eps-independent.
    static double default_delta(double eps);

    double omega() const;  // sqrt(eps*p1), central angular velocity (p1 > 0)

    void validate() const;
};

/// Linear global-return coefficients appended to the z-equation,
/// plus the abscissa x0 of the fourth-zone fold.
struct ReturnParams {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double kappa = 0.0;
    double zeta = 0.0;
    double xi = 0.0;
    double x0 = 1.0;  // must satisfy x0 > delta
};

/// Continuous piecewise-linear scalar function of x.
/// Segment i covers [breakpoints[i-1], breakpoints[i]] with value slope*x + intercept.
class PwlCurve {
  public:
    PwlCurve(std::vector<double> breakpoints, std::vector<double> slopes,
             std::vector<double> intercepts);

    double eval(double x) const;
    double slope_at(double x) const;
    int segment_index(double x) const;

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& intercepts() const { return intercepts_; }
    std::size_t segment_count() const { return slopes_.size(); }

  private:
    std::vector<double> breaks_;
    std::vector<double> slopes_;
    std::vector<double> intercepts_;
};

/// One linearity zone: ds/dt = M s + c for x in [x_lo, x_hi].
struct Zone {
    Matrix M;
    State c;
    double x_lo = 0.0;  // -inf allowed
    double x_hi = 0.0;  // +inf allowed

    bool contains(double x) const { return x >= x_lo && x <= x_hi; }
};

/// A continuous piecewise-affine vector field in fast time, zones ordered by x.
class SystemSpec {
  public:
    SystemSpec(int dimension, std::vector<Zone> zones, double eps, std::string provenance);

    int dimension() const { return dim_; }
    double eps() const { return eps_; }
    const std::vector<Zone>& zones() const { return zones_; }
    const Zone& zone(int i) const { return zones_.at(static_cast<std::size_t>(i)); }
    int zone_count() const { return static_cast<int>(zones_.size()); }
    const std::string& provenance() const { return provenance_; }

    /// Zone index containing x; on a switching plane, the side the flow enters
    /// (decided by the sign of x' which is continuous across the plane).
    int zone_index(const State& s) const;
    int zone_index_interior(double x) const;

    State field(const State& s) const;

    /// Residual of the continuity requirement across plane k, relative scale.
    double continuity_residual(int plane) const;

  private:
    int dim_;
    std::vector<Zone> zones_;
    double eps_;
    std::string provenance_;
};

}  // namespace pwl
