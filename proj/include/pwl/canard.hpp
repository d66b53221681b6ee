#pragma once

#include "pwl/geometry.hpp"
#include "pwl/types.hpp"

namespace pwl::canard {

/// The rational function Q(z) of the root equation and its bracket scaffold.
class RootScaffold {
  public:
    explicit RootScaffold(const Params& params);

    double z1() const { return z1_; }  // zeros of Q
    double z2() const { return z2_; }
    double pole1() const { return pole1_; }  // Q-pole nearer 0
    double pole2() const { return pole2_; }

    /// Zeros r_j and vertical asymptotes r~_j of tan(theta(z)), j = 0,1,...
    double r(int j) const;
    double rt(int j) const;

    /// Invariant-cylinder amplitude of the k-th secondary canard,
    /// Delta(k) = delta (1 + (p2 p3 / (p1 sqrt(p1))) (k + 1/2)).
    double cylinder_amplitude(int k) const;

    double theta(double z) const;  // -2 sqrt(p1) z / (p3 sqrt(eps))
    double numerator(double z) const;
    double denominator(double z) const;
    double q(double z) const;  // throws near a pole
    double gain() const { return gain_; }  // 2 |lambda_A| sqrt(eps p1)

    /// Closed forms the root must satisfy: cos(theta) = cos_rhs, sin = sin_rhs.
    double cos_rhs(double z) const;
    double sin_rhs(double z) const;

    /// Pole-free form of the root equation, W = sin(theta) D - gain N cos(theta).
    double w(double z) const;
    double w_prime(double z) const;

  private:
    Params p_;
    double lambda_A_ = 0.0;
    double gain_ = 0.0;
    double z1_ = 0.0, z2_ = 0.0, pole1_ = 0.0, pole2_ = 0.0;
};

struct CanardSolution {
    int k = 0;                  // winding index
    double z = 0.0;             // entry z on {x = -delta}
    double y = 0.0;             // entry y (from membership in L^A)
    State entry;                // (-delta, y, z)
    double flight_time = 0.0;   // -2 z / (eps p3)
    long winding = 0;           // turns measured on the integrated transit
    double theta = 0.0;         // total rotation angle of the closed form
    double root_residual = 0.0; // max deviation of (cos, sin) from the closed forms
    double reversibility_error = 0.0;  // |exit - R(entry)|
    double flight_time_error = 0.0;    // relative, integrated vs closed form
    double residence_sup_x = 0.0;      // sup |x(t)| over the open transit
    bool reversible = false;
    bool resident = false;
    bool winding_ok = false;
    std::string parity;  // "odd" (theta mod 2pi in (pi,3pi/2)) or "even" tail roots
};

struct CanardCandidate {
    double z = 0.0;
    double theta = 0.0;
    int k = 0;
    double system_residual = 0.0;  // of the (cos, sin) system
    bool system_ok = false;
    bool validated = false;
    std::string note;
};

struct CanardSearch {
    std::vector<CanardSolution> canards;      // validated, sorted by k
    std::vector<CanardCandidate> candidates;  // every root of the tan equation scanned
    std::vector<std::string> warnings;
    double window_lo = 0.0;  // admissible z-window that was scanned
    double window_hi = 0.0;
};

/// Locate and validate every maximal canard of the minimal system.
/// p3 < 0 is handled through the (p2, p3) -> (-p2, -p3), z -> -z symmetry.
CanardSearch maximal_canards(const Params& params);

/// Truncated expansions of the k-th entry point (leading orders only).
struct LeadingCoordinates {
    double y = 0.0;
    double z = 0.0;
};
LeadingCoordinates canard_coordinates_leading(const Params& params, int k);

/// Selected canard of Prop-2 type: with delta = delta_k the k-th maximal
/// canard has an elementary closed form.
struct SelectedCanard {
    int k = 0;
    double delta_k = 0.0;
    State entry;
    double flight_time = 0.0;  // (2k+1) pi / sqrt(eps p1)
    Params params;             // input params with delta replaced by delta_k

    State eval(double t) const;  // closed-form state at fast time t in [0, T]
};
SelectedCanard selected_canard(double p1, double p2, double p3, double eps, int k);

/// Distance in the plane {x = delta} between the rotation-axis endpoint and
/// the line L^R: the weak canard misses the repelling manifold by O(eps).
double weak_canard_gap(const Params& params);

/// Q(z) with a zeros/poles report.
struct QReport {
    double value = 0.0;
    double z1 = 0.0, z2 = 0.0, pole1 = 0.0, pole2 = 0.0;
    double asymptote = 0.0;  // limit of Q at +-infinity
};
QReport q_rational(const Params& params, double z);

}  // namespace pwl::canard
