#pragma once

#include "pwl/types.hpp"

namespace pwl::model {

/// f_delta: flat central plateau of half-width delta, outer slopes -1 / +1.
PwlCurve minimal_curve(double delta);

/// F_delta of the planar four-zone family: central slope beta, fourth zone
/// (slope -1) to the left of x0 < -delta.
PwlCurve four_zone_curve(double beta, double delta, double x0);

/// Same four-zone form with explicit slopes (x <= x0 | x0..-delta | central |
/// x >= delta). Continuity fixes the intercepts from the central segment.
PwlCurve four_zone_curve(double beta, double delta, double x0, double s_left, double s_mid,
                         double s_right);

/// f~_delta: minimal_curve with a fourth zone (slope -1) to the right of x0 > delta.
PwlCurve return_curve(double delta, double x0);

/// Two-piece local critical manifold x + (1+k)/2 (|x-1| - |x+1|).
PwlCurve quasi_canard_curve(double k);

/// Three-zone minimal system in fast time:
///   x' = -y + f_delta(x),  y' = eps (p1 x + p2 z),  z' = eps p3.
SystemSpec build_minimal_3d(const Params& params);

/// Four-zone system with linear global return in the z-equation:
///   z' = eps (p3 + a1 (x-kappa) + a2 (y-zeta) + a3 (z-xi)).
SystemSpec build_global_return(const Params& params, const ReturnParams& ret);

/// True when alpha1 = alpha3 = 0 and p2*alpha2 < 0, the constraint that keeps
/// the central-zone spectrum purely imaginary (constant-amplitude SAOs).
bool constant_sao_condition(const Params& params, const ReturnParams& ret);

struct QuasiCanard {
    double k = 0.5;
    double a = 0.7;
};

/// Four-zone planar family. The slope defaults make the critical manifold
/// canard-explosive under the Lienard orientation (attracting outer arms,
/// repelling arm next to the flat fold zone); they are this repository's
/// documented choice, since the reference experiment never published its own.
struct Arima {
    double beta = 0.0;
    double delta = 0.75;
    double x0 = -5.0;  // fourth-zone breakpoint, x0 < -delta
    double a = 0.0;
    double s_left = 1.0;   // slope for x <= x0
    double s_mid = -3.0;   // slope on (x0, -delta)
    double s_right = 2.0;  // slope for x >= delta
};

/// Planar Lienard system in fast time: x' = y - f(x), y' = eps (a - x).
SystemSpec build_planar(const QuasiCanard& kind, double eps);
SystemSpec build_planar(const Arima& kind, double eps);

/// Same families with the slow-nullcline parameter promoted to a state with
/// drift a' = eps c; states ordered (x, y, a).
SystemSpec build_planar_drifted(const QuasiCanard& kind, double c, double eps);
SystemSpec build_planar_drifted(const Arima& kind, double c, double eps);

/// Critical-manifold curve of a planar builder (for thresholds and plotting).
PwlCurve planar_curve(const QuasiCanard& kind);
PwlCurve planar_curve(const Arima& kind);

double eval_pwl(const PwlCurve& curve, double x);

}  // namespace pwl::model
