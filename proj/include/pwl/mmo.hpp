#pragma once

#include "pwl/hybrid.hpp"
#include "pwl/model.hpp"
#include "pwl/types.hpp"

#include <complex>

namespace pwl::mmo {

struct CentralSpectrum {
    std::array<std::complex<double>, 3> eigenvalues;
    double max_abs_real = 0.0;
    bool rotating_pair = false;
    bool constant_sao = false;  // |Re| <= 1e-12 for all and a rotating pair exists
};

/// Eigenvalues of the central-zone fast-time generator of the return system.
CentralSpectrum central_spectrum(const Params& params, const ReturnParams& ret);

struct Section {
    double x = 0.0;
    int direction = +1;  // sign of x' at the crossing
};

/// Next same-direction crossing of the section, via hybrid integration.
std::optional<State> poincare_map(const SystemSpec& spec, const Section& section,
                                  const State& s, double horizon);

struct MmoSignature {
    std::vector<std::pair<int, int>> pairs;  // (LAO count, SAO count)
    double lao_threshold_x = 0.0;            // fourth-zone entry abscissa
    double sao_band = 0.0;                   // |x| <= sao_band counts as SAO

    std::string str() const;  // "1^5 2^3" style
};

/// Count LAOs (excursions entering x > x0) and SAOs (x-local maxima within
/// |x| <= delta (1+margin)) along a trajectory and group them into L^s pairs.
/// With `cyclic` (periodic data) leading SAOs wrap onto the final LAO group.
MmoSignature signature(const hybrid::Trajectory& traj, double delta, double x0,
                       double margin = 0.05, bool cyclic = false);

struct SaoStats {
    double spread = 0.0;           // (max - min) / max of the amplitudes
    std::vector<double> amplitudes;  // per-rotation x-amplitudes, exact extrema
};

/// Per-rotation SAO amplitudes along the central-zone segments, measured at
/// the exact times of x' = 0 (not at dense samples).
SaoStats sao_amplitude_stats(const SystemSpec& spec, const hybrid::Trajectory& traj,
                             double delta);

struct PeriodicOrbit {
    State anchor;                     // on the section
    double period = 0.0;              // fast time
    double residual = 0.0;            // |P(anchor) - anchor|
    std::array<std::complex<double>, 2> multipliers;  // return-map FD Jacobian spectrum
    MmoSignature orbit_signature;
    hybrid::Trajectory orbit;         // one period from the anchor
    double sao_amplitude_spread = 0.0;  // relative spread of per-rotation x-amplitudes
    int sao_count = 0;
};

struct MmoOptions {
    double burn_in = 3000.0;
    double tol = 1e-8;
    int max_newton = 60;
    double horizon_per_return = 0.0;  // 0: automatic
};

/// Fixed point of the return map on {x = -delta, x' > 0} by damped quasi-Newton
/// on the section coordinates, seeded after a burn-in transient.
/// Throws std::runtime_error with the last iterate on divergence.
PeriodicOrbit find_periodic_mmo(const SystemSpec& spec, const Params& params,
                                const ReturnParams& ret, const State& seed,
                                const MmoOptions& opts = {});

/// Return parameters of the repository demo MMO (stable 1^s orbit, s >= 2,
/// on the folded-node local parameters p1=1, p2=-1, p3=0.2, eps=0.01).
ReturnParams demo_return_params(bool constant_sao);
Params demo_params();
State demo_seed();

}  // namespace pwl::mmo
