#pragma once

#include <vector>

#include "kgscatter/potential.hpp"

namespace kgscatter::oracle {

/// Direct integration of psi'' = [2(E+m) V(x) - (E^2 - m^2)] psi on [-L, L].
struct IntegrationConfig {
    double x_box = 0.0;  // half-width L; 0 picks max(20/alpha, 20/wavenumber)
    // 1e-10 is not enough next to sharp transmission resonances, where local
    // errors are amplified by the resonance width
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    long max_steps = 2'000'000;
};

struct ScatteringEstimate {
    double reflection;
    double transmission;
};

struct ShootResult {
    /// Wronskian of the two decaying solutions at x = 0, normalised by their
    /// phase-plane norms: continuous in E and zero exactly at bound states.
    double mismatch;
    /// psi_L'/psi_L - psi_R'/psi_R at x = 0 (infinite for odd states).
    double log_derivative_mismatch;
    /// Sign changes of the glued solution (meaningful at a root).
    int nodes;
};

struct NumericBoundState {
    double energy;
    int nodes;
};

double default_box(double alpha, double wavenumber);

/// Throws StepLimit, BoxTooSmall, SubBarrierEnergy.
ScatteringEstimate integrate_scattering(double energy, const PotentialParams& p,
                                        const IntegrationConfig& cfg = {});

/// Throws StepLimit, OutOfWell.
ShootResult shoot_bound_state(double energy, const WellParams& w, const IntegrationConfig& cfg = {});

/// Scan (-m, m) on grid_n points for sign changes of the shooting mismatch and
/// bisect each to 1e-10 m.
std::vector<NumericBoundState> find_bound_states_numeric(const WellParams& w,
                                                         const IntegrationConfig& cfg = {},
                                                         int grid_n = 512);

}  // namespace kgscatter::oracle
