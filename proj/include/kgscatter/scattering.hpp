#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgscatter/hyp2f1.hpp"
#include "kgscatter/potential.hpp"

namespace kgscatter {

/// Coefficients of the equation in z = -q e^{2 alpha x}:
/// z(1-z) psi'' + (1-z) psi' + (gamma1 z^2 + gamma2 z + gamma3) psi / (z(1-z)) = 0.
struct EquationCoefficients {
    double gamma1;
    double gamma2;
    double gamma3;
};

struct ScatterKinematics {
    double energy;
    double k;
    Complex mu;
    Complex nu;
    Complex delta;
    // mirror set for x > 0; identical values for the even barrier
    Complex mu_right;
    Complex nu_right;
    Complex delta_right;
    double radicand;  // 1 - 8 (E+m) lambda (lambda-1) / (alpha^2 q)
    EquationCoefficients coefficients;
};

struct WaveSample {
    double x;
    Complex psi;
    Complex dpsi;
};

struct ScatteringResult {
    Complex r_amp;  // B/A
    Complex t_amp;  // D/A
    double reflection;
    double transmission;
    double unitarity_defect;
};

enum class HalfLine { Left, Right };

/// One hypergeometric solution on a half-line:
///   |z|^s (1-z)^nu 2F1(s+nu+delta, s+nu-delta; 1+2s; z)
/// with z = -q e^{2 alpha x} on the left and z = -q e^{-2 alpha x} on the right.
/// The prefactor uses |z| = q e^{+-2 alpha x}, so for imaginary s the
/// asymptotic plane wave has unit amplitude.
WaveSample hypergeometric_branch(Complex s, Complex nu, Complex delta, double q, double alpha,
                                 double x, HalfLine side);

/// Throws SubBarrierEnergy for |E| <= m and BadRange for E < -m.
ScatterKinematics kinematics(double energy, const PotentialParams& p);

/// A z^mu (...) + B z^-mu (...) on x <= 0; A carries the incident wave.
WaveSample psi_left(const ScatterKinematics& kin, const PotentialParams& p, double x, Complex coeff_a,
                    Complex coeff_b);

/// C z~^mu (...) + D z~^-mu (...) on x >= 0; D carries the transmitted wave.
WaveSample psi_right(const ScatterKinematics& kin, const PotentialParams& p, double x,
                     Complex coeff_c, Complex coeff_d);

/// Continuity of psi and psi' at the origin with A = 1, C = 0.
/// Throws SingularMatching when the 2x2 system is numerically singular.
ScatteringResult solve_matching(double energy, const PotentialParams& p);

/// J = Im(psi* psi') / m.
double current_density(const WaveSample& w, double mass);

struct SweepRow {
    double energy;
    std::optional<ScatteringResult> result;
    std::string error;  // set when result is empty
};

/// solve_matching at every grid energy, in grid order. Per-point failures are
/// recorded in the row. threads <= 1 runs inline.
std::vector<SweepRow> sweep(const PotentialParams& p, std::span<const double> energies,
                            unsigned threads = 1);

}  // namespace kgscatter
