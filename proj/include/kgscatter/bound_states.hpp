#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgscatter/hyp2f1.hpp"
#include "kgscatter/ode_oracle.hpp"
#include "kgscatter/potential.hpp"
#include "kgscatter/scattering.hpp"

namespace kgscatter {

struct BoundKinematics {
    double energy;
    double kappa;    // sqrt(m^2 - E^2)
    Complex mu1;     // +kappa / (2 alpha): the kept branch |z|^mu1 decays outward on both sides
    Complex nu1;     // 1/2 - 1/2 sqrt(1 + (E+m) v0 / (alpha^2 q))
    Complex delta1;  // equal to mu1
    EquationCoefficients coefficients;  // beta1, beta2, beta3
};

struct BoundStateResult {
    std::vector<double> energies;  // strictly increasing
    std::vector<double> residuals;
    std::vector<int> node_counts;  // from sampling the closed-form state
    // filled when cross-validated against direct shooting
    std::vector<std::optional<double>> oracle_energies;
    std::vector<std::optional<int>> oracle_node_counts;
    std::vector<std::string> lost;  // brackets that failed to refine
};

struct BoundSearchOptions {
    int grid_n = 512;
    bool cross_validate = true;
    oracle::IntegrationConfig oracle_config{};
};

/// Throws OutOfWell for |E| >= m.
BoundKinematics bound_kinematics(double energy, const WellParams& w);

/// Wronskian psi_L psi_R' - psi_L' psi_R of the two decaying closed-form
/// solutions at x = 0, divided by max(1, |psi_L psi_R|). Zero at bound states.
double quantization_residual(double energy, const WellParams& w);

/// Decaying closed-form solutions on each half-line, evaluated at x.
WaveSample bound_left(const BoundKinematics& kin, const WellParams& w, double x);
WaveSample bound_right(const BoundKinematics& kin, const WellParams& w, double x);

/// Sign changes of the matched closed-form state at a root energy.
int count_nodes(double energy, const WellParams& w);

BoundStateResult find_bound_states(const WellParams& w, const BoundSearchOptions& options = {});

/// (E - m, E + m): the substitution onto the nonrelativistic problem.
std::pair<double, double> nonrelativistic_map(double energy, double mass);

}  // namespace kgscatter
