#pragma once

#include <variant>
#include <vector>

namespace kgscatter {

/// q-deformed hyperbolic Poschl-Teller barrier, natural units.
struct PotentialParams {
    double lambda = 2.0;
    double q = 1.0;
    double alpha = 1.0;
    double mass = 1.0;

    /// Prefactor 4 lambda (lambda - 1).
    double strength() const { return 4.0 * lambda * (lambda - 1.0); }
};

/// Attractive well of depth v0, obtained from the barrier by 8 lambda (lambda - 1) -> -v0.
struct WellParams {
    double v0 = 10.0;
    double q = 1.0;
    double alpha = 1.0;
    double mass = 1.0;

    double strength() const { return -0.5 * v0; }
};

struct ProfilePoint {
    double x;
    double v;
};

// Shape factor e^{-2 alpha |x|} / (1 + q e^{-2 alpha |x|})^2, even in x.
double shape(double q, double alpha, double x);

double evaluate(const PotentialParams& p, double x);
double well_evaluate(const WellParams& w, double x);

/// n uniform samples on [x_min, x_max], endpoints included. Throws BadRange.
std::vector<ProfilePoint> profile(const std::variant<PotentialParams, WellParams>& params,
                                  double x_min, double x_max, int n);

void validate(const PotentialParams& p);
void validate(const WellParams& w);

}  // namespace kgscatter
