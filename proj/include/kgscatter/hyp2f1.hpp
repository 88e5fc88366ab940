#pragma once

#include <complex>

namespace kgscatter {

using Complex = std::complex<double>;

/// Arguments of 2F1(a, b; c; z).
struct Hyp2F1Params {
    Complex a;
    Complex b;
    Complex c;
    Complex z;
};

/// Principal branch of log Gamma(z): real on the positive axis and
/// continuous in the plane cut along (-inf, 0]. Throws PoleError at
/// non-positive integers.
Complex log_gamma(Complex z);

/// Gauss hypergeometric function on the principal branch (cut [1, inf)).
///
/// Small arguments are summed directly; elsewhere the argument is mapped by
/// whichever of z/(z-1), 1-z, 1/z, 1/(1-z), 1-1/z has the smallest modulus.
/// Connection formulas whose parameter differences are integral are
/// evaluated at imaginary offsets of b and Richardson-extrapolated. Points
/// where every mapped argument lies near the unit circle are reached by
/// Taylor continuation of the hypergeometric ODE.
///
/// Throws CPoleError, NoConvergence or DegenerateTransform.
Complex gauss_2f1(const Hyp2F1Params& p);

/// d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z).
Complex gauss_2f1_derivative(const Hyp2F1Params& p);

}  // namespace kgscatter
