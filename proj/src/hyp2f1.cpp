#include "kgscatter/hyp2f1.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "kgscatter/errors.hpp"

namespace kgscatter {

namespace {

constexpr double kSeriesTol = 1e-14;
constexpr int kMaxTerms = 5000;
constexpr double kDirectRadius = 0.5;
constexpr double kTransformRadius = 0.9;
constexpr double kDegenerateDistance = 1e-5;
constexpr double kPerturbation = 1e-4;
// terms may exceed the result by this factor before another route is tried
constexpr double kAcceptableCancellation = 1e3;

// Godfrey's coefficients, g = 607/128
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5,
};

bool is_nonpositive_integer(Complex z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// distance from z to the nearest integer
double integer_distance(Complex z) { return std::abs(z - std::round(z.real())); }

Complex lanczos_log_gamma(Complex z) {
    const Complex zm = z - 1.0;
    Complex sum = kLanczos[0];
    for (std::size_t k = 1; k < kLanczos.size(); ++k) {
        sum += kLanczos[k] / (zm + static_cast<double>(k));
    }
    const Complex t = zm + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (zm + 0.5) * std::log(t) - t + std::log(sum);
}

// exp(sum log Gamma(num) - sum log Gamma(den)); zero when a denominator sits on a pole.
Complex gamma_ratio(std::initializer_list<Complex> num, std::initializer_list<Complex> den) {
    Complex acc = 0.0;
    for (Complex d : den) {
        if (is_nonpositive_integer(d)) return 0.0;
        acc -= log_gamma(d);
    }
    for (Complex n : num) acc += log_gamma(n);
    return std::exp(acc);
}

// A value together with the sum of the moduli of the terms that built it;
// magnitude / |value| measures the cancellation suffered.
struct Estimate {
    Complex value;
    double magnitude;

    double cancellation() const {
        const double v = std::abs(value);
        return v > 0.0 ? magnitude / v : INFINITY;
    }
};

Estimate power_series(Complex a, Complex b, Complex c, Complex z) {
    Complex term = 1.0;
    Complex sum = 1.0;
    double magnitude = 1.0;
    int small_run = 0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double dn = n;
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        magnitude += std::abs(term);
        if (term == 0.0) return {sum, magnitude};
        if (std::abs(term) <= kSeriesTol * std::abs(sum)) {
            if (++small_run == 2) return {sum, magnitude};
        } else {
            small_run = 0;
        }
    }
    throw NoConvergence(fmt::format("2F1 series did not converge at |z| = {}", std::abs(z)));
}

// a = -n with n a non-negative integer: finite polynomial.
Complex terminating_sum(Complex a, Complex b, Complex c, Complex z) {
    const int n = static_cast<int>(-a.real());
    Complex term = 1.0;
    Complex sum = 1.0;
    for (int k = 0; k < n; ++k) {
        const double dk = k;
        term *= (a + dk) * (b + dk) / ((c + dk) * (dk + 1.0)) * z;
        sum += term;
    }
    return sum;
}

Estimate scaled(Complex factor, const Estimate& e) {
    return {factor * e.value, std::abs(factor) * e.magnitude};
}

Estimate combine(const Estimate& x, const Estimate& y) {
    return {x.value + y.value, x.magnitude + y.magnitude};
}

enum class Route { Direct, Pfaff, OneMinus, Inverse, PfaffOneMinus, PfaffInverse };

// 2F1 via the 1-z connection formula; degenerate when c-a-b is an integer.
Estimate one_minus_formula(Complex a, Complex b, Complex c, Complex z) {
    const Complex w = 1.0 - z;
    const Complex s = c - a - b;
    const auto t1 = scaled(gamma_ratio({c, s}, {c - a, c - b}), power_series(a, b, 1.0 - s, w));
    const auto t2 = scaled(std::pow(w, s) * gamma_ratio({c, -s}, {a, b}),
                           power_series(c - a, c - b, 1.0 + s, w));
    return combine(t1, t2);
}

// 2F1 via the 1/z connection formula; degenerate when a-b is an integer.
Estimate inverse_formula(Complex a, Complex b, Complex c, Complex z) {
    const Complex w = 1.0 / z;
    const auto t1 = scaled(gamma_ratio({c, b - a}, {b, c - a}) * std::pow(-z, -a),
                           power_series(a, a - c + 1.0, a - b + 1.0, w));
    const auto t2 = scaled(gamma_ratio({c, a - b}, {a, c - b}) * std::pow(-z, -b),
                           power_series(b, b - c + 1.0, b - a + 1.0, w));
    return combine(t1, t2);
}

// Parameter combination whose integrality breaks the route's connection formula.
Complex degeneracy_parameter(Route route, Complex a, Complex b, Complex c) {
    switch (route) {
        case Route::OneMinus:
        case Route::PfaffInverse:
            return c - a - b;
        case Route::Inverse:
        case Route::PfaffOneMinus:
            return a - b;
        default:
            return 0.5;  // never integral
    }
}

Estimate evaluate_route(Route route, Complex a, Complex b, Complex c, Complex z) {
    switch (route) {
        case Route::Direct:
            return power_series(a, b, c, z);
        case Route::Pfaff:
            return scaled(std::pow(1.0 - z, -a), power_series(a, c - b, c, z / (z - 1.0)));
        case Route::OneMinus:
            return one_minus_formula(a, b, c, z);
        case Route::Inverse:
            return inverse_formula(a, b, c, z);
        case Route::PfaffOneMinus:
            return scaled(std::pow(1.0 - z, -a), one_minus_formula(a, c - b, c, z / (z - 1.0)));
        case Route::PfaffInverse:
            return scaled(std::pow(1.0 - z, -a), inverse_formula(a, c - b, c, z / (z - 1.0)));
    }
    return {0.0, 0.0};
}

// Even in the perturbation: (F(b+ih) + F(b-ih))/2 = F(b) + O(h^2).
Estimate perturbed_route(Route route, Complex a, Complex b, Complex c, Complex z) {
    const Complex ih(0.0, kPerturbation);
    double magnitude = 0.0;
    auto symmetric = [&](double scale) {
        const auto up = evaluate_route(route, a, b + scale * ih, c, z);
        const auto down = evaluate_route(route, a, b - scale * ih, c, z);
        magnitude = std::max({magnitude, up.magnitude, down.magnitude});
        return 0.5 * (up.value + down.value);
    };
    const Complex s1 = symmetric(1.0);
    const Complex s2 = symmetric(2.0);
    if (!is_finite(s1) || !is_finite(s2) ||
        std::abs(s1 - s2) > 1e-4 * std::max(std::abs(s1), 1e-300)) {
        throw DegenerateTransform(
            fmt::format("2F1 perturbation estimates disagree at z = ({}, {})", z.real(), z.imag()));
    }
    return {(4.0 * s1 - s2) / 3.0, magnitude};
}

Estimate taylor_continuation(Complex a, Complex b, Complex c, Complex z);

Estimate routed(Route route, Complex a, Complex b, Complex c, Complex z) {
    if (integer_distance(degeneracy_parameter(route, a, b, c)) < kDegenerateDistance) {
        return perturbed_route(route, a, b, c, z);
    }
    return evaluate_route(route, a, b, c, z);
}

Estimate dispatch(Complex a, Complex b, Complex c, Complex z) {
    struct Candidate {
        Route route;
        double modulus;
    };
    std::array<Candidate, 6> candidates{{
        {Route::Direct, std::abs(z)},
        {Route::Pfaff, std::abs(z / (z - 1.0))},
        {Route::OneMinus, std::abs(1.0 - z)},
        {Route::Inverse, std::abs(1.0 / z)},
        {Route::PfaffOneMinus, std::abs(1.0 / (1.0 - z))},
        {Route::PfaffInverse, std::abs(1.0 - 1.0 / z)},
    }};
    // inside the disc only the plain series (direct or Pfaff) are used
    const bool inside = std::abs(z) <= kDirectRadius;
    const std::size_t n_routes = inside ? 2 : candidates.size();
    std::stable_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n_routes),
                     [](const Candidate& l, const Candidate& r) { return l.modulus < r.modulus; });

    // Take the smallest mapped argument unless its terms cancel badly; then
    // try the other convergent routes and finally the ODE continuation.
    std::optional<Estimate> best;
    for (std::size_t i = 0; i < n_routes && candidates[i].modulus <= kTransformRadius; ++i) {
        Estimate e;
        try {
            e = routed(candidates[i].route, a, b, c, z);
        } catch (const NoConvergence&) {
            continue;
        } catch (const DegenerateTransform&) {
            continue;
        }
        if (!is_finite(e.value)) continue;
        if (e.cancellation() <= kAcceptableCancellation) return e;
        if (!best || e.cancellation() < best->cancellation()) best = e;
    }
    if (!inside) {
        const auto e = taylor_continuation(a, b, c, z);
        if (!best || e.cancellation() < best->cancellation()) best = e;
    }
    if (!best) throw NoConvergence(fmt::format("2F1 has no convergent route at z = ({}, {})", z.real(), z.imag()));
    return *best;
}

// Integrate the hypergeometric ODE by re-centred Taylor series along the ray
// from 0.5 z/|z| to z. Each step stays within half the radius of convergence.
// The returned magnitude accumulates the worst per-step cancellation.
Estimate taylor_continuation(Complex a, Complex b, Complex c, Complex z) {
    Complex p = 0.5 * z / std::abs(z);
    const auto start = dispatch(a, b, c, p);
    const auto start_d = dispatch(a + 1.0, b + 1.0, c + 1.0, p);
    Complex f = start.value;
    Complex df = a * b / c * start_d.value;
    double loss = std::max(start.cancellation(), start_d.cancellation());
    const Complex ab = a * b;
    const Complex r1 = -(a + b + 1.0);

    for (int step = 0; step < 64; ++step) {
        const Complex remaining = z - p;
        if (std::abs(remaining) == 0.0) return {f, loss * std::abs(f)};
        const double radius = std::min(std::abs(p), std::abs(1.0 - p));
        const double len = std::min(0.5 * radius, std::abs(remaining));
        const Complex t = remaining / std::abs(remaining) * len;

        // z(1-z) = p0 + p1 t - t^2 ; c - (a+b+1) z = r0 + r1 t
        const Complex p0 = p * (1.0 - p);
        const Complex p1 = 1.0 - 2.0 * p;
        const Complex r0 = c - (a + b + 1.0) * p;

        Complex fm1 = f;   // f_n
        Complex fm0 = df;  // f_{n+1}
        Complex tn = 1.0;  // t^n
        Complex value = f + df * t;
        Complex deriv = df;
        double value_mag = std::abs(f) + std::abs(df * t);
        double deriv_mag = std::abs(df);
        int small_run = 0;
        int n = 0;
        for (; n < kMaxTerms; ++n) {
            const double dn = n;
            const Complex next =
                -((p1 * dn + r0) * (dn + 1.0) * fm0 + (-dn * (dn - 1.0) + r1 * dn - ab) * fm1) /
                (p0 * (dn + 1.0) * (dn + 2.0));
            tn *= t;
            const Complex vterm = next * tn * t;
            const Complex dterm = (dn + 2.0) * next * tn;
            value += vterm;
            deriv += dterm;
            value_mag += std::abs(vterm);
            deriv_mag += std::abs(dterm);
            if (std::abs(vterm) <= kSeriesTol * std::abs(value) &&
                std::abs(dterm) <= kSeriesTol * std::abs(deriv)) {
                if (++small_run == 2) break;
            } else {
                small_run = 0;
            }
            fm1 = fm0;
            fm0 = next;
        }
        if (n == kMaxTerms) throw NoConvergence("2F1 Taylor continuation did not converge");
        loss = std::max({loss, value_mag / std::abs(value), deriv_mag / std::abs(deriv)});
        p += t;
        f = value;
        df = deriv;
    }
    throw NoConvergence("2F1 Taylor continuation exceeded its step budget");
}

}  // namespace

Complex log_gamma(Complex z) {
    if (!is_finite(z)) throw PoleError("log_gamma of a non-finite argument");
    if (is_nonpositive_integer(z)) {
        throw PoleError(fmt::format("log_gamma pole at {}", z.real()));
    }
    if (z.real() >= 0.5) return lanczos_log_gamma(z);
    // shift into the Lanczos half-plane; the sum of principal logs keeps the
    // result on the principal branch
    const int shift = static_cast<int>(std::ceil(0.5 - z.real()));
    Complex correction = 0.0;
    for (int k = 0; k < shift; ++k) correction += std::log(z + static_cast<double>(k));
    return lanczos_log_gamma(z + static_cast<double>(shift)) - correction;
}

Complex gauss_2f1(const Hyp2F1Params& p) {
    Complex a = p.a;
    Complex b = p.b;
    const Complex c = p.c;
    const Complex z = p.z;
    if (!is_finite(a) || !is_finite(b) || !is_finite(c) || !is_finite(z)) {
        throw NoConvergence("2F1 called with non-finite arguments");
    }
    // canonical ordering keeps the a <-> b symmetry exact
    if (std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag())) std::swap(a, b);

    if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;

    const bool a_terminates = is_nonpositive_integer(a);
    const bool b_terminates = is_nonpositive_integer(b);
    if (is_nonpositive_integer(c)) {
        const double order = std::min(a_terminates ? -a.real() : INFINITY,
                                      b_terminates ? -b.real() : INFINITY);
        if (!(order < -c.real())) {
            throw CPoleError(fmt::format("2F1 with c = {} and a non-terminating series", c.real()));
        }
    }
    if (a_terminates || b_terminates) {
        const Complex top = a_terminates && (!b_terminates || a.real() >= b.real()) ? a : b;
        const Complex other = top == a ? b : a;
        return terminating_sum(top, other, c, z);
    }

    if (z == 1.0) {
        if ((c - a - b).real() <= 0.0) throw NoConvergence("2F1 diverges at z = 1");
        return gamma_ratio({c, c - a - b}, {c - a, c - b});
    }
    return dispatch(a, b, c, z).value;
}

Complex gauss_2f1_derivative(const Hyp2F1Params& p) {
    if (p.a == 0.0 || p.b == 0.0) return 0.0;
    if (p.c == 0.0) throw CPoleError("2F1 derivative with c = 0");
    Complex a = p.a;
    Complex b = p.b;
    if (std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag())) std::swap(a, b);
    return a * b / p.c * gauss_2f1({a + 1.0, b + 1.0, p.c + 1.0, p.z});
}

}  // namespace kgscatter
