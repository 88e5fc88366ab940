#include "kgscatter/potential.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kgscatter/errors.hpp"

namespace kgscatter {

double shape(double q, double alpha, double x) {
    // the x < 0 branch e^{2 alpha x}/(1 + q e^{2 alpha x})^2 is the mirror of x > 0
    const double u = std::exp(-2.0 * alpha * std::abs(x));
    const double d = 1.0 + q * u;
    return u / (d * d);
}

double evaluate(const PotentialParams& p, double x) { return p.strength() * shape(p.q, p.alpha, x); }

double well_evaluate(const WellParams& w, double x) { return w.strength() * shape(w.q, w.alpha, x); }

std::vector<ProfilePoint> profile(const std::variant<PotentialParams, WellParams>& params,
                                  double x_min, double x_max, int n) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw BadRange(fmt::format("profile range [{}, {}] is empty", x_min, x_max));
    }
    if (n < 2) throw BadRange(fmt::format("profile needs at least 2 samples, got {}", n));

    std::vector<ProfilePoint> out;
    out.reserve(static_cast<std::size_t>(n));
    const double dx = (x_max - x_min) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = i == n - 1 ? x_max : x_min + i * dx;
        const double v = std::visit(
            [x](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, PotentialParams>) {
                    return evaluate(p, x);
                } else {
                    return well_evaluate(p, x);
                }
            },
            params);
        out.push_back({x, v});
    }
    return out;
}

void validate(const PotentialParams& p) {
    if (!(p.q > 0.0) || !(p.alpha > 0.0) || !(p.mass > 0.0) || !std::isfinite(p.lambda)) {
        throw BadRange(fmt::format("invalid barrier parameters (lambda={}, q={}, alpha={}, m={})",
                                   p.lambda, p.q, p.alpha, p.mass));
    }
}

void validate(const WellParams& w) {
    if (!(w.v0 >= 0.0) || !(w.q > 0.0) || !(w.alpha > 0.0) || !(w.mass > 0.0)) {
        throw BadRange(fmt::format("invalid well parameters (v0={}, q={}, alpha={}, m={})", w.v0,
                                   w.q, w.alpha, w.mass));
    }
}

}  // namespace kgscatter
