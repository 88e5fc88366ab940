#include "kgscatter/bound_states.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kgscatter/errors.hpp"

namespace kgscatter {

namespace {

constexpr int kNodeSamples = 3000;
constexpr double kPairingTolerance = 1e-6;

}  // namespace

BoundKinematics bound_kinematics(double energy, const WellParams& w) {
    validate(w);
    const double m = w.mass;
    if (!(std::abs(energy) < m)) {
        throw OutOfWell(fmt::format("E = {} is outside the gap (-m, m)", energy));
    }
    const double kappa2 = m * m - energy * energy;
    const double kappa = std::sqrt(kappa2);
    const double a2 = w.alpha * w.alpha;

    // |z|^s = q^s e^{+-2 alpha s x} decays outward on its half-line iff Re s > 0
    Complex mu1 = Complex(-kappa / (2.0 * w.alpha), 0.0);
    if (mu1.real() <= 0.0) mu1 = -mu1;

    const double coupling = -w.v0 * (energy + m) / (4.0 * a2 * w.q);
    BoundKinematics kin{};
    kin.energy = energy;
    kin.kappa = kappa;
    kin.mu1 = mu1;
    kin.delta1 = mu1;
    kin.nu1 = 0.5 - 0.5 * std::sqrt(Complex(1.0 - 4.0 * coupling, 0.0));
    kin.coefficients = {-kappa2 / (4.0 * a2), coupling + kappa2 / (2.0 * a2), -kappa2 / (4.0 * a2)};
    return kin;
}

WaveSample bound_left(const BoundKinematics& kin, const WellParams& w, double x) {
    return hypergeometric_branch(kin.mu1, kin.nu1, kin.delta1, w.q, w.alpha, x, HalfLine::Left);
}

WaveSample bound_right(const BoundKinematics& kin, const WellParams& w, double x) {
    return hypergeometric_branch(kin.mu1, kin.nu1, kin.delta1, w.q, w.alpha, x, HalfLine::Right);
}

double quantization_residual(double energy, const WellParams& w) {
    const auto kin = bound_kinematics(energy, w);
    const auto left = bound_left(kin, w, 0.0);
    const auto right = bound_right(kin, w, 0.0);
    const Complex wronskian = left.psi * right.dpsi - left.dpsi * right.psi;
    return wronskian.real() / std::max(1.0, std::abs(left.psi * right.psi));
}

int count_nodes(double energy, const WellParams& w) {
    const auto kin = bound_kinematics(energy, w);
    const auto origin = bound_left(kin, w, 0.0);
    // the even well makes the matched state parity-definite
    const bool odd = std::abs(origin.psi) * w.alpha < std::abs(origin.dpsi);

    const double extent = 30.0 / w.alpha;
    int changes = 0;
    double previous = 0.0;
    for (int j = 0; j < kNodeSamples; ++j) {
        const double x = -extent + extent * j / kNodeSamples;
        const double v = bound_left(kin, w, x).psi.real();
        if (v != 0.0) {
            if (previous != 0.0 && (v < 0.0) != (previous < 0.0)) ++changes;
            previous = v;
        }
    }
    return 2 * changes + (odd ? 1 : 0);
}

BoundStateResult find_bound_states(const WellParams& w, const BoundSearchOptions& options) {
    validate(w);
    if (options.grid_n < 64) throw BadRange(fmt::format("grid_n = {} is below 64", options.grid_n));
    BoundStateResult out;
    if (w.v0 == 0.0) return out;

    const double m = w.mass;
    const double eps = 1e-6 * m;
    const double lo = -m + eps;
    const double hi = m - eps;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto residual = [&](double e) {
        try {
            return quantization_residual(e, w);
        } catch (const Error&) {
            return nan;
        }
    };

    double e_prev = lo;
    double f_prev = residual(lo);
    for (int i = 1; i < options.grid_n; ++i) {
        const double e = i == options.grid_n - 1 ? hi : lo + (hi - lo) * i / (options.grid_n - 1);
        const double f = residual(e);
        const bool usable = std::isfinite(f) && std::isfinite(f_prev) && f_prev != 0.0;
        if (usable && (f == 0.0 || (f_prev < 0.0) != (f < 0.0))) {
            double a = e_prev, b = e, fa = f_prev;
            bool failed = false;
            while (b - a > 1e-10 * m) {
                const double mid = 0.5 * (a + b);
                const double fm = residual(mid);
                if (!std::isfinite(fm)) {
                    failed = true;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double root = f == 0.0 ? e : 0.5 * (a + b);
            const double r = failed ? nan : residual(root);
            // a jump rather than a zero leaves a large residual behind
            if (failed || !std::isfinite(r) ||
                std::abs(r) > 1e-6 * std::max(std::abs(f_prev), std::abs(f))) {
                out.lost.push_back(fmt::format("bracket [{:.17g}, {:.17g}]", e_prev, e));
            } else {
                out.energies.push_back(root);
                out.residuals.push_back(std::abs(r));
                out.node_counts.push_back(count_nodes(root, w));
            }
        } else if (!std::isfinite(f)) {
            out.lost.push_back(fmt::format("residual not finite at E = {:.17g}", e));
        }
        e_prev = e;
        f_prev = f;
    }

    if (options.cross_validate) {
        const auto numeric =
            oracle::find_bound_states_numeric(w, options.oracle_config, options.grid_n);
        for (double e : out.energies) {
            std::optional<double> match;
            std::optional<int> nodes;
            for (const auto& s : numeric) {
                if (std::abs(s.energy - e) < kPairingTolerance * m &&
                    (!match || std::abs(s.energy - e) < std::abs(*match - e))) {
                    match = s.energy;
                    nodes = s.nodes;
                }
            }
            out.oracle_energies.push_back(match);
            out.oracle_node_counts.push_back(nodes);
        }
    }
    return out;
}

std::pair<double, double> nonrelativistic_map(double energy, double mass) {
    return {energy - mass, energy + mass};
}

}  // namespace kgscatter
