#include "kgscatter/ode_oracle.hpp"

#include <array>
#include <cmath>
#include <complex>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "kgscatter/errors.hpp"

namespace kgscatter::oracle {

namespace odeint = boost::numeric::odeint;

namespace {

using ComplexState = std::array<double, 4>;  // Re a+, Im a+, Re a-, Im a-
using RealState = std::array<double, 2>;

constexpr double kRenormThreshold = 1e100;

// Adaptive Dormand-Prince integration from x0 to x1 with |dx| <= max_step, so
// flat stretches cannot carry a step across the barrier. on_step(x, y) runs
// after every accepted step and returns true when it rescaled y.
template <class State, class System, class OnStep>
void integrate_between(const System& system, State& y, double x0, double x1, double max_step,
                       const IntegrationConfig& cfg, long& steps, OnStep&& on_step) {
    auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_dopri5<State>());
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    double x = x0;
    double dx = dir * std::min(1e-3, span);
    long rejected = 0;
    while (dir * (x1 - x) > 0.0) {
        if (std::abs(dx) > max_step) dx = dir * max_step;
        if (dir * (x + dx - x1) > 0.0) dx = x1 - x;
        if (odeint::controlled_step_result::success ==
            stepper.try_step(system, y, x, dx)) {
            if (++steps > cfg.max_steps) {
                throw StepLimit(fmt::format("integration exceeded {} steps", cfg.max_steps));
            }
            if (std::abs(x1 - x) <= 1e-13 * std::max(1.0, std::abs(x1))) x = x1;
            if (on_step(x, y)) stepper.reset();
        } else if (++rejected > cfg.max_steps) {
            throw StepLimit("integration step size collapsed");
        }
    }
}

void require_box(double box, double alpha, double coupling_at_box, double k2) {
    if (!(box > 0.0)) throw BoxTooSmall("integration box must be positive");
    if (alpha * box < 20.0 && std::abs(coupling_at_box) >= 1e-12 * std::abs(k2)) {
        throw BoxTooSmall(fmt::format("box L = {} leaves the potential unresolved", box));
    }
}

}  // namespace

double default_box(double alpha, double wavenumber) {
    return std::max(20.0 / alpha, 20.0 / wavenumber);
}

ScatteringEstimate integrate_scattering(double energy, const PotentialParams& p,
                                        const IntegrationConfig& cfg) {
    validate(p);
    const double m = p.mass;
    if (std::abs(energy) <= m || energy < -m) {
        throw SubBarrierEnergy(fmt::format("E = {} is not a scattering energy", energy));
    }
    const double k2 = energy * energy - m * m;
    const double k = std::sqrt(k2);
    const double box = cfg.x_box > 0.0 ? cfg.x_box : default_box(p.alpha, k);
    const double factor = 2.0 * (energy + m);
    require_box(box, p.alpha, factor * evaluate(p, box), k2);

    // Variation of constants: psi = a+ e^{ikx} + a- e^{-ikx} with
    // psi' = ik (a+ e^{ikx} - a- e^{-ikx}), so the amplitudes only move where V != 0.
    const std::complex<double> ik(0.0, k);
    auto system = [&](const ComplexState& y, ComplexState& dy, double x) {
        const std::complex<double> ap(y[0], y[1]), am(y[2], y[3]);
        const auto phase = std::exp(ik * x);
        const auto psi = ap * phase + am / phase;
        const auto source = factor * evaluate(p, x) * psi / (2.0 * ik);
        const auto dap = source / phase;
        const auto dam = -source * phase;
        dy = {dap.real(), dap.imag(), dam.real(), dam.imag()};
    };

    // pure transmitted wave e^{ikx} at +L
    ComplexState y{1.0, 0.0, 0.0, 0.0};

    struct Amplitudes {
        std::complex<double> incoming, outgoing;
    };
    auto decompose = [&](const ComplexState& s, double x) {
        const std::complex<double> ap(s[0], s[1]), am(s[2], s[3]);
        const auto phase = std::exp(ik * x);
        const auto psi = ap * phase + am / phase;
        const auto dpsi = ik * (ap * phase - am / phase);
        return Amplitudes{0.5 * (psi + dpsi / ik) / phase, 0.5 * (psi - dpsi / ik) * phase};
    };

    const double max_step = 0.1 / p.alpha;
    long steps = 0;
    auto no_op = [](double, ComplexState&) { return false; };
    const double probe = -box + 0.05 * box;
    integrate_between(system, y, box, probe, max_step, cfg, steps, no_op);
    const auto inner = decompose(y, probe);
    integrate_between(system, y, probe, -box, max_step, cfg, steps, no_op);
    const auto outer = decompose(y, -box);

    const double drift = std::abs(outer.incoming - inner.incoming) + std::abs(outer.outgoing - inner.outgoing);
    if (drift > 1e-8 * std::abs(outer.incoming)) {
        throw BoxTooSmall(fmt::format("asymptotic amplitudes drift by {} near x = -L", drift));
    }
    const double inc2 = std::norm(outer.incoming);
    return {std::norm(outer.outgoing) / inc2, 1.0 / inc2};
}

ShootResult shoot_bound_state(double energy, const WellParams& w, const IntegrationConfig& cfg) {
    validate(w);
    const double m = w.mass;
    if (!(std::abs(energy) < m)) {
        throw OutOfWell(fmt::format("E = {} is outside the gap (-m, m)", energy));
    }
    const double kappa2 = m * m - energy * energy;
    const double kappa = std::sqrt(kappa2);
    const double box = cfg.x_box > 0.0 ? cfg.x_box : default_box(w.alpha, kappa);
    const double factor = 2.0 * (energy + m);
    require_box(box, w.alpha, factor * well_evaluate(w, box), kappa2);

    auto system = [&](const RealState& y, RealState& dy, double x) {
        dy[0] = y[1];
        dy[1] = (factor * well_evaluate(w, x) + kappa2) * y[0];
    };

    struct Side {
        RealState y;
        int sign_changes = 0;
        double last_interior = 0.0;  // psi at the last accepted point before x = 0
    };
    long steps = 0;
    auto run = [&](double from, double start_slope) {
        Side side{{1.0, start_slope}};
        double previous = 1.0;
        integrate_between(system, side.y, from, 0.0, 0.1 / w.alpha, cfg, steps, [&](double x, RealState& y) {
            if (x != 0.0) {
                if ((y[0] < 0.0) != (previous < 0.0) && y[0] != 0.0) ++side.sign_changes;
                if (y[0] != 0.0) previous = y[0];
                side.last_interior = previous;
            }
            const double norm = std::abs(y[0]) + std::abs(y[1]) / m;
            if (norm > kRenormThreshold) {
                y[0] /= norm;
                y[1] /= norm;
                previous /= norm;
                side.last_interior = previous;
                return true;
            }
            return false;
        });
        return side;
    };
    const Side left = run(-box, kappa);
    const Side right = run(box, -kappa);

    const double psi_l = left.y[0], dpsi_l = left.y[1];
    const double psi_r = right.y[0], dpsi_r = right.y[1];
    const double norm_l = std::hypot(psi_l, dpsi_l / m);
    const double norm_r = std::hypot(psi_r, dpsi_r / m);

    ShootResult out{};
    out.mismatch = (dpsi_l * psi_r - psi_l * dpsi_r) / (m * norm_l * norm_r);
    out.log_derivative_mismatch = dpsi_l / psi_l - dpsi_r / psi_r;

    // glue psi_R onto psi_L; the sign of the scale factor comes from whichever
    // of psi(0), psi'(0) carries most of the phase-plane norm
    const bool value_dominated = std::abs(psi_l) / norm_l >= std::abs(dpsi_l) / (m * norm_l);
    const double glue_sign = value_dominated ? (psi_l * psi_r >= 0.0 ? 1.0 : -1.0)
                                             : (dpsi_l * dpsi_r >= 0.0 ? 1.0 : -1.0);
    const bool junction_node = (left.last_interior < 0.0) != (glue_sign * right.last_interior < 0.0);
    out.nodes = left.sign_changes + right.sign_changes + (junction_node ? 1 : 0);
    return out;
}

std::vector<NumericBoundState> find_bound_states_numeric(const WellParams& w,
                                                         const IntegrationConfig& cfg, int grid_n) {
    validate(w);
    if (grid_n < 64) throw BadRange(fmt::format("grid_n = {} is below 64", grid_n));
    std::vector<NumericBoundState> out;
    if (w.v0 == 0.0) return out;

    const double m = w.mass;
    const double eps = 1e-6 * m;
    const double lo = -m + eps;
    const double hi = m - eps;
    auto mismatch = [&](double e) { return shoot_bound_state(e, w, cfg).mismatch; };

    double e_prev = lo;
    double f_prev = mismatch(lo);
    for (int i = 1; i < grid_n; ++i) {
        const double e = i == grid_n - 1 ? hi : lo + (hi - lo) * i / (grid_n - 1);
        const double f = mismatch(e);
        if (f_prev != 0.0 && (f == 0.0 || (f_prev < 0.0) != (f < 0.0))) {
            double a = e_prev, b = e, fa = f_prev;
            while (b - a > 1e-10 * m) {
                const double mid = 0.5 * (a + b);
                const double fm = mismatch(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double root = f == 0.0 ? e : 0.5 * (a + b);
            out.push_back({root, shoot_bound_state(root, w, cfg).nodes});
        }
        e_prev = e;
        f_prev = f;
    }
    return out;
}

}  // namespace kgscatter::oracle
