#include "kgscatter/scattering.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "kgscatter/errors.hpp"

namespace kgscatter {

WaveSample hypergeometric_branch(Complex s, Complex nu, Complex delta, double q, double alpha,
                                 double x, HalfLine side) {
    const double sigma = side == HalfLine::Left ? 1.0 : -1.0;  // dz/dx = sigma 2 alpha z
    const double log_abs_z = std::log(q) + sigma * 2.0 * alpha * x;
    const double z = -std::exp(log_abs_z);

    const Hyp2F1Params hp{s + nu + delta, s + nu - delta, 1.0 + 2.0 * s, z};
    const Complex f = gauss_2f1(hp);
    const Complex df = gauss_2f1_derivative(hp);
    const Complex prefactor = std::exp(s * log_abs_z + nu * std::log(1.0 - z));

    const Complex psi = prefactor * f;
    const Complex dpsi =
        sigma * 2.0 * alpha * prefactor * ((s - nu * z / (1.0 - z)) * f + z * df);
    return {x, psi, dpsi};
}

ScatterKinematics kinematics(double energy, const PotentialParams& p) {
    validate(p);
    const double m = p.mass;
    if (energy < -m) {
        throw BadRange(fmt::format("E = {} lies in the antiparticle sector", energy));
    }
    if (std::abs(energy) <= m) {
        throw SubBarrierEnergy(fmt::format("E = {} is not above the mass gap |E| > {}", energy, m));
    }
    const double k2 = energy * energy - m * m;
    const double k = std::sqrt(k2);
    const double a2 = p.alpha * p.alpha;
    const double coupling = 2.0 * (energy + m) * p.lambda * (p.lambda - 1.0) / (a2 * p.q);

    ScatterKinematics kin{};
    kin.energy = energy;
    kin.k = k;
    kin.mu = Complex(0.0, k / (2.0 * p.alpha));
    kin.delta = kin.mu;
    kin.radicand = 1.0 - 4.0 * coupling;
    kin.nu = 0.5 - 0.5 * std::sqrt(Complex(kin.radicand, 0.0));
    kin.mu_right = kin.mu;
    kin.nu_right = kin.nu;
    kin.delta_right = kin.delta;
    kin.coefficients = {k2 / (4.0 * a2), coupling - k2 / (2.0 * a2), k2 / (4.0 * a2)};
    return kin;
}

WaveSample psi_left(const ScatterKinematics& kin, const PotentialParams& p, double x, Complex coeff_a,
                    Complex coeff_b) {
    WaveSample out{x, 0.0, 0.0};
    for (auto [coeff, s] : {std::pair{coeff_a, kin.mu}, std::pair{coeff_b, -kin.mu}}) {
        if (coeff == 0.0) continue;
        const auto w = hypergeometric_branch(s, kin.nu, kin.delta, p.q, p.alpha, x, HalfLine::Left);
        out.psi += coeff * w.psi;
        out.dpsi += coeff * w.dpsi;
    }
    return out;
}

WaveSample psi_right(const ScatterKinematics& kin, const PotentialParams& p, double x,
                     Complex coeff_c, Complex coeff_d) {
    WaveSample out{x, 0.0, 0.0};
    for (auto [coeff, s] : {std::pair{coeff_c, kin.mu_right}, std::pair{coeff_d, -kin.mu_right}}) {
        if (coeff == 0.0) continue;
        const auto w = hypergeometric_branch(s, kin.nu_right, kin.delta_right, p.q, p.alpha, x,
                                             HalfLine::Right);
        out.psi += coeff * w.psi;
        out.dpsi += coeff * w.dpsi;
    }
    return out;
}

ScatteringResult solve_matching(double energy, const PotentialParams& p) {
    const auto kin = kinematics(energy, p);
    const auto incident = psi_left(kin, p, 0.0, 1.0, 0.0);
    const auto reflected = psi_left(kin, p, 0.0, 0.0, 1.0);
    const auto transmitted = psi_right(kin, p, 0.0, 0.0, 1.0);

    // B reflected - D transmitted = -incident, for psi and psi'
    const Complex det = transmitted.psi * reflected.dpsi - reflected.psi * transmitted.dpsi;
    const double scale =
        std::abs(transmitted.psi * reflected.dpsi) + std::abs(reflected.psi * transmitted.dpsi);
    if (!(std::abs(det) > 1e-13 * scale)) {
        throw SingularMatching(fmt::format("matching system singular at E = {}", energy));
    }
    const Complex b = (incident.psi * transmitted.dpsi - transmitted.psi * incident.dpsi) / det;
    const Complex d = (incident.psi * reflected.dpsi - reflected.psi * incident.dpsi) / det;

    // every branch has a unit-modulus asymptotic amplitude and the same k on both sides
    const double r = std::norm(b);
    const double t = std::norm(d);
    return {b, d, r, t, std::abs(r + t - 1.0)};
}

double current_density(const WaveSample& w, double mass) {
    return (std::conj(w.psi) * w.dpsi).imag() / mass;
}

std::vector<SweepRow> sweep(const PotentialParams& p, std::span<const double> energies,
                            unsigned threads) {
    std::vector<SweepRow> rows(energies.size());
    auto solve_one = [&](std::size_t i) {
        rows[i].energy = energies[i];
        try {
            rows[i].result = solve_matching(energies[i], p);
        } catch (const Error& e) {
            rows[i].error = e.what();
        }
    };

    if (threads <= 1 || energies.size() < 2) {
        for (std::size_t i = 0; i < energies.size(); ++i) solve_one(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const auto n_workers = std::min<std::size_t>(threads, energies.size());
    for (std::size_t t = 0; t < n_workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < energies.size(); i = next++) solve_one(i);
        });
    }
    pool.clear();  // join
    return rows;
}

}  // namespace kgscatter
