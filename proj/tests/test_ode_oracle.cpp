#include <doctest.h>

#include <cmath>
#include <random>

#include "kgscatter/errors.hpp"
#include "kgscatter/ode_oracle.hpp"
#include "test_support.hpp"

using namespace kgscatter;
using namespace kgscatter::oracle;
using testing::uniform;

TEST_CASE("integrate_scattering: free particle") {
    for (double e : {1.01, 2.0, 7.0}) {
        const auto r = integrate_scattering(e, {0.0, 1.0, 1.0, 1.0});
        CHECK(std::abs(r.reflection) < 1e-10);
        CHECK(std::abs(r.transmission - 1.0) < 1e-10);
    }
}

TEST_CASE("integrate_scattering: reference value") {
    const auto& g = testing::golden()["scatter_m1_a1_q1_l2_E1p5"];
    const auto r = integrate_scattering(1.5, {2.0, 1.0, 1.0, 1.0});
    CHECK(std::abs(r.reflection - g["R_direct"].get<double>()) < 1e-8);
    CHECK(std::abs(r.transmission - g["T_direct"].get<double>()) < 1e-8);
}

TEST_CASE("integrate_scattering: flux conservation, tolerance and box stability") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 10; ++i) {
        const PotentialParams p{uniform(rng, 1.2, 4.0), uniform(rng, 0.5, 5.0), uniform(rng, 0.5, 3.0), 1.0};
        const double e = uniform(rng, 1.001, 4.0);
        const auto base = integrate_scattering(e, p);
        INFO("lambda=" << p.lambda << " q=" << p.q << " alpha=" << p.alpha << " E=" << e);
        CHECK(std::abs(base.reflection + base.transmission - 1.0) < 1e-8);

        IntegrationConfig fine;
        fine.rel_tol *= 0.5;
        fine.max_steps *= 2;
        const auto tight = integrate_scattering(e, p, fine);
        CHECK(std::abs(tight.reflection - base.reflection) < 1e-8);
        CHECK(std::abs(tight.transmission - base.transmission) < 1e-8);

        IntegrationConfig wide;
        wide.x_box = 1.5 * default_box(p.alpha, std::sqrt(e * e - 1.0));
        const auto big = integrate_scattering(e, p, wide);
        CHECK(std::abs(big.reflection - base.reflection) < 1e-8);
        CHECK(std::abs(big.transmission - base.transmission) < 1e-8);
    }
}

TEST_CASE("integrate_scattering: errors") {
    const PotentialParams p{2.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(integrate_scattering(0.5, p), SubBarrierEnergy);
    IntegrationConfig small;
    small.x_box = 2.0;
    CHECK_THROWS_AS(integrate_scattering(1.5, p, small), BoxTooSmall);
    IntegrationConfig starved;
    starved.max_steps = 10;
    CHECK_THROWS_AS(integrate_scattering(1.5, p, starved), StepLimit);
    CHECK(default_box(0.5, 2.0) == doctest::Approx(40.0));
    CHECK(default_box(2.0, 0.25) == doctest::Approx(80.0));
}

TEST_CASE("shoot_bound_state: free solutions") {
    const WellParams free{0.0, 1.0, 1.0, 1.0};
    for (double e : {-0.9, -0.2, 0.5, 0.95}) {
        const auto s = shoot_bound_state(e, free);
        const double kappa = std::sqrt(1.0 - e * e);
        CHECK(s.log_derivative_mismatch == doctest::Approx(2.0 * kappa).epsilon(1e-8));
        CHECK(std::abs(s.mismatch) > 0.1 * kappa);
    }
    CHECK(find_bound_states_numeric(free).empty());
    CHECK_THROWS_AS(find_bound_states_numeric({10.0, 1.0, 1.0, 1.0}, {}, 10), BadRange);
    CHECK_THROWS_AS(shoot_bound_state(1.0, free), OutOfWell);
}

TEST_CASE("shooting: reference spectra, node counts, self-convergence") {
    for (const auto& [key, levels] : testing::golden()["bound_m1_a1_q1"].items()) {
        const WellParams w{std::stod(key), 1.0, 1.0, 1.0};
        const auto want = levels.get<std::vector<double>>();
        const auto got = find_bound_states_numeric(w);
        INFO("v0 = " << w.v0);
        REQUIRE(got.size() == want.size());
        for (std::size_t n = 0; n < got.size(); ++n) {
            CHECK(std::abs(got[n].energy - want[n]) < 1e-8);
            CHECK(got[n].nodes == static_cast<int>(n));
        }
        // even ground state: the log-derivatives agree, so their mismatch vanishes
        const auto ground = shoot_bound_state(got[0].energy, w);
        CHECK(std::abs(ground.log_derivative_mismatch) < 1e-6);

        IntegrationConfig fine;
        fine.rel_tol *= 0.5;
        fine.max_steps *= 2;
        const auto tight = find_bound_states_numeric(w, fine);
        REQUIRE(tight.size() == got.size());
        for (std::size_t n = 0; n < got.size(); ++n) CHECK(std::abs(tight[n].energy - got[n].energy) < 1e-8);
    }
}
