#include "doctest.h"

#include <cmath>

#include "cavfgr/correlators.hpp"
#include "cavfgr/error.hpp"
#include "cavfgr/oracle.hpp"

using namespace cavfgr;

TEST_SUITE("oracle") {

TEST_CASE("thermal state diagnostics") {
    const DisplacedHarmonicModel m({1.0}, {1.0}, {1.0}, 0.0, 1.0, 0.0, 1.0);
    FockOracle o(m, ThermalEnv{1.0}, Direction::forward, 40);
    CHECK(o.dimension() == 41);
    CHECK(o.thermal_trace_error() < 1e-13);
    CHECK(o.thermal_min_eigenvalue() > -1e-13);
    CHECK(std::abs(o.corr(3.0, 0.0) - 1.0) < 1e-12);
}

TEST_CASE("single mode matches the closed form in both directions") {
    const DisplacedHarmonicModel m({1.0}, {1.0}, {1.0}, 0.4, 1.0, 0.0, 1.0);
    const ThermalEnv env{1.0};
    const std::vector<double> ts{0.0, 2.0, 6.0}, taus{0.0, 0.5, 3.0, 6.0};
    for (auto dir : {Direction::forward, Direction::backward}) {
        const auto ref = fock_corr_grid(m, env, dir, ts, taus, {});
        std::size_t n = 0;
        for (double t : ts) {
            for (double tau : taus) {
                const auto c = nuclear_corr(m, env, dir, t, tau);
                CHECK(std::abs(c - ref[n++]) <= 1e-8 * std::abs(c));
            }
        }
    }
}

TEST_CASE("low-temperature equilibrium lineshape") {
    const DisplacedHarmonicModel m({1.0}, {0.8}, {0.0}, 0.0, 1.0, 0.0, 1.0);
    for (double tau : {0.5, 2.0}) {
        const auto o = fock_nuclear_corr(m, ThermalEnv{20.0}, Direction::forward, 0.0, tau, {});
        const std::complex<double> expected = std::exp(-0.32 * (1.0 - std::exp(std::complex<double>(0.0, -tau))));
        CHECK(std::abs(o - expected) < 1e-6);
    }
}

TEST_CASE("oracle rate at t = 0 and out-of-box models") {
    const DisplacedHarmonicModel m({1.0}, {1.0}, {0.5}, 0.0, 1.0, 0.0, 1.0);
    CHECK(oracle_rate(m, ThermalEnv{1.0}, Direction::forward, 0.0, {}) == 0.0);
    const DisplacedHarmonicModel fast({5.0}, {1.0}, {0.5}, 0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS((void)fock_nuclear_corr(fast, ThermalEnv{1.0}, Direction::forward, 1.0, 1.0, {}), ConfigError);
    const DisplacedHarmonicModel three({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, 0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS((void)fock_nuclear_corr(three, ThermalEnv{1.0}, Direction::forward, 1.0, 1.0, {}), ConfigError);
}

TEST_CASE("an under-sized basis is detected") {
    const DisplacedHarmonicModel m({1.0}, {2.0}, {2.0}, 0.0, 1.0, 0.0, 1.0);
    FockConfig fc;
    fc.n_max = 10;
    fc.check_increment = 2;
    CHECK_THROWS_AS((void)fock_nuclear_corr(m, ThermalEnv{0.5}, Direction::forward, 5.0, 3.0, fc), NumericalError);
}

}
