#include "doctest.h"

#include <cmath>

#include "cavfgr/bath.hpp"
#include "cavfgr/error.hpp"
#include "cavfgr/optimizer.hpp"

using namespace cavfgr;

TEST_SUITE("optimizer") {

TEST_CASE("optimized cavity frequencies for the GOA model") {
    struct Cell { double kT, omega_DA, expected; };
    const Cell cells[] = {{1.0, 0.0, 0.961}, {0.2, 2.0, 1.731}};
    for (const auto& c : cells) {
        const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, c.omega_DA));
        const auto r = optimize_omega_p(m, ThermalEnv::from_kT(c.kT), 1.0, {});
        CHECK(std::abs(r.omega_p_star - c.expected) <= 0.05);
        CHECK_FALSE(r.at_bound);
        CHECK(r.objective > 1.0);
    }
}

TEST_CASE("zero coupling gives a flat objective") {
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 0.0));
    const auto r = optimize_omega_p(m, ThermalEnv{1.0}, 0.0, {});
    CHECK(r.flat);
    CHECK(r.enhancement == 1.0);
    CHECK(r.objective == 1.0);
}

TEST_CASE("the optimum does not depend on Gamma or the bath discretization") {
    const GOASpec spec = GOASpec::reference(1.0, 0.0, 2.0);
    const auto base = optimize_omega_p(goa_to_normal_modes(spec), ThermalEnv{2.0}, 1.0, {});
    const auto scaled = optimize_omega_p(goa_to_normal_modes(spec).with_gamma(3.0), ThermalEnv{2.0}, 1.0, {});
    CHECK(scaled.omega_p_star == doctest::Approx(base.omega_p_star).epsilon(1e-3));
    GOASpec coarse = spec;
    coarse.n_secondary = 20;
    const auto few = optimize_omega_p(goa_to_normal_modes(coarse), ThermalEnv{2.0}, 1.0, {});
    CHECK(few.omega_p_star == doctest::Approx(base.omega_p_star).epsilon(1e-3));
}

TEST_CASE("quantum objective runs and stays near the marcus optimum at high temperature") {
    GOASpec spec = GOASpec::reference(5.0, 0.0, 0.0);
    spec.n_secondary = 40;
    OptimizerOptions o;
    o.method = OptimizeMethod::quantum;
    o.scan_points = 40;
    const auto q = optimize_omega_p(goa_to_normal_modes(spec), ThermalEnv{1.0}, 1.0, o);
    CHECK(q.method == OptimizeMethod::quantum);
    CHECK(q.omega_p_star > 0.5);
    CHECK(q.omega_p_star < 1.5);
}

TEST_CASE("bad options") {
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 0.0));
    OptimizerOptions o;
    o.lo = 2.0;
    o.hi = 1.0;
    CHECK_THROWS_AS((void)optimize_omega_p(m, ThermalEnv{1.0}, 1.0, o), ConfigError);
    CHECK_THROWS_AS((void)optimize_method_from_string("newton"), ConfigError);
}

}
