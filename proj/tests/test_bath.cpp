#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cavfgr/bath.hpp"
#include "cavfgr/error.hpp"

using namespace cavfgr;

TEST_SUITE("bath") {

TEST_CASE("single secondary mode sits at omega_c ln 2") {
    const auto b = discretize_ohmic(1.0, 1.0, 1);
    REQUIRE(b.freqs.size() == 1);
    CHECK(b.freqs[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("sum rule holds for every discretization") {
    for (int n : {1, 10, 200, 1000}) {
        for (double eta : {0.5, 1.0, 5.0}) {
            const auto b = discretize_ohmic(eta, 1.3, n);
            CHECK(std::abs(b.sum_rule() - eta * 1.3 / std::numbers::pi) <= 1e-12 * eta * 1.3 / std::numbers::pi);
        }
    }
}

TEST_CASE("zero friction decouples the bath") {
    const auto b = discretize_ohmic(0.0, 1.0, 5);
    for (double c : b.couplings) CHECK(c == 0.0);
    GOASpec spec;
    spec.eta = 0.0;
    spec.n_secondary = 5;
    const auto m = goa_to_normal_modes(spec);
    int carriers = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (std::abs(m.da_shifts()[j]) > 1e-12) {
            ++carriers;
            CHECK(m.mode_freqs()[j] == doctest::Approx(0.5));
            CHECK(std::abs(m.da_shifts()[j]) == doctest::Approx(2.0));
        }
    }
    CHECK(carriers == 1);
}

TEST_CASE("reorganization energy is friction independent") {
    for (double eta : {0.5, 1.0, 5.0}) {
        const auto m = goa_to_normal_modes(GOASpec::reference(eta, 1.0, 0.0));
        CHECK(m.size() == 201);
        CHECK(std::abs(reorganization_energy(m) - 0.5) <= 1e-10 * 0.5);
    }
}

TEST_CASE("normal modes are orthonormal") {
    const auto nma = analyze_goa(GOASpec::reference(5.0, 1.0, 0.0));
    CHECK(nma.dimension == 201);
    CHECK(nma.orthogonality_error < 1e-12);
}

TEST_CASE("s = 0 leaves the ground state at the donor minimum") {
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 0.0));
    for (double s : m.dg_shifts()) CHECK(s == 0.0);
}

TEST_CASE("ground shift is collinear with the donor-acceptor shift") {
    // Both displacements move the primary and its bath partners along the same direction.
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 3.0, 0.0));
    for (std::size_t j = 0; j < m.size(); ++j) {
        CHECK(m.dg_shifts()[j] == doctest::Approx(1.5 * m.da_shifts()[j]).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("invalid specs are rejected") {
    GOASpec spec;
    spec.n_secondary = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = GOASpec{};
    spec.eta = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

}
