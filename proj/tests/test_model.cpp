#include "doctest.h"

#include <cmath>

#include "cavfgr/bath.hpp"
#include "cavfgr/error.hpp"
#include "cavfgr/model.hpp"

using namespace cavfgr;

TEST_SUITE("model") {

TEST_CASE("single mode reorganization energy") {
    const auto m = load_model(R"({"units": "reduced", "hbar": 1, "omega_DA": 0, "gamma": 1, "e_ground": 0,
                                  "modes": [{"omega": 1, "r_eq": 2, "s": 0}]})");
    CHECK(m.size() == 1);
    CHECK(reorganization_energy(m) == 2.0);
    CHECK(reorganization_energy(m.with_dg_shifts({0.3})) == 2.0);
}

TEST_CASE("zero displacement gives zero reorganization energy") {
    const DisplacedHarmonicModel m({1.0, 2.0}, {0.0, 0.0}, {1.0, -1.0}, 0.0, 1.0, 0.0, 1.0);
    CHECK(reorganization_energy(m) == 0.0);
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(DisplacedHarmonicModel({1.0, 2.0}, {0.0}, {0.0, 0.0}, 0.0, 1.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(DisplacedHarmonicModel({-1.0}, {0.0}, {0.0}, 0.0, 1.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(DisplacedHarmonicModel({1.0}, {0.0}, {0.0}, 0.0, 1.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(DisplacedHarmonicModel({}, {}, {}, 0.0, 1.0, 0.0, 1.0), ConfigError);
}

TEST_CASE("model file schema") {
    const char* missing = R"({"units": "reduced", "hbar": 1, "omega_DA": 0, "gamma": 1, "e_ground": 0,
                             "modes": [{"omega": 1, "r_eq": 2}]})";
    CHECK_THROWS_AS((void)load_model(missing), ConfigError);
    const char* extra = R"({"units": "reduced", "hbar": 1, "omega_DA": 0, "gamma": 1, "e_ground": 0, "note": "x",
                           "modes": [{"omega": 1, "r_eq": 2, "s": 0}]})";
    CHECK_THROWS_AS((void)load_model(extra), ConfigError);
    CHECK(load_model(extra, true).size() == 1);
    const char* bad_hbar = R"({"units": "reduced", "hbar": 2, "omega_DA": 0, "gamma": 1, "e_ground": 0,
                              "modes": [{"omega": 1, "r_eq": 2, "s": 0}]})";
    CHECK_THROWS_AS((void)load_model(bad_hbar), ConfigError);
    CHECK_THROWS_AS((void)load_model("{not json"), ConfigError);
}

TEST_CASE("GOA model round-trips through the file format bit-identically") {
    const auto m = goa_to_normal_modes(GOASpec::reference(5.0, 1.0, 2.0));
    const auto back = load_model(dump_model(m));
    CHECK(back == m);
}

TEST_CASE("cavity coupling G = sqrt(2 hbar omega_p) g_p") {
    CavityMode c{0.961, 1.0};
    CHECK(c.coupling_G(1.0) == doctest::Approx(std::sqrt(2.0 * 0.961)).epsilon(1e-15));
    CHECK_THROWS_AS((CavityMode{0.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((CavityMode{1.0, -1.0}.validate()), ConfigError);
}

TEST_CASE("thermal environment and direction names") {
    CHECK(ThermalEnv::from_kT(0.5).beta == 2.0);
    CHECK_THROWS_AS((void)ThermalEnv::from_kT(0.0), ConfigError);
    CHECK(direction_from_string("backward") == Direction::backward);
    CHECK_THROWS_AS((void)direction_from_string("sideways"), ConfigError);
}

}
