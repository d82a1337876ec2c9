// model.hpp: displaced-harmonic donor/acceptor/ground models, thermal
// environment, cavity mode, and the JSON model-file format.
//
// Potential energy surfaces (mass-weighted normal coordinates R_j):
//   V_D(R) = hbar*omega_DA + sum_j 1/2 w_j^2 R_j^2
//   V_A(R) =                 sum_j 1/2 w_j^2 (R_j - Req_j)^2
//   V_G(R) = E_G           + sum_j 1/2 w_j^2 (R_j + S_j)^2
// E_G is carried along but never enters a correlator or rate: thermal states
// are normalized, so constant offsets cancel.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cavfgr {

enum class Direction { forward, backward };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] Direction direction_from_string(std::string_view s);

/// Inverse temperature 1/(k_B T) in the model's inverse energy units.
struct ThermalEnv {
    double beta = 1.0;

    [[nodiscard]] static ThermalEnv from_kT(double kT);
    [[nodiscard]] double kT() const noexcept { return 1.0 / beta; }
    void validate() const;
};

/// Single cavity mode: frequency omega_p and light-matter coupling g_p
/// (hbar*g_p is an energy).
struct CavityMode {
    double omega_p = 1.0;
    double g_p = 0.0;

    /// Prefactor G of the photonic coupling G*q_p, G = sqrt(2 hbar omega_p) g_p.
    [[nodiscard]] double coupling_G(double hbar) const;
    void validate() const;
};

class DisplacedHarmonicModel {
public:
    DisplacedHarmonicModel(std::vector<double> mode_freqs, std::vector<double> da_shifts,
                           std::vector<double> dg_shifts, double omega_DA, double gamma,
                           double e_ground, double hbar, std::string units = "reduced");

    [[nodiscard]] std::size_t size() const noexcept { return freqs_.size(); }
    [[nodiscard]] std::span<const double> mode_freqs() const noexcept { return freqs_; }
    [[nodiscard]] std::span<const double> da_shifts() const noexcept { return da_; }
    [[nodiscard]] std::span<const double> dg_shifts() const noexcept { return dg_; }
    [[nodiscard]] double omega_DA() const noexcept { return omega_DA_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double e_ground() const noexcept { return e_ground_; }
    [[nodiscard]] double hbar() const noexcept { return hbar_; }
    [[nodiscard]] const std::string& units() const noexcept { return units_; }

    // Modified copies; each re-validates.
    [[nodiscard]] DisplacedHarmonicModel with_omega_DA(double omega_DA) const;
    [[nodiscard]] DisplacedHarmonicModel with_gamma(double gamma) const;
    [[nodiscard]] DisplacedHarmonicModel with_e_ground(double e_ground) const;
    [[nodiscard]] DisplacedHarmonicModel with_dg_shifts(std::vector<double> dg_shifts) const;

    /// Backward equilibrium reference: ground minimum moved onto the acceptor
    /// minimum (S_j = -Req_j), which zeroes the effective shift Req_j + S_j.
    [[nodiscard]] DisplacedHarmonicModel acceptor_equilibrated() const;
    /// Forward equilibrium reference: ground minimum on the donor minimum (S_j = 0).
    [[nodiscard]] DisplacedHarmonicModel donor_equilibrated() const;

    friend bool operator==(const DisplacedHarmonicModel&, const DisplacedHarmonicModel&) = default;

private:
    void validate() const;

    std::vector<double> freqs_;
    std::vector<double> da_;
    std::vector<double> dg_;
    double omega_DA_;
    double gamma_;
    double e_ground_;
    double hbar_;
    std::string units_;
};

/// E_r = sum_j 1/2 w_j^2 Req_j^2.
[[nodiscard]] double reorganization_energy(const DisplacedHarmonicModel& model);

// Model file I/O. Keys: units, hbar, omega_DA, gamma, e_ground, modes[{omega, r_eq, s}].
// Unknown keys are rejected unless `lenient`.
[[nodiscard]] DisplacedHarmonicModel load_model(std::string_view document, bool lenient = false);
[[nodiscard]] DisplacedHarmonicModel load_model_file(const std::filesystem::path& path, bool lenient = false);
[[nodiscard]] std::string dump_model(const DisplacedHarmonicModel& model);
void save_model_file(const DisplacedHarmonicModel& model, const std::filesystem::path& path);

/// hbar in meV*fs.
inline constexpr double kHbarMeVfs = 658.2119569;
/// Boltzmann constant in meV/K.
inline constexpr double kBoltzmannMeVPerK = 0.08617333262;

}  // namespace cavfgr
