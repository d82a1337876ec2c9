// bath.hpp: Garg-Onuchic-Ambegaokar (GOA) model: Ohmic bath discretization
// and the primary/secondary -> normal-mode transformation.
//
// The GOA nuclear potential for the donor (sigma_z = +1) is
//   1/2 Omega^2 (y + y0)^2 + sum_a 1/2 w_a^2 (x_a + c_a y / w_a^2)^2
// with the acceptor at y0 -> -y0 and the ground state at y0 -> y0 + s.
// The secondary bath follows J(w) = eta w exp(-w/omega_c).

#pragma once

#include <vector>

#include "cavfgr/model.hpp"

namespace cavfgr {

struct GOASpec {
    double Omega = 0.5;
    double y0 = 1.0;
    double eta = 1.0;
    double omega_c = 1.0;
    int n_secondary = 200;
    double omega_DA = 0.0;
    double gamma = 1.0;
    double s = 0.0;
    double e_ground = 0.0;
    double hbar = 1.0;

    void validate() const;

    /// Reduced-unit defaults of the benchmark parameter table
    /// (Omega = 0.5, y0 = 1, Gamma = 1, N_s = 200, omega_c = hbar = 1).
    [[nodiscard]] static GOASpec reference(double eta, double s, double omega_DA);
};

struct DiscreteBath {
    std::vector<double> freqs;
    std::vector<double> couplings;

    /// sum_a c_a^2 / (2 w_a^2); equals eta*omega_c/pi for an Ohmic bath.
    [[nodiscard]] double sum_rule() const;
    /// sum_a c_a^2 / w_a^2, the bath's contribution to the primary-mode curvature.
    [[nodiscard]] double curvature_shift() const;
};

/// Equal-weight discretization of J(w) = eta w exp(-w/omega_c):
///   w_a   = -omega_c ln(1 - (a - 1/2)/N),   a = 1..N
///   c_a^2 = (2 eta omega_c / (pi N)) w_a^2
[[nodiscard]] DiscreteBath discretize_ohmic(double eta, double omega_c, int n_secondary);

/// Full result of the normal-mode analysis, kept for diagnostics and tests.
struct NormalModeAnalysis {
    DiscreteBath bath;
    DisplacedHarmonicModel model;
    /// Column-major (N_s+1)x(N_s+1) eigenvector matrix; column j is mode j,
    /// row 0 is the primary coordinate y, row a is bath coordinate x_a.
    std::vector<double> eigenvectors;
    std::size_t dimension = 0;
    /// max |Q^T Q - I|.
    double orthogonality_error = 0.0;
};

[[nodiscard]] NormalModeAnalysis analyze_goa(const GOASpec& spec);
[[nodiscard]] DisplacedHarmonicModel goa_to_normal_modes(const GOASpec& spec);

/// JSON dump of a discretized bath: {"freqs": [...], "couplings": [...]}.
[[nodiscard]] std::string dump_bath(const DiscreteBath& bath);

}  // namespace cavfgr
