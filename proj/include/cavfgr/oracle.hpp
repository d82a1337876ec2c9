// oracle.hpp: brute-force truncated-Fock-space reference for one- and
// two-mode models. Independent of the closed forms: Hamiltonians are built as
// matrices in the number basis and every propagator comes from a Hermitian
// eigendecomposition.
//
//   C(t, tau) = Gamma^2 Tr[ e^{-iH_j t} rho_G e^{iH_j t} e^{-iH_k tau} e^{iH_j tau} ]
// with j the parent (donor for forward, acceptor for backward).

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cavfgr/model.hpp"

namespace cavfgr {

struct FockConfig {
    int n_max = 60;
    /// Truncation is accepted if raising n_max by this much changes the result by < tolerance * Gamma^2.
    int check_increment = 10;
    double tolerance = 1e-9;

    void validate(std::size_t modes) const;
};

/// Throws ConfigError outside: omega in [0.5, 2], |r_eq|, |s| <= 2, beta hbar omega in [0.5, 20],
/// |t| omega <= 10 for every mode.
void check_certified_box(const DisplacedHarmonicModel& model, const ThermalEnv& env, double t_max);

/// Oracle at one truncation level, no convergence check.
class FockOracle {
public:
    FockOracle(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, int n_max);

    [[nodiscard]] std::complex<double> corr(double t, double tau);
    [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(e_parent_.size()); }
    /// |Tr rho_G - 1| and the smallest eigenvalue of rho_G, computed from rho_G in the number basis.
    [[nodiscard]] double thermal_trace_error() const noexcept { return trace_error_; }
    [[nodiscard]] double thermal_min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    void prepare(double t);

    double gamma2_;
    double hbar_;
    Eigen::VectorXd e_parent_;
    Eigen::VectorXd e_target_;
    Eigen::MatrixXd overlap_;  // parent eigenvectors^T * target eigenvectors
    Eigen::MatrixXd rho_;      // rho_G in the parent eigenbasis
    double trace_error_ = 0.0;
    double min_eigenvalue_ = 0.0;
    bool prepared_ = false;
    double cached_t_ = 0.0;
    Eigen::MatrixXd z_re_;  // overlap o X(t), real and imaginary parts
    Eigen::MatrixXd z_im_;
};

/// Single point with the truncation check.
[[nodiscard]] std::complex<double> fock_nuclear_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env,
                                                     Direction dir, double t, double tau,
                                                     const FockConfig& config = {});

/// Grid values C(ts[a], taus[b]) (row-major, a outer), truncation-checked at every point.
[[nodiscard]] std::vector<std::complex<double>> fock_corr_grid(const DisplacedHarmonicModel& model,
                                                               const ThermalEnv& env, Direction dir,
                                                               const std::vector<double>& ts,
                                                               const std::vector<double>& taus,
                                                               const FockConfig& config = {});

/// (2/hbar^2) Re int_0^t e^{i shift tau} C(t, tau) dtau by adaptive Gauss-Kronrod (rtol 1e-10).
[[nodiscard]] double oracle_rate(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double t,
                                 const FockConfig& config = {}, double shift = 0.0);

}  // namespace cavfgr
