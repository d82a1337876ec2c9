// correlators.hpp: closed-form nuclear and photonic correlation functions
// and the instantaneous-Marcus moments of the donor-acceptor energy gap.
//
// Forward (D->A), per mode j with a = beta hbar w/2, b = tau w/2, c = (2t-tau) w/2:
//   ln C_DA = ln Gamma^2 + i omega_DA tau
//     + sum_j -i Req w sin(b) / (hbar sinh a)
//             * [ Req sinh(a - ib) + S (sinh(a - ic) + sinh(a + ic)) ]
// Backward (A->D):
//   ln C_AD = ln Gamma^2 - i omega_DA tau
//     + sum_j  i Req w sin(b) / (hbar sinh a)
//             * [ -Req sinh(a - ib) + (Req + S)(sinh(a - ic) + sinh(a + ic)) ]
// Both directions start from thermal equilibrium on the ground surface, and
// C(t, tau) = Gamma^2 Tr[e^{-iH_j t} rho_G e^{iH_j t} e^{-iH_k tau} e^{iH_j tau}].
// The lag argument is (2t - tau)/2: the gap is sampled over [t - tau, t], so for
// small tau the phase is i <U>_t tau / hbar with <U>_t ~ cos(w t). Writing it as
// (t - tau)/2 does not reproduce the trace (checked against the Fock-space oracle).

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "cavfgr/model.hpp"

namespace cavfgr {

struct CorrelatorOptions {
    /// Hard error if Re(ln C) - ln Gamma^2 exceeds this cap.
    double exponent_cap = 700.0;
};

/// C^n_{jk}(t, tau). O(N) per call.
[[nodiscard]] std::complex<double> nuclear_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env,
                                                Direction dir, double t, double tau,
                                                const CorrelatorOptions& opts = {});

/// t-independent correlator for nuclei starting at equilibrium on the parent surface.
[[nodiscard]] std::complex<double> equilibrium_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env,
                                                    Direction dir, double tau, const CorrelatorOptions& opts = {});

struct PhotonFactorParams {
    CavityMode cavity;
    double gamma = 1.0;
    double beta = 1.0;
    double hbar = 1.0;

    /// alpha = hbar G^2 / (2 Gamma^2 omega_p) = (hbar g_p / Gamma)^2.
    [[nodiscard]] double alpha() const;
    [[nodiscard]] double mean_photons() const;
    void validate() const;
};

/// C^p(tau) = 1 + (hbar G^2 / (2 omega_p Gamma^2)) cosh(beta hbar omega_p/2 - i omega_p tau) / sinh(beta hbar omega_p/2)
[[nodiscard]] std::complex<double> photon_factor(const PhotonFactorParams& params, double tau);

/// Same function written as 1 + alpha <n>(e^{i omega_p tau} + e^{beta hbar omega_p} e^{-i omega_p tau}).
[[nodiscard]] std::complex<double> photon_factor_expanded(const PhotonFactorParams& params, double tau);

/// Bose occupation 1/(exp(beta hbar omega_p) - 1).
[[nodiscard]] double mean_photon_number(const ThermalEnv& env, double omega_p, double hbar);

/// <U_jk>_t, the mean donor-acceptor energy gap along classical trajectories on
/// the parent surface started from ground-state equilibrium.
[[nodiscard]] double imt_gap_mean(const DisplacedHarmonicModel& model, Direction dir, double t);

/// sigma^2 = sum_j w_j^2 Req_j^2 / beta (= 2 E_r / beta); direction- and t-independent.
[[nodiscard]] double imt_gap_variance(const DisplacedHarmonicModel& model, const ThermalEnv& env);

/// Tabulated C^n(t_i, tau_k) on a uniform grid t_i = i dt, tau_k = k dt, k <= i.
///
/// The log-correlator splits into a tau-only part A(tau_k) and a sum over modes
/// of B_j(tau_k) * cos(w_j (2 t_i - tau_k)/2); both factors are precomputed so a
/// lookup costs one length-N dot product and one complex exp.
class GridCorrelator {
public:
    GridCorrelator(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double dt,
                   std::size_t steps, const CorrelatorOptions& opts = {});

    /// C^n(t_i, tau_k); requires k <= i <= steps.
    [[nodiscard]] std::complex<double> operator()(std::size_t i, std::size_t k) const;

    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    std::size_t modes_;
    std::size_t steps_;
    double dt_;
    double gamma2_;
    double exponent_cap_;
    bool has_t_dependence_;
    std::vector<std::complex<double>> static_part_;  // A(tau_k) including the +-i omega_DA tau phase
    std::vector<double> tau_factor_;                 // B_j(tau_k), row k
    std::vector<double> lag_factor_;                 // cos(w_j m dt / 2), row m = 2i - k
};

}  // namespace cavfgr
