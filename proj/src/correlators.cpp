#include "cavfgr/correlators.hpp"

#include <cmath>
#include <sstream>

#include "cavfgr/error.hpp"
#include "cavfgr/summation.hpp"

namespace cavfgr {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

double sign_of(Direction dir) { return dir == Direction::forward ? 1.0 : -1.0; }

// sinh(a - ib) / sinh(a) and (sinh(a - ic) + sinh(a + ic)) / sinh(a), written
// as exact ratios so large beta*hbar*w cannot overflow.
cplx tau_ratio(double a, double b) { return {std::cos(b), -std::sin(b) / std::tanh(a)}; }
double lag_ratio(double c) { return 2.0 * std::cos(c); }

cplx checked_exp(cplx exponent, double gamma2, double cap, double t, double tau) {
    if (!(exponent.real() <= cap)) {
        std::ostringstream msg;
        msg << "correlator exponent real part " << exponent.real() << " exceeds cap " << cap << " at t = " << t
            << ", tau = " << tau;
        throw NumericalError(msg.str());
    }
    return gamma2 * std::exp(exponent);
}

}  // namespace

cplx nuclear_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double t, double tau,
                  const CorrelatorOptions& opts) {
    env.validate();
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    const auto s = model.dg_shifts();
    const double hbar = model.hbar();

    ComplexNeumaierSum exponent;
    exponent += sign_of(dir) * kI * model.omega_DA() * tau;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double a = 0.5 * env.beta * hbar * w[j];
        const double b = 0.5 * tau * w[j];
        const double c = (t - 0.5 * tau) * w[j];
        const double pref = r[j] * w[j] * std::sin(b) / hbar;
        if (dir == Direction::forward) {
            exponent += -kI * pref * (r[j] * tau_ratio(a, b) + s[j] * lag_ratio(c));
        } else {
            exponent += kI * pref * (-r[j] * tau_ratio(a, b) + (r[j] + s[j]) * lag_ratio(c));
        }
    }
    const double gamma2 = model.gamma() * model.gamma();
    return checked_exp(exponent.value(), gamma2, opts.exponent_cap, t, tau);
}

cplx equilibrium_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double tau,
                      const CorrelatorOptions& opts) {
    const auto reference =
        dir == Direction::forward ? model.donor_equilibrated() : model.acceptor_equilibrated();
    return nuclear_corr(reference, env, dir, 0.0, tau, opts);
}

double PhotonFactorParams::alpha() const {
    const double g = cavity.coupling_G(hbar);
    return hbar * g * g / (2.0 * gamma * gamma * cavity.omega_p);
}

double PhotonFactorParams::mean_photons() const {
    return mean_photon_number(ThermalEnv{beta}, cavity.omega_p, hbar);
}

void PhotonFactorParams::validate() const {
    cavity.validate();
    if (!(beta > 0.0)) throw ConfigError("photon factor: beta must be positive");
    if (!(hbar > 0.0)) throw ConfigError("photon factor: hbar must be positive");
    if (cavity.g_p > 0.0 && gamma == 0.0) throw ConfigError("photon factor: Gamma must be nonzero when g_p > 0");
}

cplx photon_factor(const PhotonFactorParams& params, double tau) {
    params.validate();
    if (params.cavity.g_p == 0.0) return {1.0, 0.0};
    const double wp = params.cavity.omega_p;
    const double g = params.cavity.coupling_G(params.hbar);
    const double pref = params.hbar * g * g / (2.0 * wp * params.gamma * params.gamma);
    const double half = 0.5 * params.beta * params.hbar * wp;
    const double theta = wp * tau;
    cplx ratio;
    if (half < 350.0) {
        ratio = std::cosh(cplx(half, -theta)) / std::sinh(half);
    } else {
        ratio = {std::cos(theta) / std::tanh(half), -std::sin(theta)};
    }
    return 1.0 + pref * ratio;
}

cplx photon_factor_expanded(const PhotonFactorParams& params, double tau) {
    params.validate();
    if (params.cavity.g_p == 0.0) return {1.0, 0.0};
    const double wp = params.cavity.omega_p;
    const double x = params.beta * params.hbar * wp;
    const double n = params.mean_photons();
    const double boltz_n = x < 700.0 ? std::exp(x) * n : 1.0 + n;  // e^x <n> = 1 + <n>
    const double theta = wp * tau;
    const cplx up{std::cos(theta), std::sin(theta)};
    return 1.0 + params.alpha() * (n * up + boltz_n * std::conj(up));
}

double mean_photon_number(const ThermalEnv& env, double omega_p, double hbar) {
    const double x = env.beta * hbar * omega_p;
    if (!(x > 0.0)) throw ConfigError("mean_photon_number: beta*hbar*omega_p must be positive");
    return 1.0 / std::expm1(x);
}

double imt_gap_mean(const DisplacedHarmonicModel& model, Direction dir, double t) {
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    const auto s = model.dg_shifts();
    NeumaierSum sum;
    if (dir == Direction::forward) {
        sum += model.hbar() * model.omega_DA();
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double w2 = w[j] * w[j];
            sum += -0.5 * w2 * r[j] * r[j];
            sum += -w2 * r[j] * s[j] * std::cos(w[j] * t);
        }
    } else {
        sum += -model.hbar() * model.omega_DA();
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double w2 = w[j] * w[j];
            sum += w2 * r[j] * (r[j] + s[j]) * std::cos(w[j] * t);
            sum += -0.5 * w2 * r[j] * r[j];
        }
    }
    return sum.value();
}

double imt_gap_variance(const DisplacedHarmonicModel& model, const ThermalEnv& env) {
    env.validate();
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    NeumaierSum sum;
    for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * w[j] * r[j] * r[j] / env.beta;
    return sum.value();
}

GridCorrelator::GridCorrelator(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double dt,
                               std::size_t steps, const CorrelatorOptions& opts)
    : modes_(model.size()),
      steps_(steps),
      dt_(dt),
      gamma2_(model.gamma() * model.gamma()),
      exponent_cap_(opts.exponent_cap),
      has_t_dependence_(false),
      static_part_(steps + 1),
      tau_factor_((steps + 1) * model.size()),
      lag_factor_((2 * steps + 1) * model.size()) {
    env.validate();
    if (!(dt > 0.0)) throw ConfigError("GridCorrelator: dt must be positive");
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    const auto s = model.dg_shifts();
    const double hbar = model.hbar();
    const double sgn = sign_of(dir);

    std::vector<double> t_coeff(modes_);
    for (std::size_t j = 0; j < modes_; ++j) {
        // Coefficient of i*sin(b)*cos(c) in the per-mode exponent.
        t_coeff[j] = dir == Direction::forward ? -2.0 * r[j] * s[j] * w[j] / hbar
                                               : 2.0 * r[j] * (r[j] + s[j]) * w[j] / hbar;
        if (t_coeff[j] != 0.0) has_t_dependence_ = true;
    }

    for (std::size_t k = 0; k <= steps_; ++k) {
        const double tau = static_cast<double>(k) * dt_;
        ComplexNeumaierSum a_sum;
        a_sum += sgn * kI * model.omega_DA() * tau;
        for (std::size_t j = 0; j < modes_; ++j) {
            const double a = 0.5 * env.beta * hbar * w[j];
            const double b = 0.5 * tau * w[j];
            const double sb = std::sin(b);
            // Identical for both directions: -i Req^2 w sin(b) sinh(a - ib) / (hbar sinh a).
            a_sum += -kI * (r[j] * r[j] * w[j] * sb / hbar) * tau_ratio(a, b);
            tau_factor_[k * modes_ + j] = t_coeff[j] * sb;
        }
        static_part_[k] = a_sum.value();
    }
    for (std::size_t m = 0; m <= 2 * steps_; ++m) {
        const double half = 0.5 * static_cast<double>(m) * dt_;
        for (std::size_t j = 0; j < modes_; ++j) lag_factor_[m * modes_ + j] = std::cos(half * w[j]);
    }
}

cplx GridCorrelator::operator()(std::size_t i, std::size_t k) const {
    cplx exponent = static_part_[k];
    if (has_t_dependence_) {
        const double* bt = &tau_factor_[k * modes_];
        const double* lag = &lag_factor_[(2 * i - k) * modes_];
        NeumaierSum phase;
        for (std::size_t j = 0; j < modes_; ++j) phase += bt[j] * lag[j];
        exponent += kI * phase.value();
    }
    return checked_exp(exponent, gamma2_, exponent_cap_, static_cast<double>(i) * dt_, static_cast<double>(k) * dt_);
}

}  // namespace cavfgr
