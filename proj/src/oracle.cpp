#include "cavfgr/oracle.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavfgr/error.hpp"

namespace cavfgr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// hbar w (N + 1/2) - w^2 d x + 1/2 w^2 d^2 in the number basis, i.e. the
// oscillator 1/2 p^2 + 1/2 w^2 (x - d)^2 truncated to n_max quanta.
MatrixXd mode_hamiltonian(double w, double d, double hbar, int n_max) {
    const int n = n_max + 1;
    MatrixXd h = MatrixXd::Zero(n, n);
    const double x_scale = std::sqrt(hbar / (2.0 * w));
    for (int k = 0; k < n; ++k) {
        h(k, k) = hbar * w * (k + 0.5) + 0.5 * w * w * d * d;
        if (k + 1 < n) {
            const double off = -w * w * d * x_scale * std::sqrt(k + 1.0);
            h(k, k + 1) = off;
            h(k + 1, k) = off;
        }
    }
    return h;
}

MatrixXd kron_identity_left(const MatrixXd& a, Eigen::Index m) {
    // I_m (x) a
    const Eigen::Index n = a.rows();
    MatrixXd out = MatrixXd::Zero(m * n, m * n);
    for (Eigen::Index i = 0; i < m; ++i) out.block(i * n, i * n, n, n) = a;
    return out;
}

MatrixXd kron_identity_right(const MatrixXd& a, Eigen::Index m) {
    // a (x) I_m
    const Eigen::Index n = a.rows();
    MatrixXd out = MatrixXd::Zero(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (a(i, j) == 0.0) continue;
            for (Eigen::Index k = 0; k < m; ++k) out(i * m + k, j * m + k) = a(i, j);
        }
    }
    return out;
}

// Full Hamiltonian for surface minimum at R = d (per mode) plus a constant.
MatrixXd surface_hamiltonian(const DisplacedHarmonicModel& model, const std::vector<double>& d, double offset,
                             int n_max) {
    const auto w = model.mode_freqs();
    const double hbar = model.hbar();
    MatrixXd h;
    if (w.size() == 1) {
        h = mode_hamiltonian(w[0], d[0], hbar, n_max);
    } else {
        const MatrixXd h1 = mode_hamiltonian(w[0], d[0], hbar, n_max);
        const MatrixXd h2 = mode_hamiltonian(w[1], d[1], hbar, n_max);
        h = kron_identity_right(h1, h2.rows()) + kron_identity_left(h2, h1.rows());
    }
    h.diagonal().array() += offset;
    return h;
}

Eigen::SelfAdjointEigenSolver<MatrixXd> diagonalize(const MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("oracle: eigendecomposition failed");
    return solver;
}

}  // namespace

void FockConfig::validate(std::size_t modes) const {
    if (modes < 1 || modes > 2) throw ConfigError("oracle: only 1- or 2-mode models are supported");
    if (n_max < 10) throw ConfigError("oracle: n_max must be >= 10");
    if (check_increment < 1) throw ConfigError("oracle: check_increment must be >= 1");
    const double dim = std::pow(static_cast<double>(n_max + check_increment + 1), static_cast<double>(modes));
    if (dim > 4096.0) throw ConfigError("oracle: Hilbert dimension exceeds 4096");
    if (!(tolerance > 0.0)) throw ConfigError("oracle: tolerance must be positive");
}

void check_certified_box(const DisplacedHarmonicModel& model, const ThermalEnv& env, double t_max) {
    env.validate();
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    const auto s = model.dg_shifts();
    for (std::size_t j = 0; j < w.size(); ++j) {
        std::ostringstream why;
        if (w[j] < 0.5 || w[j] > 2.0) why << "omega = " << w[j] << " outside [0.5, 2]";
        else if (std::abs(r[j]) > 2.0) why << "|r_eq| = " << std::abs(r[j]) << " > 2";
        else if (std::abs(s[j]) > 2.0) why << "|s| = " << std::abs(s[j]) << " > 2";
        else if (const double x = env.beta * model.hbar() * w[j]; x < 0.5 || x > 20.0)
            why << "beta hbar omega = " << x << " outside [0.5, 20]";
        else if (std::abs(t_max) * w[j] > 10.0) why << "t omega = " << std::abs(t_max) * w[j] << " > 10";
        if (!why.str().empty()) throw ConfigError("oracle: mode " + std::to_string(j) + " outside certified box: " + why.str());
    }
}

FockOracle::FockOracle(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, int n_max)
    : gamma2_(model.gamma() * model.gamma()), hbar_(model.hbar()) {
    env.validate();
    const std::size_t n = model.size();
    std::vector<double> zero(n, 0.0), acceptor(n), ground(n);
    for (std::size_t j = 0; j < n; ++j) {
        acceptor[j] = model.da_shifts()[j];
        ground[j] = -model.dg_shifts()[j];
    }
    const MatrixXd h_d = surface_hamiltonian(model, zero, model.hbar() * model.omega_DA(), n_max);
    const MatrixXd h_a = surface_hamiltonian(model, acceptor, 0.0, n_max);
    const MatrixXd h_g = surface_hamiltonian(model, ground, model.e_ground(), n_max);

    const auto parent = diagonalize(dir == Direction::forward ? h_d : h_a);
    const auto target = diagonalize(dir == Direction::forward ? h_a : h_d);
    const auto ground_solver = diagonalize(h_g);

    const VectorXd& eg = ground_solver.eigenvalues();
    VectorXd weights = (-env.beta * (eg.array() - eg.minCoeff())).exp();
    weights /= weights.sum();
    const MatrixXd& vg = ground_solver.eigenvectors();
    const MatrixXd rho_fock = vg * weights.asDiagonal() * vg.transpose();

    trace_error_ = std::abs(rho_fock.trace() - 1.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> rho_check(rho_fock, Eigen::EigenvaluesOnly);
    min_eigenvalue_ = rho_check.eigenvalues().minCoeff();

    // A common constant drops out of every phase difference; remove it to keep phases small.
    const double shift = std::min(parent.eigenvalues().minCoeff(), target.eigenvalues().minCoeff());
    e_parent_ = parent.eigenvalues().array() - shift;
    e_target_ = target.eigenvalues().array() - shift;
    overlap_ = parent.eigenvectors().transpose() * target.eigenvectors();
    rho_ = parent.eigenvectors().transpose() * rho_fock * parent.eigenvectors();
}

void FockOracle::prepare(double t) {
    const VectorXd c = (e_parent_ * (t / hbar_)).array().cos();
    const VectorXd s = (e_parent_ * (t / hbar_)).array().sin();
    // Y = rho diag(e^{iE t}) O,   X = diag(e^{-iE t}) Y = rho(t) O
    const MatrixXd a = rho_ * (c.asDiagonal() * overlap_);
    const MatrixXd b = rho_ * (s.asDiagonal() * overlap_);
    const MatrixXd x_re = c.asDiagonal() * a + s.asDiagonal() * b;
    const MatrixXd x_im = c.asDiagonal() * b - s.asDiagonal() * a;
    z_re_ = overlap_.cwiseProduct(x_re);
    z_im_ = overlap_.cwiseProduct(x_im);
    cached_t_ = t;
    prepared_ = true;
}

std::complex<double> FockOracle::corr(double t, double tau) {
    if (!prepared_ || t != cached_t_) prepare(t);
    const VectorXd pc = (e_parent_ * (tau / hbar_)).array().cos();
    const VectorXd ps = (e_parent_ * (tau / hbar_)).array().sin();
    // v_k = sum_m e^{i E^P_m tau} Z_mk
    const VectorXd v_re = z_re_.transpose() * pc - z_im_.transpose() * ps;
    const VectorXd v_im = z_re_.transpose() * ps + z_im_.transpose() * pc;
    const VectorXd tc = (e_target_ * (tau / hbar_)).array().cos();
    const VectorXd ts = (e_target_ * (tau / hbar_)).array().sin();
    // sum_k e^{-i E^T_k tau} v_k
    const double re = tc.dot(v_re) + ts.dot(v_im);
    const double im = tc.dot(v_im) - ts.dot(v_re);
    return gamma2_ * std::complex<double>(re, im);
}

std::vector<std::complex<double>> fock_corr_grid(const DisplacedHarmonicModel& model, const ThermalEnv& env,
                                                 Direction dir, const std::vector<double>& ts,
                                                 const std::vector<double>& taus, const FockConfig& config) {
    config.validate(model.size());
    double t_max = 0.0;
    for (double t : ts) t_max = std::max(t_max, std::abs(t));
    for (double tau : taus) t_max = std::max(t_max, std::abs(tau));
    check_certified_box(model, env, t_max);

    FockOracle lo(model, env, dir, config.n_max);
    FockOracle hi(model, env, dir, config.n_max + config.check_increment);
    const double scale = model.gamma() * model.gamma();
    std::vector<std::complex<double>> out;
    out.reserve(ts.size() * taus.size());
    for (double t : ts) {
        for (double tau : taus) {
            const auto a = lo.corr(t, tau);
            const auto b = hi.corr(t, tau);
            if (std::abs(a - b) > config.tolerance * scale) {
                std::ostringstream msg;
                msg << "oracle: truncation not converged at t = " << t << ", tau = " << tau << " (|delta| = "
                    << std::abs(a - b) << " with n_max = " << config.n_max << ")";
                throw NumericalError(msg.str());
            }
            out.push_back(b);
        }
    }
    return out;
}

std::complex<double> fock_nuclear_corr(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                                       double t, double tau, const FockConfig& config) {
    return fock_corr_grid(model, env, dir, {t}, {tau}, config).front();
}

double oracle_rate(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, double t,
                   const FockConfig& config, double shift) {
    config.validate(model.size());
    check_certified_box(model, env, t);
    if (t < 0.0) throw ConfigError("oracle_rate: t must be non-negative");
    if (t == 0.0) return 0.0;

    auto rate_at = [&](int n_max) {
        FockOracle oracle(model, env, dir, n_max);
        auto f = [&](double tau) {
            return (std::complex<double>(std::cos(shift * tau), std::sin(shift * tau)) * oracle.corr(t, tau)).real();
        };
        double err = 0.0;
        const double value =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 15, 1e-10, &err);
        return 2.0 / (model.hbar() * model.hbar()) * value;
    };
    const double lo = rate_at(config.n_max);
    const double hi = rate_at(config.n_max + config.check_increment);
    const double bound = 2.0 * model.gamma() * model.gamma() * t / (model.hbar() * model.hbar());
    if (std::abs(lo - hi) > config.tolerance * bound) {
        std::ostringstream msg;
        msg << "oracle_rate: truncation not converged (|delta k| = " << std::abs(lo - hi) << ")";
        throw NumericalError(msg.str());
    }
    return hi;
}

}  // namespace cavfgr
