#include "cavfgr/rates.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavfgr/error.hpp"
#include "cavfgr/faddeeva.hpp"
#include "cavfgr/parallel.hpp"
#include "cavfgr/summation.hpp"

namespace cavfgr {

using cplx = std::complex<double>;

TimeGrid TimeGrid::from_tmax(double t_max, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid: dt must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("grid: t_max must be positive");
    const double ratio = t_max / dt;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "grid: t_max/dt = " << ratio << " is not an integer";
        throw ConfigError(msg.str());
    }
    TimeGrid grid{dt, static_cast<std::size_t>(steps)};
    grid.validate();
    return grid;
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid: dt must be positive");
    if (steps < 2) throw ConfigError("grid: need at least 2 steps");
}

namespace {

constexpr std::array<std::string_view, 8> kVariantNames = {"NE",  "C-NE",  "EQ",     "C-EQ",
                                                           "IMT", "C-IMT", "LT-IMT", "C-LT-IMT"};

}  // namespace

std::string_view to_string(Variant v) noexcept { return kVariantNames[static_cast<std::size_t>(v)]; }

Variant variant_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
        if (kVariantNames[i] == s) return static_cast<Variant>(i);
    }
    throw ConfigError("unknown variant '" + std::string(s) + "'");
}

bool is_cavity(Variant v) noexcept {
    return v == Variant::C_NE || v == Variant::C_EQ || v == Variant::C_IMT || v == Variant::C_LT_IMT;
}

Variant free_counterpart(Variant v) noexcept {
    switch (v) {
        case Variant::C_NE: return Variant::NE;
        case Variant::C_EQ: return Variant::EQ;
        case Variant::C_IMT: return Variant::IMT;
        case Variant::C_LT_IMT: return Variant::LT_IMT;
        default: return v;
    }
}

std::vector<double> quadrature_weights(std::size_t n) {
    std::vector<double> w(n + 1, 0.0);
    if (n == 0) return w;
    if (n == 1) {
        w[0] = w[1] = 0.5;
        return w;
    }
    const std::size_t simpson = n % 2 == 0 ? n : n - 3;
    for (std::size_t k = 0; k + 2 <= simpson; k += 2) {
        w[k] += 1.0 / 3.0;
        w[k + 1] += 4.0 / 3.0;
        w[k + 2] += 1.0 / 3.0;
    }
    if (simpson != n) {
        w[n - 3] += 3.0 / 8.0;
        w[n - 2] += 9.0 / 8.0;
        w[n - 1] += 9.0 / 8.0;
        w[n] += 3.0 / 8.0;
    }
    return w;
}

double cavity_combination(double k_free, double k_plus, double k_minus, const PhotonFactorParams& p) {
    const double alpha = p.alpha();
    if (alpha == 0.0) return k_free;
    const double n = p.mean_photons();
    // n e^{beta hbar wp} = 1 + n
    return k_free + alpha * (n * k_plus + (1.0 + n) * k_minus);
}

namespace {

enum class Pass { free_only, with_dressed, shifted, direct };

struct PassResult {
    std::vector<double> base;
    std::vector<double> plus;
    std::vector<double> minus;
};

// One sweep over the (t_i, tau_k) triangle. `base` always holds the weighted
// integral of the chosen integrand; `plus`/`minus` are filled for with_dressed.
PassResult triangle_pass(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                         const TimeGrid& grid, Pass pass, double omega, const PhotonFactorParams* photon,
                         const RateOptions& opts) {
    grid.validate();
    const GridCorrelator corr(model, env, dir, grid.dt, grid.steps, opts.correlator);
    const std::size_t nodes = grid.size();

    std::vector<cplx> phase;
    if (pass == Pass::with_dressed || pass == Pass::shifted) {
        phase.resize(nodes);
        for (std::size_t k = 0; k < nodes; ++k) {
            const double arg = omega * grid.time(k);
            phase[k] = {std::cos(arg), std::sin(arg)};
        }
    } else if (pass == Pass::direct) {
        phase.resize(nodes);
        for (std::size_t k = 0; k < nodes; ++k) phase[k] = photon_factor(*photon, grid.time(k));
    }

    PassResult out;
    out.base.assign(nodes, 0.0);
    if (pass == Pass::with_dressed) {
        out.plus.assign(nodes, 0.0);
        out.minus.assign(nodes, 0.0);
    }
    const double scale = 2.0 * grid.dt / (model.hbar() * model.hbar());

    parallel_for(nodes, opts.workers, [&](std::size_t i) {
        if (i == 0) return;
        const std::vector<double> w = quadrature_weights(i);
        NeumaierSum base, plus, minus;
        for (std::size_t k = 0; k <= i; ++k) {
            const cplx c = corr(i, k);
            switch (pass) {
                case Pass::free_only: base += w[k] * c.real(); break;
                case Pass::with_dressed:
                    base += w[k] * c.real();
                    plus += w[k] * (phase[k] * c).real();
                    minus += w[k] * (std::conj(phase[k]) * c).real();
                    break;
                case Pass::shifted:
                case Pass::direct: base += w[k] * (phase[k] * c).real(); break;
            }
        }
        out.base[i] = scale * base.value();
        if (pass == Pass::with_dressed) {
            out.plus[i] = scale * plus.value();
            out.minus[i] = scale * minus.value();
        }
    });
    return out;
}

PhotonFactorParams photon_params(const DisplacedHarmonicModel& model, const CavityMode& cavity,
                                 const ThermalEnv& env) {
    PhotonFactorParams p{cavity, model.gamma(), env.beta, model.hbar()};
    p.validate();
    return p;
}

}  // namespace

NefgrPair nefgr(const DisplacedHarmonicModel& model, const std::optional<CavityMode>& cavity, const ThermalEnv& env,
                Direction dir, const TimeGrid& grid, const RateOptions& opts) {
    const bool dressed = cavity.has_value() && cavity->g_p > 0.0;
    std::optional<PhotonFactorParams> params;
    if (cavity) params = photon_params(model, *cavity, env);

    PassResult pass = triangle_pass(model, env, dir, grid, dressed ? Pass::with_dressed : Pass::free_only,
                                    dressed ? cavity->omega_p : 0.0, nullptr, opts);
    NefgrPair out;
    out.free = RateSeries{grid, pass.base, Variant::NE, dir};
    if (cavity) {
        RateSeries cav{grid, pass.base, Variant::C_NE, dir};
        if (dressed) {
            for (std::size_t i = 0; i < cav.values.size(); ++i) {
                cav.values[i] = cavity_combination(pass.base[i], pass.plus[i], pass.minus[i], *params);
            }
        }
        out.cavity = std::move(cav);
    }
    return out;
}

RateSeries nefgr_free(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                      const TimeGrid& grid, const RateOptions& opts) {
    return nefgr(model, std::nullopt, env, dir, grid, opts).free;
}

RateSeries nefgr_dressed(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                         const TimeGrid& grid, double shift, const RateOptions& opts) {
    PassResult pass = triangle_pass(model, env, dir, grid, Pass::shifted, shift, nullptr, opts);
    return RateSeries{grid, std::move(pass.base), Variant::NE, dir};
}

RateSeries nefgr_cavity(const DisplacedHarmonicModel& model, const CavityMode& cavity, const ThermalEnv& env,
                        Direction dir, const TimeGrid& grid, const RateOptions& opts) {
    return *nefgr(model, cavity, env, dir, grid, opts).cavity;
}

RateSeries nefgr_cavity_direct(const DisplacedHarmonicModel& model, const CavityMode& cavity, const ThermalEnv& env,
                               Direction dir, const TimeGrid& grid, const RateOptions& opts) {
    const PhotonFactorParams params = photon_params(model, cavity, env);
    PassResult pass = triangle_pass(model, env, dir, grid, Pass::direct, 0.0, &params, opts);
    return RateSeries{grid, std::move(pass.base), Variant::C_NE, dir};
}

EfgrResult efgr(const DisplacedHarmonicModel& model, const std::optional<CavityMode>& cavity, const ThermalEnv& env,
                Direction dir, const EfgrOptions& opts) {
    env.validate();
    if (!(opts.rtol > 0.0) || !(opts.panel > 0.0) || !(opts.tau_max > opts.panel) || opts.probe_panels < 1) {
        throw ConfigError("efgr: invalid convergence settings");
    }
    if (dir == Direction::backward && opts.backward_via_detailed_balance) {
        EfgrResult fwd = efgr(model, cavity, env, Direction::forward, opts);
        fwd.value *= std::exp(-env.beta * model.hbar() * model.omega_DA());
        return fwd;
    }

    const DisplacedHarmonicModel reference =
        dir == Direction::forward ? model.donor_equilibrated() : model.acceptor_equilibrated();
    std::optional<PhotonFactorParams> params;
    if (cavity && cavity->g_p > 0.0) params = photon_params(model, *cavity, env);

    auto integrand = [&](double tau) {
        cplx c = nuclear_corr(reference, env, dir, 0.0, tau, opts.correlator);
        if (params) c *= photon_factor(*params, tau);
        return c.real();
    };

    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    NeumaierSum total;
    std::vector<double> history;
    double a = 0.0;
    while (a < opts.tau_max) {
        const double b = std::min(a + opts.panel, opts.tau_max);
        total += GK::integrate(integrand, a, b, 12, 1e-12);
        history.push_back(total.value());
        a = b;
        const auto probe = static_cast<std::size_t>(opts.probe_panels);
        if (history.size() > probe) {
            const double now = history.back();
            const double variation = std::abs(now - history[history.size() - 1 - probe]);
            if (variation <= opts.rtol * std::abs(now) + opts.atol) {
                const double scale = 2.0 / (model.hbar() * model.hbar());
                return EfgrResult{scale * now, a, scale * variation, history.size()};
            }
        }
    }
    const auto probe = std::min<std::size_t>(history.size() - 1, static_cast<std::size_t>(opts.probe_panels));
    std::ostringstream msg;
    msg << "efgr (" << to_string(dir) << "): running integral not converged by tau_max = " << opts.tau_max
        << "; variation over last " << probe << " panels = "
        << std::abs(history.back() - history[history.size() - 1 - probe]) << " vs |I| = "
        << std::abs(history.back());
    throw NumericalError(msg.str());
}

RateSeries constant_series(const TimeGrid& grid, double value, Variant variant, Direction dir) {
    grid.validate();
    return RateSeries{grid, std::vector<double>(grid.size(), value), variant, dir};
}

double imt_value(double gamma, double hbar, double sigma2, double u, double t) {
    if (!(sigma2 > 0.0)) throw ConfigError("imt: gap variance must be positive");
    if (t == 0.0) return 0.0;
    const double sigma = std::sqrt(sigma2);
    const double x = sigma * t / (std::numbers::sqrt2 * hbar);
    const double b = u / (std::numbers::sqrt2 * sigma);
    return gamma * gamma / hbar * std::sqrt(2.0 * std::numbers::pi) / sigma * gaussian_damped_re_erf(x, b);
}

double lt_imt_value(double gamma, double hbar, double sigma2, double u) {
    if (!(sigma2 > 0.0)) throw ConfigError("lt-imt: gap variance must be positive");
    return gamma * gamma / hbar * std::sqrt(2.0 * std::numbers::pi / sigma2) * std::exp(-u * u / (2.0 * sigma2));
}

double marcus_rate(double gamma, double hbar, double beta, double e_r, double gap) {
    if (!(e_r > 0.0)) throw ConfigError("marcus: reorganization energy must be positive");
    const double d = gap - e_r;
    return gamma * gamma / hbar * std::sqrt(std::numbers::pi * beta / e_r) * std::exp(-beta * d * d / (4.0 * e_r));
}

double log_marcus_rate(double hbar, double beta, double e_r, double gap) {
    if (!(e_r > 0.0)) throw ConfigError("marcus: reorganization energy must be positive");
    const double d = gap - e_r;
    return -std::log(hbar) + 0.5 * std::log(std::numbers::pi * beta / e_r) - beta * d * d / (4.0 * e_r);
}

namespace {

RateSeries imt_series(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                      const TimeGrid& grid, double dress_shift, bool long_time) {
    grid.validate();
    const double sigma2 = imt_gap_variance(model, env);
    if (!(sigma2 > 0.0)) throw ConfigError("imt: gap variance is zero (all r_eq vanish)");
    RateSeries out{grid, std::vector<double>(grid.size()), long_time ? Variant::LT_IMT : Variant::IMT, dir};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.time(i);
        const double u = imt_gap_mean(model, dir, t) + dress_shift;
        out.values[i] = long_time ? lt_imt_value(model.gamma(), model.hbar(), sigma2, u)
                                  : imt_value(model.gamma(), model.hbar(), sigma2, u, t);
    }
    return out;
}

}  // namespace

RateSeries imt(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, const TimeGrid& grid,
               double dress_shift) {
    return imt_series(model, env, dir, grid, dress_shift, false);
}

RateSeries lt_imt(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir, const TimeGrid& grid,
                  double dress_shift) {
    return imt_series(model, env, dir, grid, dress_shift, true);
}

RateSeries imt_cavity(const DisplacedHarmonicModel& model, const CavityMode& cavity, const ThermalEnv& env,
                      Direction dir, const TimeGrid& grid, bool long_time) {
    const PhotonFactorParams params = photon_params(model, cavity, env);
    RateSeries out = imt_series(model, env, dir, grid, 0.0, long_time);
    out.variant = long_time ? Variant::C_LT_IMT : Variant::C_IMT;
    if (params.alpha() == 0.0) return out;
    const double shift = model.hbar() * cavity.omega_p;
    const RateSeries plus = imt_series(model, env, dir, grid, shift, long_time);
    const RateSeries minus = imt_series(model, env, dir, grid, -shift, long_time);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = cavity_combination(out.values[i], plus.values[i], minus.values[i], params);
    }
    return out;
}

}  // namespace cavfgr
