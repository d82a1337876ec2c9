#include "cavfgr/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "cavfgr/error.hpp"
#include "cavfgr/parallel.hpp"

namespace cavfgr {

std::string_view to_string(OptimizeMethod m) noexcept { return m == OptimizeMethod::marcus ? "marcus" : "quantum"; }

OptimizeMethod optimize_method_from_string(std::string_view s) {
    if (s == "marcus") return OptimizeMethod::marcus;
    if (s == "quantum") return OptimizeMethod::quantum;
    throw ConfigError("unknown optimizer method '" + std::string(s) + "'");
}

namespace {

// Ratios k_eq(omega_DA +- wp) / k_eq(omega_DA).
class RateRatios {
public:
    RateRatios(const DisplacedHarmonicModel& model, const ThermalEnv& env, const OptimizerOptions& opts)
        : model_(model), env_(env), opts_(opts) {
        if (opts.method == OptimizeMethod::marcus) {
            e_r_ = reorganization_energy(model);
            log_free_ = log_marcus_rate(model.hbar(), env.beta, e_r_, model.hbar() * model.omega_DA());
        } else {
            free_ = efgr(model, std::nullopt, env, Direction::forward, opts.efgr).value;
            if (!(free_ > 0.0)) throw NumericalError("optimizer: cavity-free equilibrium rate is not positive");
            // Shifted rates far in the tails are tiny; judge their convergence on the scale of k_free.
            efgr_opts_ = opts.efgr;
            efgr_opts_.atol = std::max(opts.efgr.atol, 1e-10 * free_ * model.hbar() * model.hbar() / 2.0);
        }
    }

    [[nodiscard]] std::pair<double, double> operator()(double wp) const {
        if (opts_.method == OptimizeMethod::marcus) {
            const double hb = model_.hbar();
            const double gap = hb * model_.omega_DA();
            return {std::exp(log_marcus_rate(hb, env_.beta, e_r_, gap + hb * wp) - log_free_),
                    std::exp(log_marcus_rate(hb, env_.beta, e_r_, gap - hb * wp) - log_free_)};
        }
        const double plus =
            efgr(model_.with_omega_DA(model_.omega_DA() + wp), std::nullopt, env_, Direction::forward, efgr_opts_).value;
        const double minus =
            efgr(model_.with_omega_DA(model_.omega_DA() - wp), std::nullopt, env_, Direction::forward, efgr_opts_).value;
        return {plus / free_, minus / free_};
    }

private:
    const DisplacedHarmonicModel& model_;
    ThermalEnv env_;
    OptimizerOptions opts_;
    EfgrOptions efgr_opts_;
    double e_r_ = 0.0;
    double log_free_ = 0.0;
    double free_ = 0.0;
};

double objective(double alpha, double kappa, double w_ref, double n, std::pair<double, double> ratios, double wp) {
    const double alpha_eff = kappa == 0.0 ? alpha : alpha * std::pow(wp / w_ref, kappa);
    return 1.0 + alpha_eff * (n * ratios.first + (1.0 + n) * ratios.second);
}

}  // namespace

OptimizationResult optimize_omega_p(const DisplacedHarmonicModel& model, const ThermalEnv& env, double g_p,
                                    const OptimizerOptions& opts) {
    env.validate();
    if (!(opts.lo > 0.0) || !(opts.hi > opts.lo)) throw ConfigError("optimizer: bounds must satisfy 0 < lo < hi");
    if (opts.scan_points < 3) throw ConfigError("optimizer: need at least 3 scan points");
    if (!(opts.rel_tol > 0.0)) throw ConfigError("optimizer: rel_tol must be positive");
    if (!(opts.reference_frequency > 0.0)) throw ConfigError("optimizer: reference frequency must be positive");
    if (!(g_p >= 0.0)) throw ConfigError("optimizer: g_p must be non-negative");

    OptimizationResult result;
    result.method = opts.method;
    const auto points = static_cast<std::size_t>(opts.scan_points);
    const double step = (opts.hi - opts.lo) / static_cast<double>(points - 1);
    auto node = [&](std::size_t i) { return i + 1 == points ? opts.hi : opts.lo + step * static_cast<double>(i); };

    if (g_p == 0.0) {
        result.flat = true;
        result.omega_p_star = opts.lo;
        for (std::size_t i = 0; i < points; ++i) result.scan.emplace_back(node(i), 1.0);
        return result;
    }
    if (model.gamma() == 0.0) throw ConfigError("optimizer: Gamma must be nonzero when g_p > 0");

    const double alpha = std::pow(model.hbar() * g_p / model.gamma(), 2);
    const RateRatios ratios(model, env, opts);
    auto f = [&](double wp, double kappa) {
        const double n = mean_photon_number(env, wp, model.hbar());
        return objective(alpha, kappa, opts.reference_frequency, n, ratios(wp), wp);
    };

    result.scan.resize(points);
    parallel_for(points, opts.workers, [&](std::size_t i) {
        const double wp = node(i);
        result.scan[i] = {wp, f(wp, opts.coupling_exponent)};
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < points; ++i) {
        if (result.scan[i].second > result.scan[best].second) best = i;
    }
    result.at_bound = best == 0 || best + 1 == points;

    // Golden-section refinement inside the neighbouring scan cells.
    double a = node(best == 0 ? 0 : best - 1);
    double b = node(std::min(best + 1, points - 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c, opts.coupling_exponent);
    double fd = f(d, opts.coupling_exponent);
    while (b - a > opts.rel_tol * 0.5 * (a + b)) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c, opts.coupling_exponent);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d, opts.coupling_exponent);
        }
    }
    double star = 0.5 * (a + b);
    double f_star = f(star, opts.coupling_exponent);
    if (result.scan[best].second > f_star) {
        star = result.scan[best].first;
        f_star = result.scan[best].second;
    }
    result.omega_p_star = star;
    result.objective = f_star;
    result.enhancement = f(star, 0.0);
    return result;
}

}  // namespace cavfgr
