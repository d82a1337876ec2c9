// rates.hpp: rate coefficients: cavity-free, dressed and cavity-modified
// NE-FGR, the E-FGR constants, and the IMT / LT-IMT closures.
//
// NE-FGR:   k(t)   = (2/hbar^2) Re int_0^t dtau C^p(tau) C^n(t, tau)
// E-FGR:    k_eq   = (2/hbar^2) Re int_0^inf dtau C^p(tau) C^n_eq(tau)
// IMT:      k(t)   = (Gamma^2/hbar) sqrt(2 pi)/sigma exp(-<U>_t^2/2sigma^2) Re erf(sigma t/(sqrt2 hbar) - i <U>_t/(sqrt2 sigma))
// LT-IMT:   k(t)   = (Gamma^2/hbar) sqrt(2 pi/sigma^2) exp(-<U>_t^2/2sigma^2)
//
// The cavity enters through C^p = 1 + alpha <n>(e^{i wp tau} + e^{beta hbar wp} e^{-i wp tau}),
// so every cavity rate is k_free + alpha <n> [k(+wp) + e^{beta hbar wp} k(-wp)]
// where k(+-wp) is the rate with integrand e^{+-i wp tau} C^n.

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cavfgr/correlators.hpp"
#include "cavfgr/model.hpp"

namespace cavfgr {

/// Uniform grid t_i = i dt, i = 0..steps.
struct TimeGrid {
    double dt = 0.01;
    std::size_t steps = 2000;

    /// Requires t_max/dt to be an integer >= 2 (to 1e-9 relative).
    [[nodiscard]] static TimeGrid from_tmax(double t_max, double dt);
    [[nodiscard]] double t_max() const noexcept { return dt * static_cast<double>(steps); }
    [[nodiscard]] double time(std::size_t i) const noexcept { return dt * static_cast<double>(i); }
    [[nodiscard]] std::size_t size() const noexcept { return steps + 1; }
    void validate() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

enum class Variant { NE, C_NE, EQ, C_EQ, IMT, C_IMT, LT_IMT, C_LT_IMT };

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
[[nodiscard]] Variant variant_from_string(std::string_view s);
[[nodiscard]] bool is_cavity(Variant v) noexcept;
/// The cavity-free counterpart of a C-* variant (identity for free variants).
[[nodiscard]] Variant free_counterpart(Variant v) noexcept;
inline constexpr Variant kAllVariants[] = {Variant::NE,  Variant::C_NE,  Variant::EQ,     Variant::C_EQ,
                                           Variant::IMT, Variant::C_IMT, Variant::LT_IMT, Variant::C_LT_IMT};

struct RateSeries {
    TimeGrid grid;
    std::vector<double> values;
    Variant variant = Variant::NE;
    Direction direction = Direction::forward;

    [[nodiscard]] double back() const { return values.back(); }
};

struct RateOptions {
    unsigned workers = 0;  // 0 = hardware concurrency
    CorrelatorOptions correlator;
};

/// Quadrature weights (in units of dt) for int_0^{n dt} on n intervals:
/// composite Simpson for even n, Simpson plus a closing 3/8 panel for odd n >= 3,
/// trapezoid for n = 1.
[[nodiscard]] std::vector<double> quadrature_weights(std::size_t intervals);

/// Cavity-free NE-FGR and, when a cavity is given, the cavity-modified rate,
/// both from a single pass over the (t, tau) triangle.
struct NefgrPair {
    RateSeries free;
    std::optional<RateSeries> cavity;
};

[[nodiscard]] NefgrPair nefgr(const DisplacedHarmonicModel& model, const std::optional<CavityMode>& cavity,
                              const ThermalEnv& env, Direction dir, const TimeGrid& grid,
                              const RateOptions& opts = {});

[[nodiscard]] RateSeries nefgr_free(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                                    const TimeGrid& grid, const RateOptions& opts = {});

/// Integrand e^{i shift tau} C^n(t, tau); shift is +-omega_p.
[[nodiscard]] RateSeries nefgr_dressed(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                                       const TimeGrid& grid, double shift, const RateOptions& opts = {});

/// Combination path (default).
[[nodiscard]] RateSeries nefgr_cavity(const DisplacedHarmonicModel& model, const CavityMode& cavity,
                                      const ThermalEnv& env, Direction dir, const TimeGrid& grid,
                                      const RateOptions& opts = {});

/// Direct quadrature of C^p(tau) C^n(t, tau).
[[nodiscard]] RateSeries nefgr_cavity_direct(const DisplacedHarmonicModel& model, const CavityMode& cavity,
                                             const ThermalEnv& env, Direction dir, const TimeGrid& grid,
                                             const RateOptions& opts = {});

/// alpha <n> [k_plus + e^{beta hbar wp} k_minus] added to k_free; returns k_free
/// untouched when g_p = 0.
[[nodiscard]] double cavity_combination(double k_free, double k_plus, double k_minus, const PhotonFactorParams& p);

struct EfgrOptions {
    double rtol = 1e-8;
    double atol = 0.0;
    double tau_max = 200.0;
    /// Panel width for the adaptive Gauss-Kronrod pieces.
    double panel = 0.25;
    /// Convergence is judged over this many trailing panels.
    int probe_panels = 8;
    /// Backward rate from e^{-beta hbar omega_DA} k_forward instead of its own integral.
    bool backward_via_detailed_balance = false;
    CorrelatorOptions correlator;
};

struct EfgrResult {
    double value = 0.0;
    double tau_end = 0.0;
    /// |I(tau_end) - I(tau_end - probe window)| at termination.
    double variation = 0.0;
    std::size_t panels = 0;
};

[[nodiscard]] EfgrResult efgr(const DisplacedHarmonicModel& model, const std::optional<CavityMode>& cavity,
                              const ThermalEnv& env, Direction dir, const EfgrOptions& opts = {});

/// Constant series holding an E-FGR constant at every node.
[[nodiscard]] RateSeries constant_series(const TimeGrid& grid, double value, Variant variant, Direction dir);

/// Pointwise IMT rate. `dress_shift` is an energy added to <U>_t.
[[nodiscard]] RateSeries imt(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                             const TimeGrid& grid, double dress_shift = 0.0);
[[nodiscard]] RateSeries lt_imt(const DisplacedHarmonicModel& model, const ThermalEnv& env, Direction dir,
                                const TimeGrid& grid, double dress_shift = 0.0);
[[nodiscard]] RateSeries imt_cavity(const DisplacedHarmonicModel& model, const CavityMode& cavity,
                                    const ThermalEnv& env, Direction dir, const TimeGrid& grid, bool long_time);

/// Single-point IMT value for gap mean u, variance sigma2, at time t.
[[nodiscard]] double imt_value(double gamma, double hbar, double sigma2, double u, double t);
[[nodiscard]] double lt_imt_value(double gamma, double hbar, double sigma2, double u);
/// (Gamma^2/hbar) sqrt(pi beta/E_r) exp(-beta (gap - E_r)^2 / (4 E_r)); gap = hbar omega_DA.
[[nodiscard]] double marcus_rate(double gamma, double hbar, double beta, double e_r, double gap);
/// Natural log of marcus_rate / Gamma^2, usable where the rate itself underflows.
[[nodiscard]] double log_marcus_rate(double hbar, double beta, double e_r, double gap);

}  // namespace cavfgr
