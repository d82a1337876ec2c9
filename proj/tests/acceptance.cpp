// Acceptance checks, one PASS/FAIL line per criterion.
// Usage: cavfgr_acceptance [criterion...]   (no argument runs all of them)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cavfgr/bath.hpp"
#include "cavfgr/cli.hpp"
#include "cavfgr/correlators.hpp"
#include "cavfgr/dynamics.hpp"
#include "cavfgr/optimizer.hpp"
#include "cavfgr/oracle.hpp"
#include "cavfgr/rates.hpp"

using namespace cavfgr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// Closed form vs Fock-space brute force on 20x20 (t, tau) grids.
Outcome oracle_certification() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Case {
        DisplacedHarmonicModel model;
        ThermalEnv env;
        int n_max;
        double t_max;
    };
    const Case cases[] = {
        {DisplacedHarmonicModel({1.0}, {1.0}, {1.0}, 0.0, 1.0, 0.0, 1.0), ThermalEnv{1.0}, 60, 10.0},
        {DisplacedHarmonicModel({1.0, 1.5}, {0.6, -0.4}, {0.4, 0.5}, 0.3, 1.0, 0.0, 1.0), ThermalEnv{2.0}, 25, 6.0},
    };
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto& c : cases) {
        const auto ts = linspace(0.0, c.t_max, 20);
        const auto taus = linspace(0.0, c.t_max, 20);
        FockConfig fc;
        fc.n_max = c.n_max;
        for (auto dir : {Direction::forward, Direction::backward}) {
            const auto ref = fock_corr_grid(c.model, c.env, dir, ts, taus, fc);
            std::size_t n = 0;
            for (double t : ts) {
                for (double tau : taus) {
                    const auto v = nuclear_corr(c.model, c.env, dir, t, tau);
                    worst = std::max(worst, std::abs(v - ref[n]) / std::abs(ref[n]));
                    ++n;
                    ++points;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-8 && secs < 120.0,
            std::to_string(points) + " points, max rel err " + fmt("%.2e", worst) + " (tol 1e-8), " +
                fmt("%.1f", secs) + " s (limit 120 s)"};
}

Outcome combination_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> w(0.3, 2.0), d(-1.0, 1.0);
    std::vector<double> f(5), r(5), s(5);
    for (int j = 0; j < 5; ++j) {
        f[j] = w(rng);
        r[j] = d(rng);
        s[j] = d(rng);
    }
    const DisplacedHarmonicModel m(f, r, s, 0.6, 1.0, 0.0, 1.0);
    const ThermalEnv env{1.0};
    const TimeGrid g{0.01, 2000};
    const CavityMode c{0.9, 0.7};
    double worst = 0.0;
    for (auto dir : {Direction::forward, Direction::backward}) {
        const auto comb = nefgr_cavity(m, c, env, dir, g);
        const auto direct = nefgr_cavity_direct(m, c, env, dir, g);
        for (std::size_t i = 1; i < g.size(); ++i) worst = std::max(worst, rel(comb.values[i], direct.values[i]));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 10.0, "max rel diff " + fmt("%.2e", worst) + " over 2x2000 nodes (tol 1e-12), " +
                                                fmt("%.1f", secs) + " s (limit 10 s)"};
}

Outcome decoupling() {
    cli::RunConfig cfg;
    GOASpec spec = GOASpec::reference(5.0, 1.0, 0.0);
    cfg.model.goa = spec;
    cfg.cavity = CavityMode{0.961, 0.0};
    cfg.grid = TimeGrid{0.01, 500};
    cfg.variants.assign(std::begin(kAllVariants), std::end(kAllVariants));
    const auto model = cfg.model.build();
    const auto out = cli::execute_run(cfg, model);
    std::map<std::pair<Variant, Direction>, const RateSeries*> by;
    for (const auto& s : out.rates) by[{s.variant, s.direction}] = &s;
    int compared = 0, identical = 0;
    for (Variant v : kAllVariants) {
        if (!is_cavity(v)) continue;
        for (auto dir : {Direction::forward, Direction::backward}) {
            ++compared;
            if (by.at({v, dir})->values == by.at({free_counterpart(v), dir})->values) ++identical;
        }
    }
    return {identical == compared,
            std::to_string(identical) + "/" + std::to_string(compared) + " C-* series bit-identical at g_p = 0"};
}

Outcome detailed_balance() {
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 2.0));
    const ThermalEnv env{1.0};
    const double kf = efgr(m, std::nullopt, env, Direction::forward).value;
    const double kb = efgr(m, std::nullopt, env, Direction::backward).value;
    const double err = rel(kb, std::exp(-2.0) * kf);
    return {err <= 1e-6, "k_b = " + fmt("%.10g", kb) + ", e^{-2} k_f = " + fmt("%.10g", std::exp(-2.0) * kf) +
                             ", rel diff " + fmt("%.2e", err) + " (tol 1e-6)"};
}

Outcome sum_rule() {
    double worst = 0.0;
    for (int n : {1, 10, 200}) {
        for (double eta : {0.5, 1.0, 5.0}) {
            const double want = eta / std::numbers::pi;
            worst = std::max(worst, rel(discretize_ohmic(eta, 1.0, n).sum_rule(), want));
        }
    }
    return {worst <= 1e-12, "N_s in {1, 10, 200}, eta in {0.5, 1, 5}: max rel err " + fmt("%.2e", worst) +
                                " (tol 1e-12)"};
}

Outcome normal_mode_invariance() {
    double worst = 0.0;
    for (double eta : {0.5, 1.0, 5.0}) {
        worst = std::max(worst, rel(reorganization_energy(goa_to_normal_modes(GOASpec::reference(eta, 1.0, 0.0))), 0.5));
    }
    return {worst <= 1e-10, "E_r vs 2 Omega^2 y0^2 = 0.5 for eta in {0.5, 1, 5}: max rel err " + fmt("%.2e", worst) +
                                " (tol 1e-10)"};
}

Outcome plateau_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = goa_to_normal_modes(GOASpec::reference(5.0, 1.0, 0.0));
    const ThermalEnv env{1.0};
    const TimeGrid g{0.01, 2000};
    const CavityMode c{0.961, 1.0};
    bool ok = true;
    std::string detail;
    for (auto dir : {Direction::forward, Direction::backward}) {
        const auto pair = nefgr(m, c, env, dir, g);
        const double keq = efgr(m, std::nullopt, env, dir).value;
        const double ckeq = efgr(m, c, env, dir).value;
        const double dev = (pair.free.back() - keq) / keq;
        const double cdev = (pair.cavity->back() - ckeq) / ckeq;
        ok = ok && std::abs(dev) < 0.05 && std::abs(cdev) < 0.05;
        detail += std::string(to_string(dir)) + ": NE " + fmt("%+.1f%%", 100 * dev) + ", C-NE " +
                  fmt("%+.1f%%", 100 * cdev) + "; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + "tol 5%, " + fmt("%.1f", secs) + " s (limit 60 s)"};
}

Outcome lt_imt_marcus() {
    const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 0.0));
    const double er = reorganization_energy(m);
    double worst = 0.0;
    for (double beta : {1.0, 2.0, 5.0}) {
        for (double gap : {0.0, 0.25, 1.0, 2.0}) {
            const ThermalEnv env{beta};
            const double sigma2 = imt_gap_variance(m, env);
            const double lt = lt_imt_value(m.gamma(), m.hbar(), sigma2, gap - er);
            worst = std::max(worst, rel(lt, marcus_rate(m.gamma(), m.hbar(), beta, er, gap)));
        }
    }
    return {worst <= 1e-12, "12 (beta, gap) pairs on the GOA model: max rel diff " + fmt("%.2e", worst) +
                                " (tol 1e-12)"};
}

Outcome table_two() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Cell { double kT, omega_DA, expected; };
    const Cell cells[] = {{1.0, 0.0, 0.961}, {0.5, 0.0, 0.656}, {0.2, 0.0, 0.379},
                          {1.0, 2.0, 2.266}, {0.5, 2.0, 1.984}, {0.2, 2.0, 1.731}};
    bool ok = true;
    std::string detail = "marcus:";
    for (const auto& c : cells) {
        const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, c.omega_DA));
        const auto r = optimize_omega_p(m, ThermalEnv::from_kT(c.kT), 1.0, {});
        ok = ok && std::abs(r.omega_p_star - c.expected) <= 0.05;
        detail += " " + fmt("%.3f", r.omega_p_star) + "/" + fmt("%.3f", c.expected);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 30.0;
    detail += " (tol 0.05), " + fmt("%.1f", secs) + " s (limit 30 s)";

    // Quantum objective, reported only.
    std::string quantum = "; quantum deviation by eta:";
    OptimizerOptions q;
    q.method = OptimizeMethod::quantum;
    q.scan_points = 60;
    for (double eta : {0.5, 1.0, 5.0}) {
        double worst = 0.0;
        for (const auto& c : cells) {
            const auto m = goa_to_normal_modes(GOASpec::reference(eta, 0.0, c.omega_DA));
            try {
                const auto r = optimize_omega_p(m, ThermalEnv::from_kT(c.kT), 1.0, q);
                worst = std::max(worst, std::abs(r.omega_p_star - c.expected));
            } catch (const std::exception&) {
                worst = NAN;
            }
        }
        quantum += " eta=" + fmt("%g", eta) + " max|d|=" + fmt("%.3f", worst);
    }
    return {ok, detail + quantum};
}

Outcome dynamics_validation() {
    double analytic = 0.0, conservation = 0.0;
    const double k = 0.8;
    const TimeGrid g{1.0 / (k * 2000.0), 2000};
    auto constant = [&](double v, Direction dir) {
        return RateSeries{g, std::vector<double>(g.size(), v), Variant::EQ, dir};
    };
    const auto both = propagate(constant(k, Direction::forward), constant(k, Direction::backward));
    const auto decay = propagate(constant(k, Direction::forward), constant(0.0, Direction::backward));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        analytic = std::max(analytic, std::abs(both.p_donor[i] - 0.5 * (1.0 + std::exp(-2.0 * k * t))));
        analytic = std::max(analytic, std::abs(decay.p_donor[i] - std::exp(-k * t)));
        for (const auto* p : {&both, &decay}) {
            conservation = std::max(conservation, std::abs(p->p_donor[i] + p->p_acceptor[i] - 1.0));
        }
    }

    // Step halving with smooth time-dependent rates.
    auto final_p = [](double dt, std::size_t steps) {
        const TimeGrid grid{dt, steps};
        RateSeries f{grid, {}, Variant::NE, Direction::forward}, b{grid, {}, Variant::NE, Direction::backward};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.time(i);
            f.values.push_back(1.0 + std::sin(3.0 * t));
            b.values.push_back(0.5 * std::cos(t) * std::cos(t));
        }
        const auto p = propagate(f, b);
        return p.p_donor.back();
    };
    const double p1 = final_p(0.1, 20), p2 = final_p(0.05, 40), p3 = final_p(0.025, 80);
    const double order = std::log2(std::abs(p1 - p2) / std::abs(p2 - p3));

    // Conservation on a real rate trajectory.
    cli::RunConfig cfg;
    cfg.model.goa = GOASpec::reference(5.0, 1.0, 0.0);
    cfg.grid = TimeGrid{0.01, 500};
    cfg.variants = {Variant::NE, Variant::IMT};
    const auto out = cli::execute_run(cfg, cfg.model.build());
    for (const auto& p : out.populations) {
        for (std::size_t i = 0; i < p.p_donor.size(); ++i) {
            conservation = std::max(conservation, std::abs(p.p_donor[i] + p.p_acceptor[i] - 1.0));
        }
    }
    return {analytic <= 1e-10 && conservation <= 1e-12 && order >= 3.9,
            "analytic err " + fmt("%.2e", analytic) + " (tol 1e-10), conservation " + fmt("%.2e", conservation) +
                " (tol 1e-12), observed order " + fmt("%.3f", order) + " (min 3.9)"};
}

Outcome figure_shapes() {
    const auto t0 = std::chrono::steady_clock::now();
    const TimeGrid g{0.01, 2000};

    // (a) IMT vs NE-FGR plateau, eta = 5, s = 1, omega_DA = 0; deviation is the worse of the two directions.
    std::vector<double> devs;
    std::string detail = "(a) |IMT/NE - 1| at kT=1,0.5,0.2:";
    for (double kT : {1.0, 0.5, 0.2}) {
        const auto m = goa_to_normal_modes(GOASpec::reference(5.0, 1.0, 0.0));
        const ThermalEnv env = ThermalEnv::from_kT(kT);
        double worst = 0.0;
        std::string parts;
        for (auto dir : {Direction::forward, Direction::backward}) {
            const double ne = nefgr_free(m, env, dir, g).back();
            const double im = imt(m, env, dir, g).back();
            const double d = std::abs(im / ne - 1.0);
            worst = std::max(worst, d);
            parts += (parts.empty() ? "" : "/") + fmt("%.1f%%", 100 * d);
        }
        devs.push_back(worst);
        detail += " " + parts;
    }
    const bool a_ok = devs[0] < 0.10 && devs[0] < devs[1] && devs[1] < devs[2];
    detail += std::string(a_ok ? " ok" : " FAILED") + ";";

    // (b) every omega_DA = 0 cell, cavity frequency from the optimizer.
    std::map<double, double> wp;
    for (double kT : {1.0, 0.5, 0.2}) {
        const auto m = goa_to_normal_modes(GOASpec::reference(1.0, 0.0, 0.0));
        wp[kT] = optimize_omega_p(m, ThermalEnv::from_kT(kT), 1.0, {}).omega_p_star;
    }
    int cells = 0, enhanced = 0;
    double min_ratio = INFINITY;
    for (double kT : {1.0, 0.5, 0.2}) {
        for (double eta : {0.5, 1.0, 5.0}) {
            for (double s : {-3.0, -1.0, 1.0, 3.0, 5.0}) {
                const auto m = goa_to_normal_modes(GOASpec::reference(eta, s, 0.0));
                const ThermalEnv env = ThermalEnv::from_kT(kT);
                bool cell_ok = true;
                for (auto dir : {Direction::forward, Direction::backward}) {
                    const auto pair = nefgr(m, CavityMode{wp[kT], 1.0}, env, dir, g);
                    const double ratio = pair.cavity->back() / pair.free.back();
                    min_ratio = std::min(min_ratio, ratio);
                    cell_ok = cell_ok && pair.cavity->back() >= pair.free.back();
                }
                ++cells;
                if (cell_ok) ++enhanced;
            }
        }
    }
    const bool b_ok = enhanced == cells;
    detail += " (b) " + std::to_string(enhanced) + "/" + std::to_string(cells) +
              " cells with C-NE >= NE in both directions, min ratio " + fmt("%.3f", min_ratio) +
              (b_ok ? " ok" : " FAILED") + "; " + fmt("%.1f", seconds_since(t0)) + " s";
    return {a_ok && b_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"oracle certification", oracle_certification},
        {"combination identity", combination_identity},
        {"decoupling at g_p = 0", decoupling},
        {"detailed balance", detailed_balance},
        {"discretization sum rule", sum_rule},
        {"normal-mode invariance of E_r", normal_mode_invariance},
        {"plateau consistency", plateau_consistency},
        {"LT-IMT equals Marcus", lt_imt_marcus},
        {"optimized cavity frequencies", table_two},
        {"dynamics validation", dynamics_validation},
        {"figure-shape properties", figure_shapes},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
    }
    int failed = 0;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::printf("criterion %d: unknown\n", id);
            ++failed;
            continue;
        }
        const auto& [name, fn] = criteria[id - 1];
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
