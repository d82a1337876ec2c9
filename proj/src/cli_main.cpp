#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "cavfgr/cli.hpp"
#include "cavfgr/error.hpp"
#include "cavfgr/oracle.hpp"

namespace cavfgr::cli {

using nlohmann::json;

namespace {

// Command-line values that patch the config document; flags win over the file.
struct Overrides {
    std::string config;
    std::string model_file;
    bool lenient = false;
    std::optional<double> eta, s, omega_DA, gamma, Omega, omega_c, n_secondary;
    std::optional<double> kT, beta, temperature_K;
    std::optional<double> omega_p, g_p;
    std::optional<double> dt, t_max;
    std::vector<std::string> variants;
    std::string output;
    std::optional<unsigned> workers;
    std::optional<double> extend;
    std::optional<double> efgr_rtol, efgr_tau_max;
    bool detailed_balance = false;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--model-file", o.model_file, "model JSON file (replaces the GOA model)");
    app->add_flag("--lenient", o.lenient, "ignore unknown keys in the model file");
    app->add_option("--eta", o.eta, "GOA friction");
    app->add_option("-s,--s", o.s, "GOA ground-state displacement");
    app->add_option("--omega-DA", o.omega_DA, "donor-acceptor gap frequency");
    app->add_option("--gamma", o.gamma, "diabatic coupling");
    app->add_option("--Omega", o.Omega, "GOA primary frequency");
    app->add_option("--omega-c", o.omega_c, "GOA bath cutoff");
    app->add_option("--n-secondary", o.n_secondary, "GOA secondary mode count");
    auto* kt = app->add_option("--kT", o.kT, "thermal energy");
    auto* beta = app->add_option("--beta", o.beta, "inverse temperature");
    auto* temp = app->add_option("--temperature-K", o.temperature_K, "temperature in kelvin (meV_fs models)");
    kt->excludes(beta)->excludes(temp);
    beta->excludes(temp);
    app->add_option("--omega-p", o.omega_p, "cavity frequency");
    app->add_option("--g-p", o.g_p, "cavity coupling");
    app->add_option("--dt", o.dt, "time step");
    app->add_option("--t-max", o.t_max, "final time");
    app->add_option("--variants", o.variants, "rate variants (comma separated)")->delimiter(',');
    app->add_option("-o,--output", o.output, "output directory");
    app->add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
    app->add_option("--extend-with-plateau", o.extend, "propagate populations to this time with frozen rates");
    app->add_option("--efgr-rtol", o.efgr_rtol, "E-FGR relative tolerance");
    app->add_option("--efgr-tau-max", o.efgr_tau_max, "E-FGR integration cap");
    app->add_flag("--efgr-detailed-balance", o.detailed_balance, "backward E-FGR from detailed balance");
}

json& block(json& doc, const char* key) {
    if (!doc.contains(key)) doc[key] = json::object();
    return doc[key];
}

json build_doc(const Overrides& o) {
    json doc = o.config.empty() ? json::object() : read_config_file(o.config);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    // Model paths inside a config file are relative to that file.
    if (!o.config.empty() && doc.contains("model") && doc["model"].is_object() && doc["model"].contains("file") &&
        doc["model"]["file"].is_string()) {
        const std::filesystem::path file = doc["model"]["file"].get<std::string>();
        if (file.is_relative()) doc["model"]["file"] = (std::filesystem::path(o.config).parent_path() / file).string();
    }
    if (!o.model_file.empty()) doc["model"] = json{{"file", o.model_file}};
    if (o.lenient) block(block(doc, "model"), "lenient") = true;
    const std::pair<const char*, const std::optional<double>*> goa_keys[] = {
        {"eta", &o.eta},     {"s", &o.s},             {"omega_DA", &o.omega_DA},
        {"gamma", &o.gamma}, {"Omega", &o.Omega},     {"omega_c", &o.omega_c},
        {"n_secondary", &o.n_secondary}};
    const bool file_model = doc.contains("model") && doc["model"].is_object() && doc["model"].contains("file");
    for (const auto& [key, value] : goa_keys) {
        if (!*value) continue;
        if (file_model) throw ConfigError(std::string("--") + key + " applies to the GOA model only");
        block(block(doc, "model"), "goa")[key] = **value;
    }
    if (o.kT) doc["environment"] = json{{"kT", *o.kT}};
    if (o.beta) doc["environment"] = json{{"beta", *o.beta}};
    if (o.temperature_K) doc["environment"] = json{{"temperature_K", *o.temperature_K}};
    if (o.omega_p) block(doc, "cavity")["omega_p"] = *o.omega_p;
    if (o.g_p) block(doc, "cavity")["g_p"] = *o.g_p;
    if (o.dt) block(doc, "grid")["dt"] = *o.dt;
    if (o.t_max) block(doc, "grid")["t_max"] = *o.t_max;
    if (!o.variants.empty()) doc["variants"] = o.variants;
    if (!o.output.empty()) doc["output"] = o.output;
    if (o.workers) doc["workers"] = *o.workers;
    if (o.extend) doc["extend_with_plateau"] = *o.extend;
    if (o.efgr_rtol) block(doc, "efgr")["rtol"] = *o.efgr_rtol;
    if (o.efgr_tau_max) block(doc, "efgr")["tau_max"] = *o.efgr_tau_max;
    if (o.detailed_balance) block(doc, "efgr")["backward"] = "detailed_balance";
    return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    os << text;
}

std::vector<double> tau_points(double t, double dtau) {
    if (!(dtau > 0.0)) throw ConfigError("--dtau must be positive");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor(t / dtau + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) out.push_back(static_cast<double>(k) * dtau);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavfgr: nonequilibrium Fermi's golden rule rates for charge transfer, free and in an optical cavity"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Overrides run_o, sweep_o, opt_o, probe_o, oracle_o;
    std::string dump_model_path, dump_bath_path;
    auto* run = app.add_subcommand("run", "rates and populations for one parameter set");
    add_common(run, run_o);
    run->add_option("--dump-model", dump_model_path, "write the normal-mode model as JSON");
    run->add_option("--dump-bath", dump_bath_path, "write the discretized GOA bath as JSON");

    std::optional<std::size_t> max_cells;
    std::vector<double> sw_kT, sw_eta, sw_s, sw_da;
    auto* sweep = app.add_subcommand("sweep", "cartesian sweep over kT, eta, s and omega_DA");
    add_common(sweep, sweep_o);
    sweep->add_option("--sweep-kT", sw_kT, "kT axis")->delimiter(',');
    sweep->add_option("--sweep-eta", sw_eta, "eta axis")->delimiter(',');
    sweep->add_option("--sweep-s", sw_s, "s axis")->delimiter(',');
    sweep->add_option("--sweep-omega-DA", sw_da, "omega_DA axis")->delimiter(',');
    sweep->add_option("--max-cells", max_cells, "cap on the number of sweep cells");

    std::string method;
    std::optional<double> lo, hi, ref, exponent;
    std::optional<int> scan_points;
    std::vector<double> opt_kT, opt_da;
    auto* optimize = app.add_subcommand("optimize", "cavity frequency maximizing the cavity-induced rate");
    add_common(optimize, opt_o);
    optimize->add_option("--method", method, "marcus or quantum")->check(CLI::IsMember({"marcus", "quantum"}));
    optimize->add_option("--lo", lo, "lower omega_p bound");
    optimize->add_option("--hi", hi, "upper omega_p bound");
    optimize->add_option("--scan-points", scan_points, "coarse scan size");
    optimize->add_option("--coupling-exponent", exponent, "power of omega_p in the coupling scaling");
    optimize->add_option("--reference-frequency", ref, "frequency at which the coupling equals g_p");
    optimize->add_option("--opt-kT", opt_kT, "kT list")->delimiter(',');
    optimize->add_option("--opt-omega-DA", opt_da, "omega_DA list")->delimiter(',');

    std::vector<double> probe_t;
    double dtau = 0.1;
    bool equilibrium = false;
    std::string direction = "forward", probe_out;
    auto* probe = app.add_subcommand("probe", "nuclear correlation function C(t, tau) as CSV");
    add_common(probe, probe_o);
    probe->add_option("--t", probe_t, "times t (comma separated)")->delimiter(',');
    probe->add_option("--dtau", dtau, "tau spacing on [0, t]");
    probe->add_flag("--equilibrium", equilibrium, "use the equilibrium correlator");
    probe->add_option("--direction", direction, "forward or backward");
    probe->add_option("--csv", probe_out, "write here instead of stdout");

    int n_max = 40;
    auto* oracle = app.add_subcommand("oracle", "brute-force Fock-space check of C(t, tau)");
    oracle->group("");
    add_common(oracle, oracle_o);
    oracle->add_option("--t", probe_t, "times t (comma separated)")->delimiter(',');
    oracle->add_option("--dtau", dtau, "tau spacing on [0, t]");
    oracle->add_option("--direction", direction, "forward or backward");
    oracle->add_option("--n-max", n_max, "Fock truncation per mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            const RunConfig cfg = run_config_from_json(build_doc(run_o));
            const DisplacedHarmonicModel model = cfg.model.build();
            if (!dump_model_path.empty()) save_model_file(model, dump_model_path);
            if (!dump_bath_path.empty()) {
                if (!cfg.model.goa) throw ConfigError("--dump-bath requires a GOA model");
                const auto& g = *cfg.model.goa;
                write_text(dump_bath_path, dump_bath(discretize_ohmic(g.eta, g.omega_c, g.n_secondary)));
            }
            const RunOutput out = execute_run(cfg, model);
            write_run(out, cfg.output);
            std::cout << "wrote " << cfg.output.string() << "/{rates.csv,populations.csv,meta.json}\n";
            for (const auto& s : out.rates) {
                std::cout << "  " << to_string(s.variant) << " " << to_string(s.direction)
                          << " k(t_max) = " << format_double(s.back()) << "\n";
            }
        } else if (sweep->parsed()) {
            json doc = build_doc(sweep_o);
            const std::pair<const char*, const std::vector<double>*> axes[] = {
                {"kT", &sw_kT}, {"eta", &sw_eta}, {"s", &sw_s}, {"omega_DA", &sw_da}};
            for (const auto& [key, values] : axes) {
                if (!values->empty()) block(doc, "sweep")[key] = *values;
            }
            if (max_cells) block(doc, "sweep")["max_cells"] = *max_cells;
            const SweepConfig cfg = sweep_config_from_json(doc);
            const SweepSummary summary = execute_sweep(cfg);
            std::cout << "sweep: " << summary.cells << " cells, " << summary.failed << " failed; index at "
                      << (cfg.base.output / "index.csv").string() << "\n";
            if (summary.failed > 0) return 3;
        } else if (optimize->parsed()) {
            json doc = build_doc(opt_o);
            json& o = block(doc, "optimize");
            if (!method.empty()) o["method"] = method;
            if (lo) o["lo"] = *lo;
            if (hi) o["hi"] = *hi;
            if (scan_points) o["scan_points"] = *scan_points;
            if (exponent) o["coupling_exponent"] = *exponent;
            if (ref) o["reference_frequency"] = *ref;
            if (!opt_kT.empty()) o["kT"] = opt_kT;
            if (!opt_da.empty()) o["omega_DA"] = opt_da;
            const OptimizeConfig cfg = optimize_config_from_json(doc);
            for (const auto& r : execute_optimize(cfg)) {
                std::cout << "omega_p* = " << format_double(r.omega_p_star) << "  objective = "
                          << format_double(r.objective) << "\n";
                if (r.flat) std::cerr << "warning: objective is flat (g_p = 0); omega_p* is the lower bound\n";
                else if (r.at_bound) std::cerr << "warning: optimum sits on a search bound\n";
            }
        } else {
            const bool is_oracle = oracle->parsed();
            const RunConfig cfg = run_config_from_json(build_doc(is_oracle ? oracle_o : probe_o));
            const DisplacedHarmonicModel model = cfg.model.build();
            const ThermalEnv env = cfg.env.resolve(model);
            const Direction dir = direction_from_string(direction);
            if (probe_t.empty()) probe_t = {cfg.grid.t_max()};
            std::ofstream file;
            if (!probe_out.empty()) {
                file.open(probe_out, std::ios::binary);
                if (!file) throw ConfigError("cannot open '" + probe_out + "' for writing");
            }
            std::ostream& os = probe_out.empty() ? std::cout : file;
            if (is_oracle) {
                FockConfig fc;
                fc.n_max = n_max;
                os << "t,tau,oracle_re,oracle_im,closed_re,closed_im,abs_diff\n";
                for (double t : probe_t) {
                    const auto taus = tau_points(t, dtau);
                    const auto ref_values = fock_corr_grid(model, env, dir, {t}, taus, fc);
                    for (std::size_t k = 0; k < taus.size(); ++k) {
                        const auto c = nuclear_corr(model, env, dir, t, taus[k], cfg.correlator);
                        os << format_double(t) << "," << format_double(taus[k]) << ","
                           << format_double(ref_values[k].real()) << "," << format_double(ref_values[k].imag())
                           << "," << format_double(c.real()) << "," << format_double(c.imag()) << ","
                           << format_double(std::abs(c - ref_values[k])) << "\n";
                    }
                }
            } else {
                os << "t,tau,re,im\n";
                for (double t : probe_t) {
                    for (double tau : tau_points(t, dtau)) {
                        const auto c = equilibrium ? equilibrium_corr(model, env, dir, tau, cfg.correlator)
                                                   : nuclear_corr(model, env, dir, t, tau, cfg.correlator);
                        os << format_double(t) << "," << format_double(tau) << "," << format_double(c.real())
                           << "," << format_double(c.imag()) << "\n";
                    }
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace cavfgr::cli
