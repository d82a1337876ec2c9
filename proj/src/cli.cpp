#include "cavfgr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cavfgr/error.hpp"

namespace cavfgr::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string short_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, 0.0, where);
}

std::vector<double> number_list(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return {};
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array");
    if (v.empty()) throw ConfigError(where + "." + key + ": empty axis");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + "." + key + " entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out + "\"";
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return os;
}

GOASpec parse_goa(const json& obj) {
    reject_unknown(obj, {"Omega", "y0", "eta", "omega_c", "n_secondary", "omega_DA", "gamma", "s", "e_ground"},
                   "model.goa");
    GOASpec spec;
    spec.Omega = number(obj, "Omega", spec.Omega, "model.goa");
    spec.y0 = number(obj, "y0", spec.y0, "model.goa");
    spec.eta = number(obj, "eta", spec.eta, "model.goa");
    spec.omega_c = number(obj, "omega_c", spec.omega_c, "model.goa");
    const double n = number(obj, "n_secondary", spec.n_secondary, "model.goa");
    if (n != std::floor(n) || n < 1 || n > 1e6) throw ConfigError("model.goa.n_secondary must be a positive integer");
    spec.n_secondary = static_cast<int>(n);
    spec.omega_DA = number(obj, "omega_DA", spec.omega_DA, "model.goa");
    spec.gamma = number(obj, "gamma", spec.gamma, "model.goa");
    spec.s = number(obj, "s", spec.s, "model.goa");
    spec.e_ground = number(obj, "e_ground", spec.e_ground, "model.goa");
    spec.validate();
    return spec;
}

json goa_to_json(const GOASpec& g) {
    return json{{"Omega", g.Omega},       {"y0", g.y0},     {"eta", g.eta}, {"omega_c", g.omega_c},
                {"n_secondary", g.n_secondary}, {"omega_DA", g.omega_DA}, {"gamma", g.gamma}, {"s", g.s},
                {"e_ground", g.e_ground}, {"hbar", g.hbar}};
}

ModelSource parse_model(const json& doc) {
    ModelSource src;
    if (!doc.contains("model")) {
        src.goa = GOASpec{};
        return src;
    }
    const json& m = doc.at("model");
    reject_unknown(m, {"goa", "file", "lenient"}, "model");
    if (m.contains("goa") == m.contains("file")) throw ConfigError("model: give exactly one of 'goa' or 'file'");
    if (m.contains("goa")) {
        if (m.contains("lenient")) throw ConfigError("model.lenient applies to model files only");
        src.goa = parse_goa(m.at("goa"));
    } else {
        if (!m.at("file").is_string()) throw ConfigError("model.file must be a path string");
        src.file = m.at("file").get<std::string>();
        if (m.contains("lenient")) {
            if (!m.at("lenient").is_boolean()) throw ConfigError("model.lenient must be a boolean");
            src.lenient = m.at("lenient").get<bool>();
        }
    }
    return src;
}

EnvSpec parse_env(const json& doc) {
    EnvSpec env;
    if (!doc.contains("environment")) return env;
    const json& e = doc.at("environment");
    reject_unknown(e, {"kT", "beta", "temperature_K"}, "environment");
    if (e.size() != 1) throw ConfigError("environment: give exactly one of kT, beta, temperature_K");
    if (e.contains("kT")) env = {EnvKind::kT, number(e, "kT", 0.0, "environment")};
    if (e.contains("beta")) env = {EnvKind::beta, number(e, "beta", 0.0, "environment")};
    if (e.contains("temperature_K")) env = {EnvKind::temperature_K, number(e, "temperature_K", 0.0, "environment")};
    if (!(env.value > 0.0) || !std::isfinite(env.value)) throw ConfigError("environment value must be positive");
    return env;
}

RunConfig parse_run(const json& doc, bool cavity_frequency_required) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc,
                   {"description", "model", "environment", "cavity", "grid", "variants", "efgr", "correlator", "output",
                    "workers", "extend_with_plateau", "sweep", "optimize"},
                   "config");
    RunConfig cfg;
    if (doc.contains("description")) {
        if (!doc.at("description").is_string()) throw ConfigError("description must be a string");
        cfg.description = doc.at("description").get<std::string>();
    }
    cfg.model = parse_model(doc);
    cfg.env = parse_env(doc);

    if (doc.contains("cavity")) {
        const json& c = doc.at("cavity");
        reject_unknown(c, {"omega_p", "g_p"}, "cavity");
        if (!c.contains("g_p")) throw ConfigError("cavity.g_p is required");
        if (cavity_frequency_required && !c.contains("omega_p")) throw ConfigError("cavity.omega_p is required");
        CavityMode mode{number(c, "omega_p", 1.0, "cavity"), number(c, "g_p", 0.0, "cavity")};
        mode.validate();
        cfg.cavity = mode;
    }

    double dt = 0.01, t_max = 20.0;
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        reject_unknown(g, {"dt", "t_max"}, "grid");
        dt = number(g, "dt", dt, "grid");
        t_max = number(g, "t_max", t_max, "grid");
    }
    cfg.grid = TimeGrid::from_tmax(t_max, dt);

    std::set<Variant> requested;
    if (doc.contains("variants")) {
        const json& v = doc.at("variants");
        if (!v.is_array()) throw ConfigError("variants must be an array of names");
        for (const auto& name : v) {
            if (!name.is_string()) throw ConfigError("variants must be an array of names");
            requested.insert(variant_from_string(name.get<std::string>()));
        }
        if (requested.empty()) throw ConfigError("at least one variant is required");
    } else {
        requested = {Variant::NE, Variant::EQ, Variant::IMT, Variant::LT_IMT};
        if (cfg.cavity) requested.insert({Variant::C_NE, Variant::C_EQ, Variant::C_IMT, Variant::C_LT_IMT});
    }
    for (Variant v : kAllVariants) {
        if (!requested.count(v)) continue;
        if (is_cavity(v) && !cfg.cavity) {
            throw ConfigError("variant " + std::string(to_string(v)) + " requires a cavity block");
        }
        cfg.variants.push_back(v);
    }

    if (doc.contains("efgr")) {
        const json& e = doc.at("efgr");
        reject_unknown(e, {"rtol", "atol", "tau_max", "panel", "probe_panels", "backward"}, "efgr");
        cfg.efgr.rtol = number(e, "rtol", cfg.efgr.rtol, "efgr");
        cfg.efgr.atol = number(e, "atol", cfg.efgr.atol, "efgr");
        cfg.efgr.tau_max = number(e, "tau_max", cfg.efgr.tau_max, "efgr");
        cfg.efgr.panel = number(e, "panel", cfg.efgr.panel, "efgr");
        cfg.efgr.probe_panels = static_cast<int>(number(e, "probe_panels", cfg.efgr.probe_panels, "efgr"));
        if (e.contains("backward")) {
            const std::string mode = e.at("backward").is_string() ? e.at("backward").get<std::string>() : "";
            if (mode == "integral") cfg.efgr.backward_via_detailed_balance = false;
            else if (mode == "detailed_balance") cfg.efgr.backward_via_detailed_balance = true;
            else throw ConfigError("efgr.backward must be 'integral' or 'detailed_balance'");
        }
    }
    if (!(cfg.efgr.rtol > 0.0) || !(cfg.efgr.atol >= 0.0) || !(cfg.efgr.panel > 0.0) ||
        !(cfg.efgr.tau_max > cfg.efgr.panel) || cfg.efgr.probe_panels < 1) {
        throw ConfigError("efgr: invalid convergence settings");
    }
    if (doc.contains("correlator")) {
        const json& c = doc.at("correlator");
        reject_unknown(c, {"exponent_cap"}, "correlator");
        cfg.correlator.exponent_cap = number(c, "exponent_cap", cfg.correlator.exponent_cap, "correlator");
    }
    cfg.efgr.correlator = cfg.correlator;

    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("output must be a path string");
        cfg.output = doc.at("output").get<std::string>();
    }
    if (doc.contains("workers")) {
        const double w = number(doc, "workers", 0.0, "config");
        if (w < 0 || w != std::floor(w) || w > 4096) throw ConfigError("workers must be a non-negative integer");
        cfg.workers = static_cast<unsigned>(w);
    }
    cfg.extend_to = number(doc, "extend_with_plateau", 0.0, "config");
    if (cfg.extend_to < 0.0) throw ConfigError("extend_with_plateau must be a non-negative time");
    return cfg;
}

void write_rows(std::ostream& os, const std::vector<std::string>& header,
                const std::vector<const std::vector<double>*>& columns, const TimeGrid& grid, std::size_t rows) {
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << "\n";
    for (std::size_t i = 0; i < rows; ++i) {
        os << format_double(grid.time(i));
        for (const auto* col : columns) os << "," << (i < col->size() ? format_double((*col)[i]) : "");
        os << "\n";
    }
}

template <typename Fn>
auto with_context(std::string_view what, Direction dir, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(what) + " (" + std::string(to_string(dir)) + "): " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(what) + " (" + std::string(to_string(dir)) + "): " + e.what());
    }
}

json efgr_json(const EfgrResult& r) {
    return json{{"value", r.value}, {"tau_end", r.tau_end}, {"variation", r.variation}, {"panels", r.panels}};
}

std::string column_name(const RateSeries& s) {
    return std::string(to_string(s.variant)) + (s.direction == Direction::forward ? "_fwd" : "_bwd");
}

}  // namespace

ThermalEnv EnvSpec::resolve(const DisplacedHarmonicModel& model) const {
    switch (kind) {
        case EnvKind::kT: return ThermalEnv::from_kT(value);
        case EnvKind::beta: {
            ThermalEnv env{value};
            env.validate();
            return env;
        }
        case EnvKind::temperature_K:
            if (model.units() != "meV_fs") throw ConfigError("temperature_K requires a model in meV_fs units");
            return ThermalEnv::from_kT(kBoltzmannMeVPerK * value);
    }
    throw ConfigError("environment: unknown kind");
}

json EnvSpec::to_json() const {
    switch (kind) {
        case EnvKind::kT: return json{{"kT", value}};
        case EnvKind::beta: return json{{"beta", value}};
        case EnvKind::temperature_K: return json{{"temperature_K", value}};
    }
    return json();
}

DisplacedHarmonicModel ModelSource::build() const {
    if (goa) return goa_to_normal_modes(*goa);
    return load_model_file(file, lenient);
}

json ModelSource::to_json() const {
    if (goa) return json{{"goa", goa_to_json(*goa)}};
    return json{{"file", file.string()}, {"lenient", lenient}};
}

json read_config_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
}

RunConfig run_config_from_json(const json& doc) { return parse_run(doc, true); }

SweepConfig sweep_config_from_json(const json& doc) {
    SweepConfig cfg;
    cfg.base = parse_run(doc, true);
    if (!doc.contains("sweep")) throw ConfigError("sweep block is required");
    const json& s = doc.at("sweep");
    reject_unknown(s, {"kT", "eta", "s", "omega_DA", "omega_p_table", "max_cells"}, "sweep");
    cfg.kT = number_list(s, "kT", "sweep");
    cfg.eta = number_list(s, "eta", "sweep");
    cfg.s = number_list(s, "s", "sweep");
    cfg.omega_DA = number_list(s, "omega_DA", "sweep");
    if (cfg.kT.empty() && cfg.eta.empty() && cfg.s.empty() && cfg.omega_DA.empty()) {
        throw ConfigError("sweep needs at least one axis");
    }
    if ((!cfg.eta.empty() || !cfg.s.empty()) && !cfg.base.model.goa) {
        throw ConfigError("sweep axes eta and s require a goa model");
    }
    const double cap = number(s, "max_cells", 500.0, "sweep");
    if (cap < 1 || cap != std::floor(cap)) throw ConfigError("sweep.max_cells must be a positive integer");
    cfg.max_cells = static_cast<std::size_t>(cap);
    if (s.contains("omega_p_table")) {
        if (!cfg.base.cavity) throw ConfigError("sweep.omega_p_table requires a cavity block");
        const json& table = s.at("omega_p_table");
        if (!table.is_array()) throw ConfigError("sweep.omega_p_table must be an array");
        for (const auto& row : table) {
            reject_unknown(row, {"kT", "eta", "s", "omega_DA", "omega_p"}, "sweep.omega_p_table");
            OmegaPEntry e;
            e.kT = optional_number(row, "kT", "sweep.omega_p_table");
            e.eta = optional_number(row, "eta", "sweep.omega_p_table");
            e.s = optional_number(row, "s", "sweep.omega_p_table");
            e.omega_DA = optional_number(row, "omega_DA", "sweep.omega_p_table");
            if (!row.contains("omega_p")) throw ConfigError("sweep.omega_p_table rows need omega_p");
            e.omega_p = number(row, "omega_p", 0.0, "sweep.omega_p_table");
            if (!(e.omega_p > 0.0)) throw ConfigError("sweep.omega_p_table: omega_p must be positive");
            cfg.omega_p_table.push_back(e);
        }
    }
    return cfg;
}

OptimizeConfig optimize_config_from_json(const json& doc) {
    OptimizeConfig cfg;
    cfg.base = parse_run(doc, false);
    if (!cfg.base.cavity) throw ConfigError("optimize needs a cavity block with g_p");
    if (doc.contains("optimize")) {
        const json& o = doc.at("optimize");
        reject_unknown(o,
                       {"method", "lo", "hi", "scan_points", "rel_tol", "coupling_exponent", "reference_frequency",
                        "kT", "omega_DA"},
                       "optimize");
        auto& opt = cfg.options;
        if (o.contains("method")) {
            if (!o.at("method").is_string()) throw ConfigError("optimize.method must be a string");
            opt.method = optimize_method_from_string(o.at("method").get<std::string>());
        }
        if (o.contains("lo") != o.contains("hi")) throw ConfigError("optimize: give both lo and hi");
        if (o.contains("lo")) {
            cfg.bounds_given = true;
            opt.lo = number(o, "lo", 0.0, "optimize");
            opt.hi = number(o, "hi", 0.0, "optimize");
        }
        opt.scan_points = static_cast<int>(number(o, "scan_points", opt.scan_points, "optimize"));
        opt.rel_tol = number(o, "rel_tol", opt.rel_tol, "optimize");
        opt.coupling_exponent = number(o, "coupling_exponent", opt.coupling_exponent, "optimize");
        if (o.contains("reference_frequency")) {
            cfg.reference_given = true;
            opt.reference_frequency = number(o, "reference_frequency", 1.0, "optimize");
        }
        cfg.kT = number_list(o, "kT", "optimize");
        cfg.omega_DA = number_list(o, "omega_DA", "optimize");
    }
    cfg.options.efgr = cfg.base.efgr;
    cfg.options.workers = cfg.base.workers;
    return cfg;
}

RunOutput execute_run(const RunConfig& cfg, const DisplacedHarmonicModel& model) {
    const ThermalEnv env = cfg.env.resolve(model);
    const RateOptions ropts{cfg.workers, cfg.correlator};
    EfgrOptions eopts = cfg.efgr;
    eopts.correlator = cfg.correlator;
    auto wants = [&](Variant v) { return std::find(cfg.variants.begin(), cfg.variants.end(), v) != cfg.variants.end(); };
    for (Variant v : cfg.variants) {
        if (is_cavity(v) && !cfg.cavity) {
            throw ConfigError("variant " + std::string(to_string(v)) + " requires a cavity block");
        }
    }

    std::map<std::pair<Variant, Direction>, RateSeries> series;
    json efgr_meta = json::object();
    for (Direction dir : {Direction::forward, Direction::backward}) {
        const std::string d(to_string(dir));
        if (wants(Variant::NE) || wants(Variant::C_NE)) {
            auto pair = with_context("NE", dir, [&] {
                return nefgr(model, wants(Variant::C_NE) ? cfg.cavity : std::nullopt, env, dir, cfg.grid, ropts);
            });
            if (wants(Variant::NE)) series.emplace(std::make_pair(Variant::NE, dir), pair.free);
            if (pair.cavity) series.emplace(std::make_pair(Variant::C_NE, dir), *pair.cavity);
        }
        if (wants(Variant::EQ)) {
            const EfgrResult r = with_context("EQ", dir, [&] { return efgr(model, std::nullopt, env, dir, eopts); });
            efgr_meta["EQ_" + d] = efgr_json(r);
            series.emplace(std::make_pair(Variant::EQ, dir), constant_series(cfg.grid, r.value, Variant::EQ, dir));
        }
        if (wants(Variant::C_EQ)) {
            const EfgrResult r = with_context("C-EQ", dir, [&] { return efgr(model, cfg.cavity, env, dir, eopts); });
            efgr_meta["C-EQ_" + d] = efgr_json(r);
            series.emplace(std::make_pair(Variant::C_EQ, dir),
                           constant_series(cfg.grid, r.value, Variant::C_EQ, dir));
        }
        if (wants(Variant::IMT)) {
            series.emplace(std::make_pair(Variant::IMT, dir),
                           with_context("IMT", dir, [&] { return imt(model, env, dir, cfg.grid); }));
        }
        if (wants(Variant::C_IMT)) {
            series.emplace(std::make_pair(Variant::C_IMT, dir), with_context("C-IMT", dir, [&] {
                               return imt_cavity(model, *cfg.cavity, env, dir, cfg.grid, false);
                           }));
        }
        if (wants(Variant::LT_IMT)) {
            series.emplace(std::make_pair(Variant::LT_IMT, dir),
                           with_context("LT-IMT", dir, [&] { return lt_imt(model, env, dir, cfg.grid); }));
        }
        if (wants(Variant::C_LT_IMT)) {
            series.emplace(std::make_pair(Variant::C_LT_IMT, dir), with_context("C-LT-IMT", dir, [&] {
                               return imt_cavity(model, *cfg.cavity, env, dir, cfg.grid, true);
                           }));
        }
    }

    RunOutput out;
    json finals = json::object(), final_pops = json::object();
    for (Variant v : cfg.variants) {
        const RateSeries& fwd = series.at({v, Direction::forward});
        const RateSeries& bwd = series.at({v, Direction::backward});
        out.rates.push_back(fwd);
        out.rates.push_back(bwd);
        out.populations.push_back(propagate(fwd, bwd, PropagateOptions{cfg.extend_to}));
        finals[column_name(fwd)] = fwd.back();
        finals[column_name(bwd)] = bwd.back();
        final_pops[std::string(to_string(v))] = out.populations.back().p_donor.back();
    }

    json meta;
    meta["code"] = {{"name", "cavfgr"}, {"version", kVersion}};
    if (!cfg.description.empty()) meta["description"] = cfg.description;
    meta["model"] = cfg.model.to_json();
    meta["model"]["modes"] = model.size();
    meta["model"]["units"] = model.units();
    meta["model"]["hbar"] = model.hbar();
    meta["model"]["omega_DA"] = model.omega_DA();
    meta["model"]["gamma"] = model.gamma();
    meta["model"]["reorganization_energy"] = reorganization_energy(model);
    meta["environment"] = cfg.env.to_json();
    meta["environment"]["beta"] = env.beta;
    meta["environment"]["kT_resolved"] = env.kT();
    if (cfg.cavity) {
        const PhotonFactorParams p{*cfg.cavity, model.gamma(), env.beta, model.hbar()};
        meta["cavity"] = {{"omega_p", cfg.cavity->omega_p},
                          {"g_p", cfg.cavity->g_p},
                          {"G", cfg.cavity->coupling_G(model.hbar())},
                          {"alpha", cfg.cavity->g_p > 0.0 ? p.alpha() : 0.0},
                          {"mean_photons", p.mean_photons()}};
    } else {
        meta["cavity"] = nullptr;
    }
    meta["grid"] = {{"dt", cfg.grid.dt}, {"t_max", cfg.grid.t_max()}, {"steps", cfg.grid.steps}};
    json names = json::array();
    for (Variant v : cfg.variants) names.push_back(to_string(v));
    meta["variants"] = names;
    meta["numerics"] = {
        {"nefgr_quadrature",
         "composite Simpson on the uniform tau grid (spacing dt); closing 3/8 panel for odd interval counts; "
         "trapezoid for a single interval"},
        {"nefgr_combination", "k_free + alpha <n> [k(+omega_p) + e^{beta hbar omega_p} k(-omega_p)]"},
        {"correlator_exponent_cap", cfg.correlator.exponent_cap},
        {"summation", "Neumaier-compensated, fixed order per node"},
        {"efgr",
         {{"rule", "adaptive 31-point Gauss-Kronrod per panel"},
          {"rtol", eopts.rtol},
          {"atol", eopts.atol},
          {"tau_max", eopts.tau_max},
          {"panel", eopts.panel},
          {"probe_panels", eopts.probe_panels},
          {"backward", eopts.backward_via_detailed_balance ? "detailed_balance" : "integral"}}},
        {"imt_erf", "Faddeeva w(z): power series near the origin, Laplace continued fraction elsewhere"},
        {"dynamics",
         {{"integrator", "classic RK4, step dt"},
          {"half_step_rates", "4-point cubic Lagrange interpolation, one-sided at the ends"},
          {"extend_with_plateau", cfg.extend_to > cfg.grid.t_max() ? json(cfg.extend_to) : json(false)}}}};
    meta["results"] = {{"efgr", efgr_meta}, {"final_rates", finals}, {"final_p_donor", final_pops}};
    out.meta = std::move(meta);
    return out;
}

void write_run(const RunOutput& out, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::vector<std::string> header{"t"};
        std::vector<const std::vector<double>*> cols;
        for (const auto& s : out.rates) {
            header.push_back(column_name(s));
            cols.push_back(&s.values);
        }
        auto os = open_output(dir / "rates.csv");
        write_rows(os, header, cols, out.rates.front().grid, out.rates.front().grid.size());
    }
    {
        std::vector<std::string> header{"t"};
        std::vector<const std::vector<double>*> cols;
        for (const auto& p : out.populations) {
            header.emplace_back(to_string(p.variant));
            cols.push_back(&p.p_donor);
        }
        const TimeGrid& grid = out.populations.front().grid;
        auto os = open_output(dir / "populations.csv");
        write_rows(os, header, cols, grid, grid.size());
    }
    auto os = open_output(dir / "meta.json");
    os << out.meta.dump(2) << "\n";
}

SweepSummary execute_sweep(const SweepConfig& cfg) {
    const auto axis = [](const std::vector<double>& v) { return v.empty() ? std::vector<double>{NAN} : v; };
    const auto kts = axis(cfg.kT), etas = axis(cfg.eta), ss = axis(cfg.s), das = axis(cfg.omega_DA);
    const std::size_t cells = kts.size() * etas.size() * ss.size() * das.size();
    if (cells > cfg.max_cells) {
        throw ConfigError("sweep has " + std::to_string(cells) + " cells, above the cap of " +
                          std::to_string(cfg.max_cells) + " (raise sweep.max_cells or pass --max-cells)");
    }

    RunConfig base = cfg.base;
    std::set<Variant> variants(base.variants.begin(), base.variants.end());
    variants.insert(Variant::EQ);
    if (base.cavity) variants.insert(Variant::C_EQ);
    base.variants.clear();
    for (Variant v : kAllVariants) {
        if (variants.count(v)) base.variants.push_back(v);
    }

    std::optional<DisplacedHarmonicModel> file_model;
    if (!base.model.goa) file_model = base.model.build();

    fs::create_directories(base.output);
    auto index = open_output(base.output / "index.csv");
    index << "cell,kT,eta,s,omega_DA,omega_p,g_p,status";
    for (Variant v : base.variants) index << "," << to_string(v) << "_fwd_final," << to_string(v) << "_bwd_final";
    index << ",k_eq_fwd,k_eq_bwd,c_k_eq_fwd,c_k_eq_bwd,eq_enhancement,ne_enhancement,error\n";

    SweepSummary summary;
    std::set<std::string> names;
    for (double kT : kts) {
        for (double eta : etas) {
            for (double s : ss) {
                for (double da : das) {
                    RunConfig run = base;
                    std::string name;
                    auto tag = [&](const char* key, double v) {
                        if (std::isnan(v)) return;
                        name += (name.empty() ? "" : "_") + std::string(key) + "=" + short_number(v);
                    };
                    tag("kT", kT);
                    tag("eta", eta);
                    tag("s", s);
                    tag("omega_DA", da);
                    if (!names.insert(name).second) throw ConfigError("sweep: duplicate cell '" + name + "'");
                    ++summary.cells;

                    std::string status = "ok", error;
                    std::vector<std::string> values;
                    double cell_kT = NAN, cell_eta = NAN, cell_s = NAN, cell_da = NAN;
                    try {
                        if (!std::isnan(kT)) run.env = EnvSpec{EnvKind::kT, kT};
                        std::optional<DisplacedHarmonicModel> model;
                        if (run.model.goa) {
                            if (!std::isnan(eta)) run.model.goa->eta = eta;
                            if (!std::isnan(s)) run.model.goa->s = s;
                            if (!std::isnan(da)) run.model.goa->omega_DA = da;
                            cell_eta = run.model.goa->eta;
                            cell_s = run.model.goa->s;
                            model = run.model.build();
                        } else {
                            model = std::isnan(da) ? *file_model : file_model->with_omega_DA(da);
                        }
                        cell_da = model->omega_DA();
                        cell_kT = run.env.resolve(*model).kT();
                        if (run.cavity) {
                            for (const auto& e : cfg.omega_p_table) {
                                auto match = [](const std::optional<double>& want, double have) {
                                    return !want || std::abs(*want - have) <= 1e-12 * std::max(1.0, std::abs(have));
                                };
                                if (match(e.kT, cell_kT) && match(e.eta, cell_eta) && match(e.s, cell_s) &&
                                    match(e.omega_DA, cell_da)) {
                                    run.cavity->omega_p = e.omega_p;
                                    break;
                                }
                            }
                        }
                        const RunOutput out = execute_run(run, *model);
                        write_run(out, base.output / name);
                        for (const auto& series : out.rates) values.push_back(format_double(series.back()));
                        const json& r = out.meta["results"]["efgr"];
                        auto eq = [&](const char* key) {
                            return r.contains(key) ? format_double(r[key]["value"].get<double>()) : std::string();
                        };
                        values.push_back(eq("EQ_forward"));
                        values.push_back(eq("EQ_backward"));
                        values.push_back(eq("C-EQ_forward"));
                        values.push_back(eq("C-EQ_backward"));
                        if (r.contains("C-EQ_forward")) {
                            values.push_back(format_double(r["C-EQ_forward"]["value"].get<double>() /
                                                           r["EQ_forward"]["value"].get<double>()));
                        } else {
                            values.emplace_back();
                        }
                        const json& finals = out.meta["results"]["final_rates"];
                        if (finals.contains("C-NE_fwd") && finals.contains("NE_fwd")) {
                            values.push_back(format_double(finals["C-NE_fwd"].get<double>() /
                                                           finals["NE_fwd"].get<double>()));
                        } else {
                            values.emplace_back();
                        }
                    } catch (const std::exception& e) {
                        status = "failed";
                        error = e.what();
                        values.clear();
                        ++summary.failed;
                    }
                    auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
                    index << name << "," << num(cell_kT) << "," << num(cell_eta) << "," << num(cell_s) << ","
                          << num(cell_da) << "," << (run.cavity ? format_double(run.cavity->omega_p) : "") << ","
                          << (run.cavity ? format_double(run.cavity->g_p) : "") << "," << status;
                    const std::size_t width = 2 * base.variants.size() + 6;
                    for (std::size_t i = 0; i < width; ++i) index << "," << (i < values.size() ? values[i] : "");
                    index << "," << (error.empty() ? "" : csv_escape(error)) << "\n";
                }
            }
        }
    }
    return summary;
}

std::vector<OptimizationResult> execute_optimize(const OptimizeConfig& cfg) {
    const RunConfig& base = cfg.base;
    const auto kts = cfg.kT.empty() ? std::vector<double>{NAN} : cfg.kT;
    const auto das = cfg.omega_DA.empty() ? std::vector<double>{NAN} : cfg.omega_DA;
    const bool multi = kts.size() * das.size() > 1;
    std::optional<DisplacedHarmonicModel> file_model;
    if (!base.model.goa) file_model = base.model.build();

    fs::create_directories(base.output);
    std::optional<std::ofstream> table;
    if (multi) {
        table = open_output(base.output / "optima.csv");
        *table << "cell,kT,omega_DA,omega_p_star,objective,enhancement,at_bound,flat\n";
    }

    std::vector<OptimizationResult> results;
    for (double kT : kts) {
        for (double da : das) {
            EnvSpec env_spec = base.env;
            if (!std::isnan(kT)) env_spec = EnvSpec{EnvKind::kT, kT};
            DisplacedHarmonicModel model = [&] {
                if (base.model.goa) {
                    GOASpec spec = *base.model.goa;
                    if (!std::isnan(da)) spec.omega_DA = da;
                    return goa_to_normal_modes(spec);
                }
                return std::isnan(da) ? *file_model : file_model->with_omega_DA(da);
            }();
            const ThermalEnv env = env_spec.resolve(model);

            OptimizerOptions opts = cfg.options;
            double w_ref = 1.0;
            if (base.model.goa) {
                w_ref = base.model.goa->omega_c;
            } else if (model.omega_DA() != 0.0) {
                w_ref = std::abs(model.omega_DA());
            } else {
                w_ref = *std::max_element(model.mode_freqs().begin(), model.mode_freqs().end());
            }
            if (!cfg.bounds_given) {
                opts.lo = 0.05 * w_ref;
                opts.hi = 5.0 * w_ref;
            }
            if (!cfg.reference_given) opts.reference_frequency = w_ref;

            const OptimizationResult res = optimize_omega_p(model, env, base.cavity->g_p, opts);
            const std::string name = "kT=" + short_number(env.kT()) + "_omega_DA=" + short_number(model.omega_DA());
            const fs::path dir = multi ? base.output / name : base.output;
            fs::create_directories(dir);
            {
                auto os = open_output(dir / "scan.csv");
                os << "omega_p,objective\n";
                for (const auto& [w, f] : res.scan) os << format_double(w) << "," << format_double(f) << "\n";
            }
            json j;
            j["omega_p_star"] = res.omega_p_star;
            j["hbar_omega_p_star"] = model.hbar() * res.omega_p_star;
            j["objective"] = res.objective;
            j["enhancement"] = res.enhancement;
            j["method"] = to_string(res.method);
            j["at_bound"] = res.at_bound;
            j["flat"] = res.flat;
            j["bounds"] = {opts.lo, opts.hi};
            j["scan_points"] = opts.scan_points;
            j["rel_tol"] = opts.rel_tol;
            j["coupling_exponent"] = opts.coupling_exponent;
            j["reference_frequency"] = opts.reference_frequency;
            j["g_p"] = base.cavity->g_p;
            j["beta"] = env.beta;
            j["kT"] = env.kT();
            j["omega_DA"] = model.omega_DA();
            j["reorganization_energy"] = reorganization_energy(model);
            j["model"] = base.model.to_json();
            if (!base.description.empty()) j["description"] = base.description;
            if (opts.method == OptimizeMethod::quantum) {
                j["efgr"] = {{"rtol", opts.efgr.rtol}, {"tau_max", opts.efgr.tau_max}, {"panel", opts.efgr.panel},
                             {"probe_panels", opts.efgr.probe_panels}};
            }
            j["code"] = {{"name", "cavfgr"}, {"version", kVersion}};
            auto os = open_output(dir / "optimum.json");
            os << j.dump(2) << "\n";
            if (table) {
                *table << name << "," << format_double(env.kT()) << "," << format_double(model.omega_DA()) << ","
                       << format_double(res.omega_p_star) << "," << format_double(res.objective) << ","
                       << format_double(res.enhancement) << "," << (res.at_bound ? "true" : "false") << ","
                       << (res.flat ? "true" : "false") << "\n";
            }
            results.push_back(res);
        }
    }
    return results;
}

}  // namespace cavfgr::cli
