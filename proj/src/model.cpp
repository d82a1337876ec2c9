#include "cavfgr/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "cavfgr/error.hpp"
#include "cavfgr/summation.hpp"

namespace cavfgr {

using nlohmann::json;

std::string_view to_string(Direction d) noexcept {
    return d == Direction::forward ? "forward" : "backward";
}

Direction direction_from_string(std::string_view s) {
    if (s == "forward" || s == "fwd" || s == "DA") return Direction::forward;
    if (s == "backward" || s == "bwd" || s == "AD") return Direction::backward;
    throw ConfigError("unknown direction '" + std::string(s) + "' (expected forward|backward)");
}

ThermalEnv ThermalEnv::from_kT(double kT) {
    if (!(kT > 0.0) || !std::isfinite(kT)) throw ConfigError("kT must be positive and finite");
    ThermalEnv env{1.0 / kT};
    env.validate();
    return env;
}

void ThermalEnv::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive and finite");
}

double CavityMode::coupling_G(double hbar) const { return std::sqrt(2.0 * hbar * omega_p) * g_p; }

void CavityMode::validate() const {
    if (!(omega_p > 0.0) || !std::isfinite(omega_p)) throw ConfigError("cavity omega_p must be positive");
    if (!(g_p >= 0.0) || !std::isfinite(g_p)) throw ConfigError("cavity g_p must be non-negative");
}

DisplacedHarmonicModel::DisplacedHarmonicModel(std::vector<double> mode_freqs, std::vector<double> da_shifts,
                                               std::vector<double> dg_shifts, double omega_DA, double gamma,
                                               double e_ground, double hbar, std::string units)
    : freqs_(std::move(mode_freqs)),
      da_(std::move(da_shifts)),
      dg_(std::move(dg_shifts)),
      omega_DA_(omega_DA),
      gamma_(gamma),
      e_ground_(e_ground),
      hbar_(hbar),
      units_(std::move(units)) {
    validate();
}

void DisplacedHarmonicModel::validate() const {
    if (freqs_.empty()) throw ConfigError("model needs at least one mode");
    if (da_.size() != freqs_.size() || dg_.size() != freqs_.size()) {
        std::ostringstream msg;
        msg << "length mismatch: " << freqs_.size() << " frequencies, " << da_.size() << " da_shifts, "
            << dg_.size() << " dg_shifts";
        throw ConfigError(msg.str());
    }
    for (std::size_t j = 0; j < freqs_.size(); ++j) {
        if (!(freqs_[j] > 0.0) || !std::isfinite(freqs_[j])) {
            throw ConfigError("mode " + std::to_string(j) + ": frequency must be positive and finite");
        }
        if (!std::isfinite(da_[j]) || !std::isfinite(dg_[j])) {
            throw ConfigError("mode " + std::to_string(j) + ": shifts must be finite");
        }
    }
    if (!std::isfinite(omega_DA_)) throw ConfigError("omega_DA must be finite");
    if (!std::isfinite(gamma_)) throw ConfigError("gamma must be finite");
    if (!std::isfinite(e_ground_)) throw ConfigError("e_ground must be finite");
    if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw ConfigError("hbar must be positive and finite");
    if (units_.empty()) throw ConfigError("units declaration must be non-empty");
    const double er = reorganization_energy(*this);
    if (!std::isfinite(er)) throw ConfigError("reorganization energy is not finite");
}

DisplacedHarmonicModel DisplacedHarmonicModel::with_omega_DA(double omega_DA) const {
    auto m = *this;
    m.omega_DA_ = omega_DA;
    m.validate();
    return m;
}

DisplacedHarmonicModel DisplacedHarmonicModel::with_gamma(double gamma) const {
    auto m = *this;
    m.gamma_ = gamma;
    m.validate();
    return m;
}

DisplacedHarmonicModel DisplacedHarmonicModel::with_e_ground(double e_ground) const {
    auto m = *this;
    m.e_ground_ = e_ground;
    m.validate();
    return m;
}

DisplacedHarmonicModel DisplacedHarmonicModel::with_dg_shifts(std::vector<double> dg_shifts) const {
    auto m = *this;
    m.dg_ = std::move(dg_shifts);
    m.validate();
    return m;
}

DisplacedHarmonicModel DisplacedHarmonicModel::acceptor_equilibrated() const {
    std::vector<double> s(da_.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = -da_[j];
    return with_dg_shifts(std::move(s));
}

DisplacedHarmonicModel DisplacedHarmonicModel::donor_equilibrated() const {
    return with_dg_shifts(std::vector<double>(da_.size(), 0.0));
}

double reorganization_energy(const DisplacedHarmonicModel& model) {
    const auto w = model.mode_freqs();
    const auto r = model.da_shifts();
    NeumaierSum sum;
    for (std::size_t j = 0; j < w.size(); ++j) sum += 0.5 * w[j] * w[j] * r[j] * r[j];
    return sum.value();
}

namespace {

const std::set<std::string> kTopKeys{"units", "hbar", "omega_DA", "gamma", "e_ground", "modes"};
const std::set<std::string> kModeKeys{"omega", "r_eq", "s"};

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + ": key '" + key + "' must be a number");
    return v.get<double>();
}

void check_units(const std::string& units, double hbar) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
    if (units == "reduced" && !close(hbar, 1.0)) {
        throw ConfigError("units 'reduced' require hbar = 1");
    }
    if (units == "meV_fs" && !close(hbar, kHbarMeVfs)) {
        throw ConfigError("units 'meV_fs' require hbar = 658.2119569");
    }
}

}  // namespace

DisplacedHarmonicModel load_model(std::string_view document, bool lenient) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model file parse failure: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("model file must be a JSON object");

    if (!lenient) {
        for (const auto& [key, _] : doc.items()) {
            if (!kTopKeys.count(key)) throw ConfigError("model file: unknown key '" + key + "'");
        }
    }
    if (!doc.contains("units") || !doc.at("units").is_string() || doc.at("units").get<std::string>().empty()) {
        throw ConfigError("model file: missing units declaration");
    }
    if (!doc.contains("hbar")) throw ConfigError("model file: missing hbar declaration");

    const std::string units = doc.at("units").get<std::string>();
    const double hbar = require_number(doc, "hbar", "model file");
    check_units(units, hbar);
    const double omega_DA = require_number(doc, "omega_DA", "model file");
    const double gamma = require_number(doc, "gamma", "model file");
    const double e_ground = doc.contains("e_ground") ? require_number(doc, "e_ground", "model file") : 0.0;

    if (!doc.contains("modes") || !doc.at("modes").is_array()) {
        throw ConfigError("model file: 'modes' must be an array");
    }
    std::vector<double> w, r, s;
    std::size_t i = 0;
    for (const auto& mode : doc.at("modes")) {
        const std::string where = "modes[" + std::to_string(i++) + "]";
        if (!mode.is_object()) throw ConfigError(where + " must be an object");
        if (!lenient) {
            for (const auto& [key, _] : mode.items()) {
                if (!kModeKeys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
            }
        }
        if (mode.contains("omega")) w.push_back(require_number(mode, "omega", where));
        if (mode.contains("r_eq")) r.push_back(require_number(mode, "r_eq", where));
        if (mode.contains("s")) s.push_back(require_number(mode, "s", where));
    }
    // Missing per-mode fields surface as a length mismatch from the constructor.
    return DisplacedHarmonicModel(std::move(w), std::move(r), std::move(s), omega_DA, gamma, e_ground, hbar, units);
}

DisplacedHarmonicModel load_model_file(const std::filesystem::path& path, bool lenient) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str(), lenient);
}

std::string dump_model(const DisplacedHarmonicModel& model) {
    json doc;
    doc["units"] = model.units();
    doc["hbar"] = model.hbar();
    doc["omega_DA"] = model.omega_DA();
    doc["gamma"] = model.gamma();
    doc["e_ground"] = model.e_ground();
    json modes = json::array();
    for (std::size_t j = 0; j < model.size(); ++j) {
        modes.push_back({{"omega", model.mode_freqs()[j]}, {"r_eq", model.da_shifts()[j]}, {"s", model.dg_shifts()[j]}});
    }
    doc["modes"] = std::move(modes);
    return doc.dump(2) + "\n";
}

void save_model_file(const DisplacedHarmonicModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write model file " + path.string());
    out << dump_model(model);
}

}  // namespace cavfgr
