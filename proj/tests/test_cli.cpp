#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cavfgr/cli.hpp"
#include "cavfgr/error.hpp"

using namespace cavfgr;
using namespace cavfgr::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cavfgr_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json small_doc(const fs::path& out) {
    return json{{"model", {{"goa", {{"eta", 5.0}, {"s", 1.0}, {"n_secondary", 10}}}}},
                {"cavity", {{"omega_p", 0.961}, {"g_p", 1.0}}},
                {"grid", {{"dt", 0.05}, {"t_max", 1.0}}},
                {"output", out.string()}};
}

int run_main(std::vector<std::string> args) {
    args.insert(args.begin(), "cavfgr");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config validation") {
    json doc = small_doc("x");
    doc.erase("cavity");
    doc["variants"] = {"C-NE"};
    CHECK_THROWS_AS((void)run_config_from_json(doc), ConfigError);
    doc["variants"] = json::array();
    CHECK_THROWS_AS((void)run_config_from_json(doc), ConfigError);
    doc.erase("variants");
    doc["colour"] = "blue";
    CHECK_THROWS_AS((void)run_config_from_json(doc), ConfigError);
    doc.erase("colour");
    doc["environment"] = {{"kT", 1.0}, {"beta", 1.0}};
    CHECK_THROWS_AS((void)run_config_from_json(doc), ConfigError);
    doc["environment"] = {{"temperature_K", 300.0}};
    const auto cfg = run_config_from_json(doc);
    CHECK_THROWS_AS((void)cfg.env.resolve(cfg.model.build()), ConfigError);
}

TEST_CASE("default variants follow the cavity block") {
    auto cfg = run_config_from_json(small_doc("x"));
    CHECK(cfg.variants.size() == 8);
    json doc = small_doc("x");
    doc.erase("cavity");
    CHECK(run_config_from_json(doc).variants ==
          std::vector<Variant>{Variant::NE, Variant::EQ, Variant::IMT, Variant::LT_IMT});
    doc["variants"] = {"IMT", "NE", "IMT"};
    CHECK(run_config_from_json(doc).variants == std::vector<Variant>{Variant::NE, Variant::IMT});
}

TEST_CASE("runs are byte-identical across worker counts") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    json doc = small_doc(a);
    doc["workers"] = 1;
    auto cfg = run_config_from_json(doc);
    write_run(execute_run(cfg, cfg.model.build()), a);
    doc["workers"] = 3;
    cfg = run_config_from_json(doc);
    write_run(execute_run(cfg, cfg.model.build()), b);
    for (const char* f : {"rates.csv", "populations.csv", "meta.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const json meta = json::parse(slurp(a / "meta.json"));
    CHECK(meta["grid"]["dt"] == 0.05);
    CHECK(meta["numerics"]["efgr"]["rtol"] == 1e-8);
    CHECK(meta["model"]["hbar"] == 1.0);
    CHECK_FALSE(meta.dump().find("workers") != std::string::npos);
    const std::string header = slurp(a / "rates.csv").substr(0, 40);
    CHECK(header.rfind("t,NE_fwd,NE_bwd,C-NE_fwd,C-NE_bwd,EQ_fwd", 0) == 0);
}

TEST_CASE("sweep bookkeeping") {
    const fs::path out = scratch("sweep");
    json doc = small_doc(out);
    doc["variants"] = {"NE", "C-NE"};
    doc["sweep"] = {{"kT", {1.0, 0.5}}, {"s", {-1.0, 1.0}},
                    {"omega_p_table", {{{"kT", 1.0}, {"omega_p", 0.961}}, {{"kT", 0.5}, {"omega_p", 0.656}}}}};
    const auto summary = execute_sweep(sweep_config_from_json(doc));
    CHECK(summary.cells == 4);
    CHECK(summary.failed == 0);
    const std::string index = slurp(out / "index.csv");
    CHECK(std::count(index.begin(), index.end(), '\n') == 5);
    CHECK(index.find("kT=0.5_s=1,0.5,5,1,0,0.65600000000000003") != std::string::npos);
    CHECK(fs::exists(out / "kT=1_s=-1" / "rates.csv"));

    doc["sweep"]["s"] = json::array();
    CHECK_THROWS_AS((void)sweep_config_from_json(doc), ConfigError);
    doc["sweep"] = {{"kT", {1.0, 2.0, 3.0}}, {"max_cells", 2}};
    CHECK_THROWS_AS((void)execute_sweep(sweep_config_from_json(doc)), ConfigError);
}

TEST_CASE("sweep records failing cells and carries on") {
    const fs::path out = scratch("sweep_fail");
    json doc = small_doc(out);
    doc["variants"] = {"NE"};
    doc["efgr"] = {{"tau_max", 0.5}};
    doc["sweep"] = {{"kT", {1.0, 0.5}}};
    const auto summary = execute_sweep(sweep_config_from_json(doc));
    CHECK(summary.cells == 2);
    CHECK(summary.failed == 2);
    CHECK(slurp(out / "index.csv").find("failed") != std::string::npos);
}

TEST_CASE("optimize writes its files and flags zero coupling") {
    const fs::path out = scratch("opt");
    json doc = small_doc(out);
    doc["cavity"] = {{"g_p", 0.0}};
    const auto results = execute_optimize(optimize_config_from_json(doc));
    REQUIRE(results.size() == 1);
    CHECK(results[0].flat);
    CHECK(fs::exists(out / "scan.csv"));
    CHECK(json::parse(slurp(out / "optimum.json"))["flat"] == true);
}

TEST_CASE("exit codes") {
    const fs::path out = scratch("exit");
    CHECK(run_main({"--help"}) == 0);
    CHECK(run_main({"run", "--bogus-flag"}) == 2);
    CHECK(run_main({"run", "--variants", "C-NE", "-o", out.string()}) == 2);
    CHECK(run_main({"run", "--n-secondary", "5", "--t-max", "0.5", "--dt", "0.05", "--variants", "EQ",
                    "--efgr-tau-max", "0.5", "-o", out.string()}) == 3);
    CHECK(run_main({"run", "--n-secondary", "5", "--t-max", "0.5", "--dt", "0.05", "--variants", "NE,IMT", "-o",
                    out.string()}) == 0);
    CHECK(fs::exists(out / "populations.csv"));
}

}
