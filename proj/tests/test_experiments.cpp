#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "horolab/experiments.hpp"
#include "json.hpp"

using namespace horolab;
namespace fs = std::filesystem;

namespace {

const char* kOde = R"({
  "schema_version": 1,
  "experiment": "ode-residual",
  "observables": ["power:s=0.75:real", "discrete:n=3:real"],
  "base_points": {"source": "window", "count": 2, "seed": 5},
  "t_grid": [0, 1]
})";

std::string with(const std::string& key, const std::string& value) {
    auto j = nlohmann::json::parse(kOde);
    j[key] = nlohmann::json::parse(value);
    return j.dump();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("horolab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
    const auto cfg = parse_config(kOde);
    CHECK(cfg.experiment == "ode-residual");
    CHECK(cfg.observables.size() == 2);
    CHECK(cfg.base_points.kind == BasePointSource::Kind::Window);
    CHECK(cfg.t_grid == std::vector<double>{0, 1});
    CHECK(cfg.tolerance("ode_residual", 1e-6) == 1e-6);

    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("colour", "1")), "unknown key 'colour' in config", ConfigError);
    CHECK_THROWS_AS(parse_config(with("schema_version", "2")), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("observables", "[]")), "no observables selected", ConfigError);
    CHECK_THROWS_AS(parse_config(with("observables", "[\"power:s=-0.5:real\"]")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("experiment", "\"nope\"")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("base_points", R"({"source": "haar", "count": 3})")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("base_points", R"({"source": "explicit", "matrices": [[1, 1, 1, 1]]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(with("tolerances", R"({"ode_residual": -1})")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("tolerances", R"({"speed": 1})")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("experiment", "\"temporal-clt\"")), ConfigError);

    const auto lat = parse_config(R"({"schema_version": 1, "experiment": "lattice-sanity", "seed": 3})");
    CHECK(lat.observables.empty());
    CHECK(lat.seed == 3u);
}

TEST_CASE("catalog") {
    const auto& cat = experiment_catalog();
    CHECK(cat.size() == 9);
    const auto j = nlohmann::json::parse(catalog_json());
    REQUIRE(j.is_array());
    CHECK(j.size() == 9);
    for (const auto& e : cat) CHECK(catalog_text().find(e.id) != std::string::npos);
}

TEST_CASE("csv formatting") {
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(2) == "2");
    CHECK(csv_number(-1.5e-300) == "-1.5000000000000001e-300");
    CsvTable t{"t", {"a", "b"}, {{"1", "x"}, {"2", "y"}}};
    CHECK(t.render() == "a,b\n1,x\n2,y\n");
    CsvTable q{"q", {"k"}, {{"mixed(1,1)"}, {"say \"hi\""}}};
    CHECK(q.render() == "k\n\"mixed(1,1)\"\n\"say \"\"hi\"\"\"\n");
}

TEST_CASE("runs are deterministic") {
    const auto cfg = parse_config(kOde);
    const auto a = run_experiment(cfg), b = run_experiment(cfg, RunOptions{2, {}});
    CHECK(a.report.pass);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].render() == b.tables[i].render());
    CHECK(a.report_json() == b.report_json());

    const auto d1 = scratch("det1"), d2 = scratch("det2");
    write_outcome(a, d1.string());
    write_outcome(run_experiment(cfg), d2.string());
    for (const auto& e : fs::directory_iterator(d1)) CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
    CHECK(fs::exists(d1 / "ode-residual.json"));
}

TEST_CASE("cli exit codes") {
#ifndef HOROLAB_CLI_PATH
    return;
#else
    const char* cli = HOROLAB_CLI_PATH;
    const auto dir = scratch("cli");
    auto run = [&](const std::string& body, const std::string& name) {
        const auto cfg = dir / (name + ".json");
        std::ofstream(cfg) << body;
        const std::string cmd = std::string("\"") + cli + "\" --config \"" + cfg.string() + "\" --out \"" +
                                (dir / name).string() + "\" > \"" + (dir / (name + ".log")).string() + "\" 2>&1";
        const int st = std::system(cmd.c_str());
        return WEXITSTATUS(st);
    };
    CHECK(run(kOde, "ok") == 0);
    CHECK(fs::exists(dir / "ok" / "ode_residual.csv"));
    CHECK(run(with("tolerances", R"({"ode_residual": 1e-300})"), "fail") == 1);
    CHECK(slurp(dir / "fail.log").find("first violated bound: ODE residual") != std::string::npos);
    CHECK(run(with("colour", "1"), "bad") == 2);
    CHECK(std::system((std::string("\"") + cli + "\" --list > /dev/null").c_str()) == 0);
#endif
}
