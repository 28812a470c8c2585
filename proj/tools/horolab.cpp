#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "horolab/experiments.hpp"

namespace {

int fail(int code, const std::string& msg) {
    std::cerr << "horolab: " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"horolab: horocycle ergodic integral experiments"};
    std::string config_path, out_dir;
    bool list = false, as_json = false;
    std::uint64_t seed_override = 0;
    unsigned jobs = 1;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_flag("--list", list, "print the experiment catalog");
    app.add_flag("--json", as_json, "machine-readable catalog");
    app.add_option("--out", out_dir, "output directory (falls back to HOROLAB_OUT, then the config)");
    auto* seed_opt = app.add_option("--seed-override", seed_override, "replace every seed in the config");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (list) {
        std::cout << (as_json ? horolab::catalog_json() + "\n" : horolab::catalog_text());
        return 0;
    }
    if (config_path.empty()) return fail(2, "--config is required (or use --list)");

    std::ifstream in(config_path);
    if (!in) return fail(2, "cannot read config " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();

    horolab::ExperimentConfig cfg;
    try {
        cfg = horolab::parse_config(buf.str());
    } catch (const horolab::ConfigError& e) {
        return fail(2, std::string("invalid config: ") + e.what());
    }

    if (out_dir.empty()) {
        if (const char* env = std::getenv("HOROLAB_OUT"); env && *env) out_dir = env;
        else out_dir = cfg.output_dir;
    }
    if (out_dir.empty()) return fail(2, "no output directory: pass --out, set HOROLAB_OUT or output_dir");

    horolab::RunOptions opt;
    opt.jobs = jobs;
    if (*seed_opt) opt.seed_override = seed_override;

    horolab::ExperimentOutcome out;
    try {
        out = horolab::run_experiment(cfg, opt);
        horolab::write_outcome(out, out_dir);
    } catch (const horolab::ConfigError& e) {
        return fail(2, std::string("invalid config: ") + e.what());
    } catch (const std::exception& e) {
        return fail(1, std::string("experiment aborted: ") + e.what());
    }

    std::cout << out.report.summary() << "\n";
    if (!out.report.pass) {
        const auto* f = out.report.first_failure();
        std::ostringstream os;
        os << "first violated bound: " << f->name;
        if (!f->detail.empty()) os << " (" << f->detail << ")";
        os << ": " << f->lhs << " > " << f->rhs;
        return fail(1, os.str());
    }
    return 0;
}
