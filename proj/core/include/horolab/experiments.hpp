#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "horolab/report.hpp"
#include "horolab/sl2.hpp"

namespace horolab {

// Invalid configuration; the runner maps it to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BasePointSource {
    enum class Kind { Explicit, Haar, Window };
    Kind kind = Kind::Window;
    std::vector<GroupElement> matrices;
    std::size_t count = 0;
    std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    std::string experiment;
    std::vector<std::string> observables;
    std::vector<double> weights;  // for experiments that combine the observables into one sum
    BasePointSource base_points;
    std::vector<double> T_grid;   // empty means the experiment default
    std::vector<double> t_grid;   // ODE times
    std::vector<double> S_grid;   // geodesic baseline lengths
    std::optional<std::uint64_t> seed;
    std::size_t sample_count = 10000;
    std::map<std::string, double> tolerances;
    std::string output_dir;
    bool dump_samples = false;

    double tolerance(const std::string& name, double fallback) const;
};

// Parses and validates a JSON config; throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);

struct CatalogEntry {
    std::string id;
    std::string summary;
    std::string checks;  // what the experiment reproduces
    std::vector<std::string> required_keys;
};

const std::vector<CatalogEntry>& experiment_catalog();
std::string catalog_text();
std::string catalog_json();

struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render() const;
};

// 17 significant digits, dot decimal separator.
std::string csv_number(double v);

struct ExperimentOutcome {
    std::string experiment;
    CheckReport report;
    std::vector<CsvTable> tables;
    std::string parameters_json;

    std::string report_json() const;
};

struct RunOptions {
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed_override;
};

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Writes <experiment>.json and one CSV per table into dir.
void write_outcome(const ExperimentOutcome& out, const std::string& dir);

}  // namespace horolab
