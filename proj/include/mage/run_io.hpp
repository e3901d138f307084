#pragma once

#include "mage/evolve.hpp"
#include "mage/scanner_sim.hpp"

#include <filesystem>
#include <string>

#include <json.hpp>

namespace mage {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::filesystem::path seed_program_path;
    std::filesystem::path output_dir = "run";
    EAConfig ea;
    EnsembleParams scanner;
    std::uint64_t scanner_seed = 7;
    std::size_t snapshot_interval = 50; // full population snapshots every N generations (0 = first and last only)
};

// Relative paths in the file resolve against the config file's directory. Throws ConfigError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& cfg);

// Throws ConfigError when the file cannot be read.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_real(double value);

// Writes a run checkpoint directory as the run progresses: config.json, ensemble.json,
// history.csv, similarity.csv, evasion.csv, best/, snapshots/, archive/, events.log.
class RunWriter {
public:
    RunWriter(std::filesystem::path dir, const ExperimentConfig& cfg, const Program& seed);

    void observe(const EAState& state);
    void finish(const RunResult& result);

    const ScannerEnsemble& ensemble() const { return ensemble_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    void snapshot(const EAState& state);

    std::filesystem::path dir_;
    ExperimentConfig cfg_;
    ScannerEnsemble ensemble_;
    std::string evasion_csv_;
    std::string similarity_csv_;
};

} // namespace mage
