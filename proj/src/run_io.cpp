#include "mage/run_io.hpp"

#include "mage/errors.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace mage {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

std::string format_real(double value) { return fmt::format("{:.10f}", value); }

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config key '{}': {}", key, e.what()));
    }
}

} // namespace

ExperimentConfig experiment_config_from_json(const json& j, const fs::path& base_dir)
{
    static const std::set<std::string> known{
        "seed_program", "output_dir", "population_size", "generations", "tournament_size", "mutation_probs",
        "fitness_mode", "rng_seed", "archive_similarity_threshold", "init_transform_count", "step_budget",
        "pivot", "scanner", "snapshot_interval"};
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    auto resolve = [&](const fs::path& p) { return p.is_relative() && !base_dir.empty() ? base_dir / p : p; };

    ExperimentConfig cfg;
    if (!j.contains("seed_program")) {
        throw ConfigError("config needs 'seed_program'");
    }
    cfg.seed_program_path = resolve(field<std::string>(j, "seed_program", ""));
    cfg.output_dir = resolve(field<std::string>(j, "output_dir", "run"));

    auto& ea = cfg.ea;
    ea.population_size = field(j, "population_size", ea.population_size);
    ea.generations = field(j, "generations", ea.generations);
    ea.tournament_size = field(j, "tournament_size", ea.tournament_size);
    ea.rng_seed = field(j, "rng_seed", ea.rng_seed);
    ea.archive_similarity_threshold = field(j, "archive_similarity_threshold", ea.archive_similarity_threshold);
    ea.init_transform_count = field(j, "init_transform_count", ea.init_transform_count);
    ea.step_budget = field(j, "step_budget", ea.step_budget);
    if (j.contains("pivot") && !j.at("pivot").is_null()) {
        ea.pivot = field<std::uint32_t>(j, "pivot", 0);
    }
    if (j.contains("fitness_mode")) {
        auto mode = parse_fitness_mode(field<std::string>(j, "fitness_mode", ""));
        if (!mode) {
            throw ConfigError("fitness_mode must be 'alpha' or 'beta'");
        }
        ea.fitness_mode = *mode;
    }
    if (j.contains("mutation_probs")) {
        const auto& probs = j.at("mutation_probs");
        if (!probs.is_object()) {
            throw ConfigError("mutation_probs must map transform names to rates");
        }
        for (const auto& [name, rate] : probs.items()) {
            auto tag = parse_transform_tag(name);
            if (!tag || !rate.is_number()) {
                throw ConfigError("bad mutation_probs entry '" + name + "'");
            }
            ea.mutation_probs[static_cast<std::size_t>(*tag)] = rate.get<double>();
        }
    }
    if (j.contains("scanner")) {
        const auto& s = j.at("scanner");
        for (const auto& [key, value] : s.items()) {
            if (key != "scanners" && key != "signatures_per_scanner" && key != "gram_length" && key != "rng_seed") {
                throw ConfigError("unknown scanner key '" + key + "'");
            }
        }
        cfg.scanner.scanners = field(s, "scanners", cfg.scanner.scanners);
        cfg.scanner.signatures_per_scanner = field(s, "signatures_per_scanner", cfg.scanner.signatures_per_scanner);
        cfg.scanner.gram_length = field(s, "gram_length", cfg.scanner.gram_length);
        cfg.scanner_seed = field(s, "rng_seed", cfg.scanner_seed);
    }
    cfg.snapshot_interval = field(j, "snapshot_interval", cfg.snapshot_interval);
    try {
        ea.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return experiment_config_from_json(j, path.parent_path());
}

json to_json(const ExperimentConfig& cfg)
{
    json probs = json::object();
    for (auto tag : kAllTransforms) {
        probs[std::string(to_string(tag))] = cfg.ea.probability(tag);
    }
    return {
        {"seed_program", cfg.seed_program_path.generic_string()},
        {"output_dir", cfg.output_dir.generic_string()},
        {"population_size", cfg.ea.population_size},
        {"generations", cfg.ea.generations},
        {"tournament_size", cfg.ea.tournament_size},
        {"mutation_probs", probs},
        {"fitness_mode", std::string(to_string(cfg.ea.fitness_mode))},
        {"rng_seed", cfg.ea.rng_seed},
        {"archive_similarity_threshold", cfg.ea.archive_similarity_threshold},
        {"init_transform_count", cfg.ea.init_transform_count},
        {"step_budget", cfg.ea.step_budget},
        {"pivot", cfg.ea.pivot ? json(*cfg.ea.pivot) : json(nullptr)},
        {"scanner",
         {{"scanners", cfg.scanner.scanners},
          {"signatures_per_scanner", cfg.scanner.signatures_per_scanner},
          {"gram_length", cfg.scanner.gram_length},
          {"rng_seed", cfg.scanner_seed}}},
        {"snapshot_interval", cfg.snapshot_interval},
    };
}

RunWriter::RunWriter(fs::path dir, const ExperimentConfig& cfg, const Program& seed) : dir_(std::move(dir)), cfg_(cfg)
{
    fs::create_directories(dir_);
    for (const char* sub : {"best", "snapshots", "archive"}) {
        fs::remove_all(dir_ / sub);
    }
    Rng rng(cfg.scanner_seed);
    ensemble_ = build_ensemble(seed, cfg.scanner, rng);
    write_text(dir_ / "config.json", to_json(cfg).dump(2) + "\n");
    write_text(dir_ / "ensemble.json", to_json(ensemble_).dump(2) + "\n");

    const auto seed_count = detect_count(ensemble_, seed);
    evasion_csv_ = "generation,variant,detect_count,population_min_detect_count\n";
    evasion_csv_ += fmt::format("0,seed,{},{}\n", seed_count, seed_count);
    similarity_csv_ = "generation,best_source_similarity,mean_source_similarity,best_fitness,mean_fitness\n";
}

void RunWriter::snapshot(const EAState& state)
{
    const auto gen_dir = dir_ / "snapshots" / fmt::format("gen_{:04}", state.generation);
    for (std::size_t i = 0; i < state.population.size(); ++i) {
        write_text(gen_dir / fmt::format("ind_{:02}.vasm", i), serialize(state.population[i].program));
    }
}

void RunWriter::observe(const EAState& state)
{
    const auto& pop = state.population;
    const auto best = best_of_generation(pop, cfg_.ea.fitness_mode);
    write_text(dir_ / "best" / fmt::format("gen_{:04}.vasm", state.generation), serialize(pop[best].program));

    std::size_t min_count = ensemble_.size();
    for (const auto& c : pop) {
        min_count = std::min(min_count, detect_count(ensemble_, c.program));
    }
    evasion_csv_ += fmt::format("{},{},{},{}\n", state.generation, state.generation == 0 ? "initial" : "evolved",
                                detect_count(ensemble_, pop[best].program), min_count);

    const auto& r = state.history.empty() ? state.initial_record : state.history.back();
    similarity_csv_ += fmt::format("{},{},{},{},{}\n", r.generation, format_real(r.best_source_similarity),
                                   format_real(r.mean_source_similarity), format_real(r.best_fitness),
                                   format_real(r.mean_fitness));

    const bool last = state.generation == cfg_.ea.generations;
    const bool periodic = cfg_.snapshot_interval > 0 && state.generation % cfg_.snapshot_interval == 0;
    if (state.generation == 0 || last || periodic) {
        snapshot(state);
    }
}

void RunWriter::finish(const RunResult& result)
{
    std::string history = "generation,best_fitness,mean_fitness,best_source_similarity,archive_size\n";
    for (const auto& r : result.history) {
        history += fmt::format("{},{},{},{},{}\n", r.generation, format_real(r.best_fitness), format_real(r.mean_fitness),
                               format_real(r.best_source_similarity), r.archive_size);
    }
    write_text(dir_ / "history.csv", history);
    write_text(dir_ / "similarity.csv", similarity_csv_);
    write_text(dir_ / "evasion.csv", evasion_csv_);

    std::string log = "generation,chromosome_id,reason\n";
    for (std::size_t i = 0; i < result.archive.members.size(); ++i) {
        write_text(dir_ / "archive" / fmt::format("member_{:04}.vasm", i), serialize(result.archive.members[i].program));
    }
    for (const auto& a : result.archive.admission_log) {
        log += fmt::format("{},{},{}\n", a.generation, a.chromosome_id, a.reason);
    }
    write_text(dir_ / "archive" / "admissions.csv", log);

    std::string events;
    for (const auto& e : result.events) {
        events += e + "\n";
    }
    write_text(dir_ / "events.log", events);
}

} // namespace mage
