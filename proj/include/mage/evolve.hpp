#pragma once

#include "mage/asm_model.hpp"
#include "mage/random.hpp"
#include "mage/similarity.hpp"
#include "mage/transforms.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mage {

enum class FitnessMode { Alpha, Beta };

std::string_view to_string(FitnessMode mode);
std::optional<FitnessMode> parse_fitness_mode(std::string_view name);

struct EAConfig {
    std::size_t population_size = 20;
    std::size_t generations = 300;
    std::size_t tournament_size = 3;
    std::array<double, kAllTransforms.size()> mutation_probs{0.2, 0.2, 0.2, 0.2, 0.2}; // FI, FJ, UB, CZJ, CNZJ
    FitnessMode fitness_mode = FitnessMode::Beta;
    std::uint64_t rng_seed = 1;
    double archive_similarity_threshold = 0.95;
    std::size_t init_transform_count = 3;
    std::size_t step_budget = kDefaultStepBudget;
    std::optional<std::uint32_t> pivot; // seed offset; middle of the seed when unset

    double probability(TransformTag tag) const { return mutation_probs[static_cast<std::size_t>(tag)]; }

    // Throws std::invalid_argument when P < 2, k is zero or larger than P, or a rate leaves [0, 1].
    void check() const;
};

struct Chromosome {
    std::uint64_t id = 0;
    Program program;
    StatementSet statements;
    std::optional<double> fitness;
    double source_similarity = 0.0;
    std::size_t generation_born = 0;
};

struct Admission {
    std::size_t generation;
    std::uint64_t chromosome_id;
    std::string reason;
};

struct Archive {
    std::vector<Chromosome> members;
    std::vector<Admission> admission_log;
};

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_source_similarity = 0.0;
    double mean_source_similarity = 0.0;
    std::size_t archive_size = 0;
};

struct EAState {
    std::size_t generation = 0;
    std::vector<Chromosome> population;
    Archive archive;
    std::vector<GenerationRecord> history; // one record per completed generation step
    GenerationRecord initial_record;
    std::size_t variants_produced = 0;
    std::vector<std::string> events;
};

struct RunResult {
    std::vector<GenerationRecord> history;
    GenerationRecord initial_record;
    std::vector<Chromosome> initial_population;
    std::vector<Chromosome> final_population;
    std::vector<Program> best_of_generation; // index 0 is the initial population
    Archive archive;
    std::size_t variants_produced = 0;
    std::vector<std::string> events;
};

// Index of the best fitness among k distinct members drawn uniformly; ties go to the lowest
// index. Throws UnevaluatedPopulation.
std::size_t tournament_select(std::span<const Chromosome> population, std::size_t k, Rng& rng);

// Reporting choice per generation: least source-similar member under beta, fittest under alpha.
std::size_t best_of_generation(std::span<const Chromosome> population, FitnessMode mode);

// Admits the fittest member first, then any member whose similarity to every archived member
// stays below the threshold. Pairwise similarity inside the archive stays below the threshold.
void update_archive(Archive& archive, std::span<const Chromosome> population, double threshold, std::size_t generation);

// Evolution engine for one seed program. Every chromosome it creates is validated and checked
// for equivalence with the seed; a failure throws EquivalenceViolation.
class Evolver {
public:
    using Observer = std::function<void(const EAState&)>;

    // Throws InvalidProgram if the seed is invalid or does not terminate within the step budget.
    Evolver(Program seed, EAConfig config);

    const EAState& state() const { return state_; }
    const EAConfig& config() const { return config_; }
    const Program& seed() const { return seed_; }
    std::optional<PivotPoint> pivot() const { return pivot_; }

    // Throws InitializationFailure.
    void initialize();
    void step_generation();

    RunResult run(const Observer& observer = {});

    void evaluate(std::vector<Chromosome>& population) const;
    Chromosome make_chromosome(Program program, std::size_t generation);

private:
    Program mutate(Program program);
    void check_variant(const Program& program) const;
    GenerationRecord record(std::size_t generation) const;

    Program seed_;
    EAConfig config_;
    Rng rng_;
    LabelAllocator labels_;
    StatementSet source_;
    MachineState seed_result_;
    std::optional<PivotPoint> pivot_;
    std::uint64_t next_id_ = 0;
    EAState state_;
};

std::vector<Chromosome> init_population(Evolver& evolver);

RunResult run(const Program& seed, const EAConfig& config, const Evolver::Observer& observer = {});

} // namespace mage
