#include "mage/evolve.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <stdexcept>

namespace mage {

std::string_view to_string(FitnessMode mode) { return mode == FitnessMode::Alpha ? "alpha" : "beta"; }

std::optional<FitnessMode> parse_fitness_mode(std::string_view name)
{
    auto lower = std::string(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "alpha") return FitnessMode::Alpha;
    if (lower == "beta") return FitnessMode::Beta;
    return std::nullopt;
}

void EAConfig::check() const
{
    if (population_size < 2) {
        throw std::invalid_argument("population_size must be at least 2");
    }
    if (tournament_size == 0 || tournament_size > population_size) {
        throw std::invalid_argument("tournament_size must be in [1, population_size]");
    }
    for (double p : mutation_probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("mutation probabilities must lie in [0, 1]");
        }
    }
    if (!(archive_similarity_threshold >= 0.0 && archive_similarity_threshold <= 1.0)) {
        throw std::invalid_argument("archive_similarity_threshold must lie in [0, 1]");
    }
    if (step_budget == 0) {
        throw std::invalid_argument("step_budget must be positive");
    }
}

std::size_t tournament_select(std::span<const Chromosome> population, std::size_t k, Rng& rng)
{
    if (k == 0 || k > population.size()) {
        throw std::invalid_argument("tournament size out of range");
    }
    if (std::any_of(population.begin(), population.end(), [](const Chromosome& c) { return !c.fitness; })) {
        throw UnevaluatedPopulation();
    }
    std::vector<std::size_t> idx(population.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::size_t best = population.size();
    for (std::size_t n = 0; n < k; ++n) {
        std::swap(idx[n], idx[n + rng.below(idx.size() - n)]);
        const auto candidate = idx[n];
        if (best == population.size() || *population[candidate].fitness > *population[best].fitness ||
            (*population[candidate].fitness == *population[best].fitness && candidate < best)) {
            best = candidate;
        }
    }
    return best;
}

std::size_t best_of_generation(std::span<const Chromosome> population, FitnessMode mode)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        const bool better = mode == FitnessMode::Beta
                                ? population[i].source_similarity < population[best].source_similarity
                                : population[i].fitness.value_or(0.0) > population[best].fitness.value_or(0.0);
        if (better) {
            best = i;
        }
    }
    return best;
}

void update_archive(Archive& archive, std::span<const Chromosome> population, double threshold, std::size_t generation)
{
    if (population.empty()) {
        return;
    }
    std::size_t fittest = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].fitness.value_or(0.0) > population[fittest].fitness.value_or(0.0)) {
            fittest = i;
        }
    }
    auto admit = [&](std::size_t i, const char* reason) {
        const auto& candidate = population[i];
        const auto n = static_cast<double>(candidate.statements.size());
        for (const auto& member : archive.members) {
            // |A∩B|/|A∪B| never exceeds min/max of the set sizes.
            const auto m = static_cast<double>(member.statements.size());
            if (std::min(n, m) < threshold * std::max(n, m)) {
                continue;
            }
            if (jaccard(member.statements, candidate.statements) >= threshold) {
                return;
            }
        }
        archive.members.push_back(candidate);
        archive.admission_log.push_back({generation, candidate.id, reason});
    };
    admit(fittest, "fittest");
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (i != fittest) {
            admit(i, "novel");
        }
    }
}

Evolver::Evolver(Program seed, EAConfig config)
    : seed_(std::move(seed)), config_(config), rng_(config.rng_seed), labels_("M"), source_(StatementSet::of(seed_))
{
    config_.check();
    if (auto report = validate(seed_); !report.valid()) {
        throw InvalidProgram("seed program is invalid: " + std::string(to_string(report.violations.front().kind)) +
                             " " + report.violations.front().detail);
    }
    try {
        seed_result_ = execute(seed_, config_.step_budget);
    } catch (const Error& e) {
        throw InvalidProgram(std::string("seed program does not run to completion: ") + e.what());
    }
    if (config_.pivot) {
        pivot_ = PivotPoint{*config_.pivot};
        if (pivot_->seed_offset == 0 || pivot_->seed_offset >= seed_.body.size() || jump_crosses(seed_, *pivot_)) {
            throw std::invalid_argument(fmt::format("pivot {} is not a valid split of the seed", *config_.pivot));
        }
    } else {
        pivot_ = default_pivot(seed_);
    }
}

void Evolver::check_variant(const Program& program) const
{
    if (auto report = validate(program); !report.valid()) {
        const auto& v = report.violations.front();
        throw EquivalenceViolation(fmt::format("variant failed validation: {} {}", to_string(v.kind), v.detail));
    }
    MachineState result;
    try {
        result = execute(program, config_.step_budget);
    } catch (const Error& e) {
        throw EquivalenceViolation(std::string("variant does not run to completion: ") + e.what());
    }
    if (!same_observable(result, seed_result_)) {
        throw EquivalenceViolation("variant behaviour differs from the seed");
    }
}

Chromosome Evolver::make_chromosome(Program program, std::size_t generation)
{
    check_variant(program);
    Chromosome c;
    c.id = next_id_++;
    c.statements = StatementSet::of(program);
    c.source_similarity = jaccard(c.statements, source_);
    c.program = std::move(program);
    c.generation_born = generation;
    return c;
}

void Evolver::evaluate(std::vector<Chromosome>& population) const
{
    if (config_.fitness_mode == FitnessMode::Alpha) {
        for (auto& c : population) {
            c.fitness = alpha_fitness(c.statements, source_);
        }
        return;
    }
    std::vector<StatementSet> sets;
    sets.reserve(population.size());
    for (const auto& c : population) {
        sets.push_back(c.statements);
    }
    const auto scores = novelty_scores(sets, source_);
    for (std::size_t i = 0; i < population.size(); ++i) {
        population[i].fitness = scores[i];
    }
}

GenerationRecord Evolver::record(std::size_t generation) const
{
    const auto& pop = state_.population;
    GenerationRecord r;
    r.generation = generation;
    double fit_sum = 0.0;
    double sim_sum = 0.0;
    r.best_fitness = *pop.front().fitness;
    for (const auto& c : pop) {
        r.best_fitness = std::max(r.best_fitness, *c.fitness);
        fit_sum += *c.fitness;
        sim_sum += c.source_similarity;
    }
    r.mean_fitness = fit_sum / static_cast<double>(pop.size());
    r.mean_source_similarity = sim_sum / static_cast<double>(pop.size());
    r.best_source_similarity = pop[best_of_generation(pop, config_.fitness_mode)].source_similarity;
    r.archive_size = state_.archive.members.size();
    return r;
}

void Evolver::initialize()
{
    constexpr std::size_t kMaxAttempts = 16;
    state_ = EAState{};
    std::vector<Chromosome> population;
    population.reserve(config_.population_size);
    for (std::size_t i = 0; i < config_.population_size; ++i) {
        Program program = seed_;
        for (std::size_t t = 0; t < config_.init_transform_count; ++t) {
            bool applied = false;
            for (std::size_t attempt = 0; attempt < kMaxAttempts && !applied; ++attempt) {
                const auto tag = kAllTransforms[rng_.below(kAllTransforms.size())];
                try {
                    auto result = apply_transform(tag, program, rng_, labels_, pivot_);
                    applied = result.applied;
                    program = std::move(result.program);
                } catch (const NoEligibleSite&) {
                }
            }
            if (!applied) {
                throw InitializationFailure(fmt::format("no transform applies to individual {}", i));
            }
        }
        population.push_back(make_chromosome(std::move(program), 0));
    }
    evaluate(population);
    state_.population = std::move(population);
    update_archive(state_.archive, state_.population, config_.archive_similarity_threshold, 0);
    state_.initial_record = record(0);
}

Program Evolver::mutate(Program program)
{
    for (auto tag : kAllTransforms) {
        if (!rng_.chance(config_.probability(tag))) {
            continue;
        }
        try {
            auto result = apply_transform(tag, program, rng_, labels_, pivot_);
            if (!result.applied) {
                state_.events.push_back(fmt::format("gen {}: {} skipped ({})", state_.generation + 1, to_string(tag),
                                                    result.skip_reason));
            }
            program = std::move(result.program);
        } catch (const NoEligibleSite& e) {
            state_.events.push_back(fmt::format("gen {}: {} skipped ({})", state_.generation + 1, to_string(tag), e.what()));
        }
    }
    return program;
}

void Evolver::step_generation()
{
    if (state_.population.empty()) {
        initialize();
    }
    const auto next_generation = state_.generation + 1;
    std::vector<Chromosome> children;
    children.reserve(config_.population_size);
    while (children.size() < config_.population_size) {
        const auto& a = state_.population[tournament_select(state_.population, config_.tournament_size, rng_)];
        const auto& b = state_.population[tournament_select(state_.population, config_.tournament_size, rng_)];
        Program first = a.program;
        Program second = b.program;
        if (pivot_) {
            auto crossed = crossover_cbi(a.program, b.program, *pivot_);
            if (!crossed.applied) {
                state_.events.push_back(fmt::format("gen {}: crossover skipped ({})", next_generation, crossed.skip_reason));
            }
            first = std::move(crossed.first);
            second = std::move(crossed.second);
        }
        first = mutate(std::move(first));
        second = mutate(std::move(second));
        children.push_back(make_chromosome(std::move(first), next_generation));
        if (children.size() < config_.population_size) {
            children.push_back(make_chromosome(std::move(second), next_generation));
        }
    }
    evaluate(children);
    state_.population = std::move(children);
    state_.generation = next_generation;
    state_.variants_produced += config_.population_size;
    update_archive(state_.archive, state_.population, config_.archive_similarity_threshold, next_generation);
    state_.history.push_back(record(next_generation));
}

RunResult Evolver::run(const Observer& observer)
{
    initialize();
    RunResult result;
    result.initial_population = state_.population;
    result.best_of_generation.push_back(state_.population[best_of_generation(state_.population, config_.fitness_mode)].program);
    if (observer) {
        observer(state_);
    }
    for (std::size_t g = 0; g < config_.generations; ++g) {
        step_generation();
        result.best_of_generation.push_back(
            state_.population[best_of_generation(state_.population, config_.fitness_mode)].program);
        if (observer) {
            observer(state_);
        }
    }
    result.history = state_.history;
    result.initial_record = state_.initial_record;
    result.final_population = state_.population;
    result.archive = state_.archive;
    result.variants_produced = state_.variants_produced;
    result.events = state_.events;
    return result;
}

std::vector<Chromosome> init_population(Evolver& evolver)
{
    evolver.initialize();
    return evolver.state().population;
}

RunResult run(const Program& seed, const EAConfig& config, const Evolver::Observer& observer)
{
    Evolver evolver(seed, config);
    return evolver.run(observer);
}

} // namespace mage
