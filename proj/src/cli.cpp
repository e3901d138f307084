#include "mage/cli.hpp"

#include "mage/errors.hpp"
#include "mage/evolve.hpp"
#include "mage/run_io.hpp"
#include "mage/scanner_sim.hpp"
#include "mage/stats.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fmt/format.h>
#include <sstream>

namespace mage::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json report_json(const ValidityReport& report)
{
    json violations = json::array();
    for (const auto& v : report.violations) {
        json entry{{"kind", std::string(to_string(v.kind))}, {"detail", v.detail}};
        entry["body_index"] = v.body_index ? json(*v.body_index) : json(nullptr);
        violations.push_back(std::move(entry));
    }
    return {{"valid", report.valid()}, {"violations", violations}};
}

json result_json(const UTestResult& r)
{
    return utest_json(r.u, r.u1, r.u2, r.z, r.p_two_tailed, r.acceptance_region_u, r.reject_null);
}

Program load_program(const fs::path& path) { return parse_program(read_text(path)); }

struct Completed {
    RunResult result;
    fs::path dir;
};

Completed evolve_into(const ExperimentConfig& cfg, const Program& seed, const fs::path& dir)
{
    RunWriter writer(dir, cfg, seed);
    auto result = run(seed, cfg.ea, [&](const EAState& state) { writer.observe(state); });
    writer.finish(result);
    return {std::move(result), dir};
}

ExperimentConfig load_config(const fs::path& path, std::optional<std::uint64_t> rng_seed)
{
    auto cfg = load_experiment_config(path);
    if (rng_seed) {
        cfg.ea.rng_seed = *rng_seed;
    }
    return cfg;
}

std::vector<double> source_similarities(const std::vector<Chromosome>& population)
{
    std::vector<double> out;
    out.reserve(population.size());
    for (const auto& c : population) {
        out.push_back(c.source_similarity);
    }
    return out;
}

std::vector<double> read_column(const fs::path& path)
{
    std::istringstream in(read_text(path));
    std::vector<double> values;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
        if (line.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            double v = std::stod(line, &used);
            if (used != line.size()) {
                throw std::invalid_argument(line);
            }
            values.push_back(v);
        } catch (const std::exception&) {
            if (line_number == 1) {
                continue; // header
            }
            throw ConfigError(fmt::format("{}:{}: not a number '{}'", path.string(), line_number, line));
        }
    }
    return values;
}

} // namespace

json utest_json(double u, double u1, double u2, double z, double p, std::pair<double, double> region, bool reject)
{
    return {
        {"u", u},
        {"u1", u1},
        {"u2", u2},
        {"z", z},
        {"p_two_tailed", p},
        {"acceptance_region_u", {region.first, region.second}},
        {"reject_null", reject},
    };
}

int cmd_validate(const fs::path& program, std::ostream& out, std::ostream& err)
{
    Program p;
    try {
        p = load_program(program);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    } catch (const UndefinedLabel& e) {
        // Parsed structurally, but a jump is dangling: report it as a violation.
        ValidityReport report;
        report.violations.push_back({ViolationKind::UndefinedLabel, e.label, std::nullopt});
        out << report_json(report).dump(2) << "\n";
        return kDomainFailure;
    } catch (const DuplicateLabel& e) {
        ValidityReport report;
        report.violations.push_back({ViolationKind::DuplicateLabel, e.label, std::nullopt});
        out << report_json(report).dump(2) << "\n";
        return kDomainFailure;
    } catch (const Error& e) {
        err << program.string() << ": " << e.what() << "\n";
        return kUsageFailure;
    }
    const auto report = validate(p);
    out << report_json(report).dump(2) << "\n";
    return report.valid() ? kOk : kDomainFailure;
}

int cmd_mutate(const fs::path& program, const std::string& transform, std::uint64_t rng_seed, std::size_t times,
               std::ostream& out, std::ostream& err)
{
    auto tag = parse_transform_tag(transform);
    if (!tag) {
        err << "unknown transform '" << transform << "' (FI, FJ, UB, CZJ, CNZJ)\n";
        return kUsageFailure;
    }
    Program p;
    try {
        p = load_program(program);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    Rng rng(rng_seed);
    LabelAllocator labels;
    const auto pivot = default_pivot(p);
    try {
        for (std::size_t n = 0; n < times; ++n) {
            auto result = apply_transform(*tag, p, rng, labels, pivot);
            if (!result.applied) {
                err << "skipped: " << result.skip_reason << "\n";
            }
            p = std::move(result.program);
        }
        out << serialize(p);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kDomainFailure;
    }
    return kOk;
}

int cmd_evolve(const fs::path& config, std::optional<std::uint64_t> rng_seed, std::ostream& out, std::ostream& err)
{
    ExperimentConfig cfg;
    Program seed;
    try {
        cfg = load_config(config, rng_seed);
        seed = load_program(cfg.seed_program_path);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    try {
        auto done = evolve_into(cfg, seed, cfg.output_dir);
        out << fmt::format("{} variants written to {}\n", done.result.variants_produced, done.dir.string());
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << "\n";
        return kDomainFailure;
    }
    return kOk;
}

int cmd_compare(const fs::path& config, std::optional<std::uint64_t> rng_seed, std::ostream& out, std::ostream& err)
{
    ExperimentConfig cfg;
    Program seed;
    try {
        cfg = load_config(config, rng_seed);
        seed = load_program(cfg.seed_program_path);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    try {
        auto alpha_cfg = cfg;
        alpha_cfg.ea.fitness_mode = FitnessMode::Alpha;
        auto beta_cfg = cfg;
        beta_cfg.ea.fitness_mode = FitnessMode::Beta;
        const auto alpha = evolve_into(alpha_cfg, seed, cfg.output_dir / "alpha");
        const auto beta = evolve_into(beta_cfg, seed, cfg.output_dir / "beta");

        const auto ai = source_similarities(alpha.result.initial_population);
        const auto af = source_similarities(alpha.result.final_population);
        const auto bi = source_similarities(beta.result.initial_population);
        const auto bf = source_similarities(beta.result.final_population);

        std::string table = "individual,alpha_initial,alpha_final,beta_initial,beta_final,"
                            "alpha_initial_divergence,alpha_final_divergence,beta_initial_divergence,"
                            "beta_final_divergence\n";
        for (std::size_t i = 0; i < ai.size(); ++i) {
            table += fmt::format("{},{},{},{},{},{},{},{},{}\n", i + 1, format_real(ai[i]), format_real(af[i]),
                                 format_real(bi[i]), format_real(bf[i]), format_real(1.0 - ai[i]),
                                 format_real(1.0 - af[i]), format_real(1.0 - bi[i]), format_real(1.0 - bf[i]));
        }
        write_text(cfg.output_dir / "table2.csv", table);

        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        json verdict{
            {"rng_seed", cfg.ea.rng_seed},
            {"alpha_initial_vs_final", result_json(mann_whitney_u(ai, af))},
            {"beta_initial_vs_final", result_json(mann_whitney_u(bi, bf))},
            {"alpha_initial_vs_beta_initial", result_json(mann_whitney_u(ai, bi))},
            {"mean_source_similarity",
             {{"alpha_initial", mean(ai)}, {"alpha_final", mean(af)}, {"beta_initial", mean(bi)}, {"beta_final", mean(bf)}}},
        };
        write_text(cfg.output_dir / "verdict.json", verdict.dump(2) + "\n");
        out << verdict.dump(2) << "\n";
    } catch (const std::exception& e) {
        err << "compare failed: " << e.what() << "\n";
        return kDomainFailure;
    }
    return kOk;
}

int cmd_build_ensemble(const EnsembleBuild& build, std::ostream& out, std::ostream& err)
{
    Program seed;
    try {
        seed = load_program(build.seed_program);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    try {
        Rng rng(build.rng_seed);
        auto ensemble = build_ensemble(seed, {build.scanners, build.signatures_per_scanner, build.gram_length}, rng);
        write_text(build.output, to_json(ensemble).dump(2) + "\n");
        out << fmt::format("{} scanners written to {}\n", ensemble.size(), build.output.string());
    } catch (const BodyTooShort& e) {
        err << e.what() << "\n";
        return kDomainFailure;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    return kOk;
}

int cmd_scan(const fs::path& ensemble_path, const fs::path& target, std::ostream& out, std::ostream& err)
{
    ScannerEnsemble ensemble;
    std::vector<std::pair<std::string, fs::path>> variants;
    try {
        ensemble = ensemble_from_json(json::parse(read_text(ensemble_path)));
        if (fs::is_directory(target)) {
            const auto best = target / "best";
            if (!fs::is_directory(best)) {
                throw ConfigError(target.string() + " is not a run directory (no best/)");
            }
            for (const auto& entry : fs::directory_iterator(best)) {
                if (entry.path().extension() == ".vasm") {
                    variants.emplace_back(entry.path().stem().string(), entry.path());
                }
            }
            std::sort(variants.begin(), variants.end());
        } else {
            if (!fs::exists(target)) {
                throw ConfigError("no such file " + target.string());
            }
            variants.emplace_back(target.stem().string(), target);
        }
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    std::string csv = "variant,detect_count\n";
    for (const auto& [name, path] : variants) {
        try {
            csv += fmt::format("{},{}\n", name, detect_count(ensemble, load_program(path)));
        } catch (const std::exception& e) {
            err << path.string() << ": " << e.what() << "\n";
            return kUsageFailure;
        }
    }
    out << csv;
    return kOk;
}

int cmd_stats(const fs::path& sample1, const fs::path& sample2, std::ostream& out, std::ostream& err)
{
    std::vector<double> a;
    std::vector<double> b;
    try {
        a = read_column(sample1);
        b = read_column(sample2);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }
    try {
        out << result_json(mann_whitney_u(a, b)).dump(2) << "\n";
    } catch (const EmptySample& e) {
        err << e.what() << "\n";
        return kDomainFailure;
    }
    return kOk;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Evolves diverse, behaviour-preserving variants of small assembly programs"};
    app.require_subcommand(1);

    std::string program_path;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a .vasm program");
    validate_cmd->add_option("program", program_path, "Program file")->required();

    std::string transform;
    std::uint64_t mutate_seed = 1;
    std::size_t times = 1;
    auto* mutate_cmd = app.add_subcommand("mutate", "Apply one transform (FI, FJ, UB, CZJ, CNZJ) and print the result");
    mutate_cmd->add_option("program", program_path, "Program file")->required();
    mutate_cmd->add_option("transform", transform, "Transform name")->required();
    mutate_cmd->add_option("--rng-seed", mutate_seed, "Random seed");
    mutate_cmd->add_option("--times", times, "Number of successive applications");

    std::string config_path;
    std::optional<std::uint64_t> rng_seed;
    auto* evolve_cmd = app.add_subcommand("evolve", "Run one evolution and write its checkpoint directory");
    evolve_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
    evolve_cmd->add_option("--rng-seed", rng_seed, "Override the config's rng_seed");

    auto* compare_cmd = app.add_subcommand("compare", "Run alpha and beta with one seed and test the difference");
    compare_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
    compare_cmd->add_option("--rng-seed", rng_seed, "Override the config's rng_seed");

    std::string ensemble_path;
    std::string target;
    EnsembleBuild build;
    std::string build_seed;
    auto* scan_cmd = app.add_subcommand("scan", "Count simulated scanners detecting a program or a run's best variants");
    scan_cmd->add_option("ensemble", ensemble_path, "Ensemble JSON (written with --build)");
    scan_cmd->add_option("target", target, "Program file or run directory");
    scan_cmd->add_option("--build", build_seed, "Build an ensemble from this seed program instead of scanning");
    scan_cmd->add_option("--scanners", build.scanners, "Scanners in the ensemble");
    scan_cmd->add_option("--signatures", build.signatures_per_scanner, "Signatures per scanner");
    scan_cmd->add_option("--gram", build.gram_length, "Statements per signature");
    scan_cmd->add_option("--rng-seed", build.rng_seed, "Random seed");

    std::string sample1;
    std::string sample2;
    auto* stats_cmd = app.add_subcommand("stats", "Mann-Whitney U test on two single-column CSV files");
    stats_cmd->add_option("sample1", sample1, "First sample")->required();
    stats_cmd->add_option("sample2", sample2, "Second sample")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsageFailure;
    }

    if (*validate_cmd) return cmd_validate(program_path, out, err);
    if (*mutate_cmd) return cmd_mutate(program_path, transform, mutate_seed, times, out, err);
    if (*evolve_cmd) return cmd_evolve(config_path, rng_seed, out, err);
    if (*compare_cmd) return cmd_compare(config_path, rng_seed, out, err);
    if (*scan_cmd) {
        if (!build_seed.empty()) {
            if (ensemble_path.empty()) {
                err << "scan --build needs an output path\n";
                return kUsageFailure;
            }
            build.seed_program = build_seed;
            build.output = ensemble_path;
            return cmd_build_ensemble(build, out, err);
        }
        if (ensemble_path.empty() || target.empty()) {
            err << "scan needs an ensemble and a target\n";
            return kUsageFailure;
        }
        return cmd_scan(ensemble_path, target, out, err);
    }
    return cmd_stats(sample1, sample2, out, err);
}

} // namespace mage::cli
