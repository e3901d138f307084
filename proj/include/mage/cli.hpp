#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

namespace mage::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;
inline constexpr int kUsageFailure = 2;

int cmd_validate(const std::filesystem::path& program, std::ostream& out, std::ostream& err);

int cmd_mutate(const std::filesystem::path& program, const std::string& transform, std::uint64_t rng_seed,
               std::size_t times, std::ostream& out, std::ostream& err);

int cmd_evolve(const std::filesystem::path& config, std::optional<std::uint64_t> rng_seed, std::ostream& out,
               std::ostream& err);

int cmd_compare(const std::filesystem::path& config, std::optional<std::uint64_t> rng_seed, std::ostream& out,
                std::ostream& err);

struct EnsembleBuild {
    std::filesystem::path seed_program;
    std::filesystem::path output;
    std::size_t scanners = 20;
    std::size_t signatures_per_scanner = 3;
    std::size_t gram_length = 4;
    std::uint64_t rng_seed = 7;
};

int cmd_build_ensemble(const EnsembleBuild& build, std::ostream& out, std::ostream& err);

// Target is a .vasm file or a run directory (one row per best/gen_*.vasm).
int cmd_scan(const std::filesystem::path& ensemble, const std::filesystem::path& target, std::ostream& out,
             std::ostream& err);

// Each input is a single-column CSV of reals; an optional non-numeric header line is skipped.
int cmd_stats(const std::filesystem::path& sample1, const std::filesystem::path& sample2, std::ostream& out,
              std::ostream& err);

nlohmann::json utest_json(double u, double u1, double u2, double z, double p, std::pair<double, double> region,
                          bool reject);

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace mage::cli
