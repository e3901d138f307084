#pragma once

#include "mage/asm_model.hpp"
#include "mage/random.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace mage {

enum class TransformTag { FI, FJ, UB, CZJ, CNZJ };

inline constexpr std::array<TransformTag, 5> kAllTransforms{TransformTag::FI, TransformTag::FJ, TransformTag::UB,
                                                             TransformTag::CZJ, TransformTag::CNZJ};

std::string_view to_string(TransformTag tag);
std::optional<TransformTag> parse_transform_tag(std::string_view name);

struct TransformKind {
    TransformTag tag;
    double probability = 0.2;
};

// Issues labels of the form <prefix><n>. Names already defined in the program are skipped,
// so a label never collides with the seed or with an earlier transform.
class LabelAllocator {
public:
    explicit LabelAllocator(std::string run_prefix = "M", std::uint64_t first = 0)
        : prefix_(std::move(run_prefix)), counter_(first) {}

    std::string next(const Program& p);

    const std::string& prefix() const { return prefix_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::string prefix_;
    std::uint64_t counter_;
};

// Seed offset separating the upper and lower crossover regions.
struct PivotPoint {
    std::uint32_t seed_offset = 0;
};

bool jump_crosses(const Program& p, PivotPoint pivot);

// Valid pivot closest to the middle of the seed body, or nullopt if every offset is crossed
// by a jump.
std::optional<PivotPoint> default_pivot(const Program& seed);

struct TransformResult {
    Program program;
    bool applied = true;
    std::string skip_reason;
};

// Every transform maps a valid program to a valid, equivalent one. When a pivot is given the
// inserted statements stay inside the crossover region of the insertion site. Output that
// would exceed the size limit is discarded and the input returned with applied=false.

TransformResult t_fake_instruction(const Program& p, Rng& rng);

// Throws NoEligibleSite when the body holds no instruction.
TransformResult t_forced_jmp(const Program& p, Rng& rng, LabelAllocator& labels,
                             std::optional<PivotPoint> pivot = std::nullopt);

// Dead block of 1..5 random dialect instructions jumped over by a fresh label.
TransformResult t_untouchable_block(const Program& p, Rng& rng, LabelAllocator& labels);

enum class ZeroFlavor { Z, NZ };

// Throws NoEligibleSite when the body holds no instruction.
TransformResult t_conditional_jmp(const Program& p, Rng& rng, LabelAllocator& labels, ZeroFlavor flavor,
                                  std::optional<PivotPoint> pivot = std::nullopt);

TransformResult apply_transform(TransformTag tag, const Program& p, Rng& rng, LabelAllocator& labels,
                                std::optional<PivotPoint> pivot = std::nullopt);

struct CrossoverResult {
    Program first;
    Program second;
    bool applied = true;
    std::string skip_reason;
};

// Single-point code block interchange: first = upper(p) + lower(q), second = upper(q) + lower(p).
// Throws IncompatibleParents when the parents carry different seed provenance. When a jump
// crosses the pivot in either parent the parents are returned unchanged with applied=false.
CrossoverResult crossover_cbi(const Program& p, const Program& q, PivotPoint pivot);

} // namespace mage
