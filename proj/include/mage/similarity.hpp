#pragma once

#include "mage/asm_model.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <string>
#include <vector>

namespace mage {

// Deduplicated normalized statements of a program body. Comments and directives are
// excluded; labels and instructions count. Statement texts are interned in a process-wide
// table, so a set is a sorted vector of ids and set algebra never touches the strings.
class StatementSet {
public:
    using Id = std::uint32_t;

    StatementSet() = default;
    explicit StatementSet(const std::vector<std::string>& items);

    static StatementSet of(const Program& p);

    const std::vector<Id>& ids() const { return ids_; }
    // Texts of the members, sorted lexicographically.
    std::vector<std::string> texts() const;
    bool contains(std::string_view text) const;
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    bool operator==(const StatementSet&) const = default;

private:
    std::vector<Id> ids_;
};

// |a ∩ b| / |a ∪ b|. Throws UndefinedSimilarity when both sets are empty.
double jaccard(const StatementSet& a, const StatementSet& b);

using SimilarityVector = std::vector<double>;

// Similarities of member i to every other member in population order, then to the source.
SimilarityVector similarity_vector(std::span<const StatementSet> population, std::size_t i,
                                   const StatementSet& source);

// Throws DimensionMismatch on ragged or empty input.
SimilarityVector mean_vector(std::span<const SimilarityVector> vectors);

// Euclidean distance between an individual's similarity vector and the population mean.
double novelty_fitness(const SimilarityVector& si, const SimilarityVector& mean);

// Similarity to the source, the quantity the alpha indicator maximizes.
double alpha_fitness(const StatementSet& chromosome, const StatementSet& source);

// Novelty fitness of every member, computed from the full pairwise Jaccard matrix.
std::vector<double> novelty_scores(std::span<const StatementSet> population, const StatementSet& source);

} // namespace mage
