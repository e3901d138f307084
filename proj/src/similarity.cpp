#include "mage/similarity.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace mage {

namespace {

// Append-only text <-> id table shared by every StatementSet in the process.
class InternTable {
public:
    StatementSet::Id intern(const std::string& text)
    {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = ids_.try_emplace(text, static_cast<StatementSet::Id>(texts_.size()));
        if (inserted) {
            texts_.push_back(&it->first);
        }
        return it->second;
    }

    std::optional<StatementSet::Id> find(std::string_view text) const
    {
        std::lock_guard lock(mutex_);
        auto it = ids_.find(std::string(text));
        if (it == ids_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::string text(StatementSet::Id id) const
    {
        std::lock_guard lock(mutex_);
        return *texts_.at(id);
    }

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, StatementSet::Id> ids_;
    std::vector<const std::string*> texts_;
};

InternTable& intern_table()
{
    static InternTable table;
    return table;
}

} // namespace

StatementSet::StatementSet(const std::vector<std::string>& items)
{
    auto& table = intern_table();
    ids_.reserve(items.size());
    for (const auto& item : items) {
        ids_.push_back(table.intern(item));
    }
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::vector<std::string> StatementSet::texts() const
{
    std::vector<std::string> out;
    out.reserve(ids_.size());
    for (auto id : ids_) {
        out.push_back(intern_table().text(id));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool StatementSet::contains(std::string_view text) const
{
    const auto id = intern_table().find(text);
    return id && std::binary_search(ids_.begin(), ids_.end(), *id);
}

StatementSet StatementSet::of(const Program& p)
{
    std::vector<std::string> items;
    items.reserve(p.body.size());
    for (const auto& s : p.body) {
        if (s.is_instruction() || s.is_label()) {
            items.push_back(normalize_statement(s));
        }
    }
    return StatementSet(items);
}

double jaccard(const StatementSet& a, const StatementSet& b)
{
    if (a.empty() && b.empty()) {
        throw UndefinedSimilarity();
    }
    const auto& x = a.ids();
    const auto& y = b.ids();
    std::size_t common = 0;
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
}

SimilarityVector similarity_vector(std::span<const StatementSet> population, std::size_t i, const StatementSet& source)
{
    if (population.size() < 2 || i >= population.size()) {
        throw DimensionMismatch("similarity vector needs at least two members and a valid index");
    }
    SimilarityVector v;
    v.reserve(population.size());
    for (std::size_t j = 0; j < population.size(); ++j) {
        if (j != i) {
            v.push_back(jaccard(population[j], population[i]));
        }
    }
    v.push_back(jaccard(source, population[i]));
    return v;
}

SimilarityVector mean_vector(std::span<const SimilarityVector> vectors)
{
    if (vectors.empty()) {
        throw DimensionMismatch("mean of no vectors");
    }
    SimilarityVector mean(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        if (v.size() != mean.size()) {
            throw DimensionMismatch("similarity vectors differ in length");
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
            mean[k] += v[k];
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(vectors.size());
    }
    return mean;
}

double novelty_fitness(const SimilarityVector& si, const SimilarityVector& mean)
{
    if (si.size() != mean.size()) {
        throw DimensionMismatch("similarity vector and mean differ in length");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < si.size(); ++k) {
        const double d = mean[k] - si[k];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double alpha_fitness(const StatementSet& chromosome, const StatementSet& source) { return jaccard(chromosome, source); }

std::vector<double> novelty_scores(std::span<const StatementSet> population, const StatementSet& source)
{
    const auto n = population.size();
    if (n < 2) {
        throw DimensionMismatch("novelty needs at least two members");
    }
    std::vector<double> pair(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pair[i * n + j] = pair[j * n + i] = jaccard(population[i], population[j]);
        }
    }
    std::vector<SimilarityVector> vectors(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = vectors[i];
        v.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                v.push_back(pair[j * n + i]);
            }
        }
        v.push_back(jaccard(source, population[i]));
    }
    const auto mean = mean_vector(vectors);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = novelty_fitness(vectors[i], mean);
    }
    return scores;
}

} // namespace mage
