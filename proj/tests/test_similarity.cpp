#include "support.hpp"

#include "mage/errors.hpp"
#include "mage/evolve.hpp"
#include "mage/random.hpp"
#include "mage/similarity.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace mage;

namespace {

using Strings = std::set<std::string>;

// Reference Jaccard over plain std::set, independent of StatementSet.
double oracle_jaccard(const Strings& a, const Strings& b)
{
    std::size_t common = 0;
    for (const auto& x : a) {
        common += b.count(x);
    }
    Strings all = a;
    all.insert(b.begin(), b.end());
    return static_cast<double>(common) / static_cast<double>(all.size());
}

StatementSet set_of(const Strings& s) { return StatementSet(std::vector<std::string>(s.begin(), s.end())); }

Strings random_strings(Rng& rng, std::size_t universe, std::size_t max_size)
{
    Strings out;
    const auto n = 1 + rng.below(max_size);
    for (std::size_t i = 0; i < n; ++i) {
        out.insert("S" + std::to_string(rng.below(universe)));
    }
    return out;
}

// Novelty of each member computed from scratch: similarity vectors, their mean, distances.
std::vector<double> oracle_novelty(const std::vector<Strings>& pop, const Strings& source)
{
    const auto n = pop.size();
    std::vector<std::vector<double>> vectors;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                v.push_back(oracle_jaccard(pop[j], pop[i]));
            }
        }
        v.push_back(oracle_jaccard(source, pop[i]));
        vectors.push_back(v);
    }
    std::vector<double> mean(n, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t k = 0; k < n; ++k) {
            mean[k] += v[k] / static_cast<double>(n);
        }
    }
    std::vector<double> out;
    for (const auto& v : vectors) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum += (mean[k] - v[k]) * (mean[k] - v[k]);
        }
        out.push_back(std::sqrt(sum));
    }
    return out;
}

} // namespace

TEST_CASE("jaccard examples")
{
    CHECK(jaccard(set_of({"MOV AX, 1", "OUT AX"}), set_of({"MOV AX, 1", "OUT AX"})) == 1.0);
    CHECK(jaccard(set_of({"NOP"}), set_of({"HLT"})) == 0.0);
    CHECK(jaccard(set_of({"A", "B", "C"}), set_of({"B", "C", "D"})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(jaccard(StatementSet{}, StatementSet{}), UndefinedSimilarity);
    CHECK(jaccard(StatementSet{}, set_of({"NOP"})) == 0.0);
}

TEST_CASE("jaccard matches the set oracle and is symmetric and bounded")
{
    Rng rng(21);
    for (int n = 0; n < 500; ++n) {
        auto a = random_strings(rng, 30, 20);
        auto b = random_strings(rng, 30, 20);
        const auto j = jaccard(set_of(a), set_of(b));
        CHECK(j == doctest::Approx(oracle_jaccard(a, b)).epsilon(1e-12));
        CHECK(j == jaccard(set_of(b), set_of(a)));
        CHECK(j >= 0.0);
        CHECK(j <= 1.0);
        CHECK(jaccard(set_of(a), set_of(a)) == 1.0);
    }
}

TEST_CASE("statement sets keep instructions and labels and drop comments")
{
    auto p = mage::test::program_of({"; note", "top: mov ax, 1 ; load", "MOV AX, 1", "jmp top"});
    auto s = StatementSet::of(p);
    CHECK(s.texts() == std::vector<std::string>{"JMP TOP", "MOV AX, 1", "TOP:"});
    CHECK(s.contains("TOP:"));
    CHECK_FALSE(s.contains("; note"));
    CHECK_FALSE(s.contains("never interned anywhere"));
}

TEST_CASE("similarity_vector examples")
{
    const auto x = set_of({"MOV AX, 1", "OUT AX"});
    const std::vector<StatementSet> clones{x, x, x};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(similarity_vector(clones, i, x) == SimilarityVector{1.0, 1.0, 1.0});
    }

    const auto y = set_of({"MOV AX, 1", "NOP"});
    const std::vector<StatementSet> pair{x, y};
    CHECK(similarity_vector(pair, 0, x) == SimilarityVector{jaccard(y, x), 1.0});

    CHECK_THROWS_AS(similarity_vector(std::vector<StatementSet>{x}, 0, x), DimensionMismatch);
}

TEST_CASE("similarity_vector on a toy population matches brute force")
{
    const std::vector<Strings> pop{{"A", "B", "C"}, {"B", "C", "D", "E"}, {"A", "E"}};
    const Strings source{"A", "B"};
    std::vector<StatementSet> sets;
    for (const auto& s : pop) {
        sets.push_back(set_of(s));
    }
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto v = similarity_vector(sets, i, set_of(source));
        std::vector<double> expected;
        for (std::size_t j = 0; j < pop.size(); ++j) {
            if (j != i) {
                expected.push_back(oracle_jaccard(pop[j], pop[i]));
            }
        }
        expected.push_back(oracle_jaccard(source, pop[i]));
        REQUIRE(v.size() == expected.size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            CHECK(v[k] == doctest::Approx(expected[k]));
        }
    }
}

TEST_CASE("mean_vector examples")
{
    const SimilarityVector v{0.25, 0.5, 1.0};
    CHECK(mean_vector(std::vector<SimilarityVector>{v, v, v}) == v);
    CHECK(mean_vector(std::vector<SimilarityVector>{{0.0, 0.0}, {1.0, 1.0}}) == SimilarityVector{0.5, 0.5});
    CHECK_THROWS_AS(mean_vector(std::vector<SimilarityVector>{{0.0}, {1.0, 1.0}}), DimensionMismatch);
    CHECK_THROWS_AS(mean_vector(std::vector<SimilarityVector>{}), DimensionMismatch);
}

TEST_CASE("mean_vector of random vectors matches a summation oracle")
{
    Rng rng(5);
    std::vector<SimilarityVector> vectors(20, SimilarityVector(20));
    for (auto& v : vectors) {
        for (auto& x : v) {
            x = rng.uniform01();
        }
    }
    const auto mean = mean_vector(vectors);
    for (std::size_t k = 0; k < 20; ++k) {
        double sum = 0.0;
        for (const auto& v : vectors) {
            sum += v[k];
        }
        CHECK(mean[k] == doctest::Approx(sum / 20.0).epsilon(1e-12));
    }
}

TEST_CASE("novelty_fitness examples")
{
    const SimilarityVector m{0.3, 0.7};
    CHECK(novelty_fitness(m, m) == 0.0);
    CHECK(novelty_fitness({0.0, 0.0}, {1.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(novelty_fitness({0.0}, {1.0, 1.0}), DimensionMismatch);
}

TEST_CASE("novelty scores of a toy population match a from-scratch oracle")
{
    const std::vector<Strings> pop{{"A", "B", "C"}, {"A", "B", "D"}, {"X", "Y"}, {"A", "B", "C", "Y"}};
    const Strings source{"A", "B", "C"};
    std::vector<StatementSet> sets;
    for (const auto& s : pop) {
        sets.push_back(set_of(s));
    }
    const auto scores = novelty_scores(sets, set_of(source));
    const auto expected = oracle_novelty(pop, source);
    REQUIRE(scores.size() == expected.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(scores[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
}

TEST_CASE("identical chromosomes have zero novelty; one novel statement raises it")
{
    const Strings base{"MOV AX, 1", "OUT AX", "HLT"};
    std::vector<StatementSet> pop(5, set_of(base));
    for (double xi : novelty_scores(pop, set_of(base))) {
        CHECK(xi == 0.0);
    }
    auto changed = base;
    changed.insert("NOP");
    pop[2] = set_of(changed);
    const auto scores = novelty_scores(pop, set_of(base));
    CHECK(scores[2] > 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i != 2) {
            CHECK(scores[2] > scores[i]);
        }
    }
}

TEST_CASE("novelty scores do not depend on evaluation order")
{
    Rng rng(8);
    std::vector<Strings> pop;
    for (int i = 0; i < 8; ++i) {
        pop.push_back(random_strings(rng, 15, 10));
    }
    const Strings source{"S1", "S2", "S3"};
    std::vector<StatementSet> sets;
    for (const auto& s : pop) {
        sets.push_back(set_of(s));
    }
    const auto forward = novelty_scores(sets, set_of(source));
    std::vector<StatementSet> reversed(sets.rbegin(), sets.rend());
    const auto backward = novelty_scores(reversed, set_of(source));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CHECK(forward[i] == doctest::Approx(backward[sets.size() - 1 - i]).epsilon(1e-12));
    }
}

TEST_CASE("alpha fitness is the similarity to the source")
{
    const auto src = set_of({"MOV AX, 1", "OUT AX"});
    CHECK(alpha_fitness(src, src) == 1.0);
    CHECK(alpha_fitness(set_of({"NOP"}), src) == 0.0);
    const auto other = set_of({"MOV AX, 1", "NOP"});
    CHECK(alpha_fitness(other, src) == jaccard(other, src));
}

TEST_CASE("seed-derived initial populations stay close to the source")
{
    // Table 2's initial columns lie between 0.9594 and 1.0.
    const auto seed = mage::test::corpus_program("checksum");
    EAConfig cfg;
    Evolver evolver(seed, cfg);
    evolver.initialize();
    for (const auto& c : evolver.state().population) {
        CHECK(c.source_similarity >= 0.95);
        CHECK(c.source_similarity <= 1.0);
    }
}
