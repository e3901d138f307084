#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mage {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    SyntaxError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

struct UndefinedLabel : Error {
    explicit UndefinedLabel(const std::string& label) : Error("undefined label '" + label + "'"), label(label) {}
    std::string label;
};

struct DuplicateLabel : Error {
    explicit DuplicateLabel(const std::string& label) : Error("duplicate label '" + label + "'"), label(label) {}
    std::string label;
};

struct SizeLimitExceeded : Error {
    explicit SizeLimitExceeded(std::size_t bytes)
        : Error("serialized program is " + std::to_string(bytes) + " bytes (limit 65536)"), bytes(bytes) {}
    std::size_t bytes;
};

struct StepBudgetExceeded : Error {
    explicit StepBudgetExceeded(std::size_t budget)
        : Error("step budget of " + std::to_string(budget) + " exhausted"), budget(budget) {}
    std::size_t budget;
};

struct StackUnderflow : Error {
    using Error::Error;
};

struct InvalidProgram : Error {
    using Error::Error;
};

struct NoEligibleSite : Error {
    using Error::Error;
};

struct IncompatibleParents : Error {
    using Error::Error;
};

struct UndefinedSimilarity : Error {
    UndefinedSimilarity() : Error("jaccard similarity of two empty sets is undefined") {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct EmptySample : Error {
    EmptySample() : Error("Mann-Whitney U needs non-empty samples") {}
};

struct BodyTooShort : Error {
    using Error::Error;
};

struct InitializationFailure : Error {
    using Error::Error;
};

struct UnevaluatedPopulation : Error {
    UnevaluatedPopulation() : Error("population contains chromosomes without fitness") {}
};

struct EquivalenceViolation : Error {
    using Error::Error;
};

} // namespace mage
