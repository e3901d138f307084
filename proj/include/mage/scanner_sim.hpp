#pragma once

#include "mage/asm_model.hpp"
#include "mage/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mage {

// Contiguous window of normalized seed-body statements.
using Signature = std::vector<std::string>;

struct Scanner {
    std::vector<Signature> signatures;
};

struct ScannerEnsemble {
    std::vector<Scanner> scanners;
    std::size_t gram_length = 4;
    std::string seed_fingerprint;

    std::size_t size() const { return scanners.size(); }
};

struct EnsembleParams {
    std::size_t scanners = 20;
    std::size_t signatures_per_scanner = 3;
    std::size_t gram_length = 4;
};

// Normalized instructions and labels of the body in order; comments and directives dropped.
std::vector<std::string> normalized_body(const Program& p);

std::string program_fingerprint(const Program& p);

// Throws BodyTooShort when the normalized seed body is shorter than the gram length.
ScannerEnsemble build_ensemble(const Program& seed, const EnsembleParams& params, Rng& rng);

bool detects(const Scanner& scanner, const std::vector<std::string>& normalized);

std::size_t detect_count(const ScannerEnsemble& ensemble, const Program& variant);

nlohmann::json to_json(const ScannerEnsemble& ensemble);
ScannerEnsemble ensemble_from_json(const nlohmann::json& j);

} // namespace mage
