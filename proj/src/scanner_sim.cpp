#include "mage/scanner_sim.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace mage {

std::vector<std::string> normalized_body(const Program& p)
{
    std::vector<std::string> out;
    out.reserve(p.body.size());
    for (const auto& s : p.body) {
        if (s.is_instruction() || s.is_label()) {
            out.push_back(normalize_statement(s));
        }
    }
    return out;
}

std::string program_fingerprint(const Program& p)
{
    // FNV-1a over the serialized text.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_unchecked(p)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

ScannerEnsemble build_ensemble(const Program& seed, const EnsembleParams& params, Rng& rng)
{
    if (params.gram_length < 2) {
        throw BodyTooShort("signature length must be at least 2");
    }
    const auto body = normalized_body(seed);
    if (body.size() < params.gram_length) {
        throw BodyTooShort(fmt::format("seed body has {} statements, signatures need {}", body.size(), params.gram_length));
    }
    std::vector<Signature> windows;
    for (std::size_t i = 0; i + params.gram_length <= body.size(); ++i) {
        Signature gram(body.begin() + static_cast<std::ptrdiff_t>(i),
                       body.begin() + static_cast<std::ptrdiff_t>(i + params.gram_length));
        if (std::find(windows.begin(), windows.end(), gram) == windows.end()) {
            windows.push_back(std::move(gram));
        }
    }

    ScannerEnsemble e;
    e.gram_length = params.gram_length;
    e.seed_fingerprint = program_fingerprint(seed);
    const auto per = std::min(params.signatures_per_scanner, windows.size());
    for (std::size_t m = 0; m < params.scanners; ++m) {
        // Partial Fisher-Yates over window indices gives distinct signatures.
        std::vector<std::size_t> idx(windows.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Scanner scanner;
        for (std::size_t k = 0; k < per; ++k) {
            std::swap(idx[k], idx[k + rng.below(idx.size() - k)]);
            scanner.signatures.push_back(windows[idx[k]]);
        }
        e.scanners.push_back(std::move(scanner));
    }
    return e;
}

bool detects(const Scanner& scanner, const std::vector<std::string>& normalized)
{
    return std::any_of(scanner.signatures.begin(), scanner.signatures.end(), [&](const Signature& sig) {
        return std::search(normalized.begin(), normalized.end(), sig.begin(), sig.end()) != normalized.end();
    });
}

std::size_t detect_count(const ScannerEnsemble& ensemble, const Program& variant)
{
    const auto body = normalized_body(variant);
    return static_cast<std::size_t>(std::count_if(ensemble.scanners.begin(), ensemble.scanners.end(),
                                                  [&](const Scanner& s) { return detects(s, body); }));
}

nlohmann::json to_json(const ScannerEnsemble& ensemble)
{
    nlohmann::json scanners = nlohmann::json::array();
    for (const auto& s : ensemble.scanners) {
        scanners.push_back({{"signatures", s.signatures}});
    }
    return {
        {"gram_length", ensemble.gram_length},
        {"seed_fingerprint", ensemble.seed_fingerprint},
        {"scanners", scanners},
    };
}

ScannerEnsemble ensemble_from_json(const nlohmann::json& j)
{
    ScannerEnsemble e;
    e.gram_length = j.at("gram_length").get<std::size_t>();
    e.seed_fingerprint = j.at("seed_fingerprint").get<std::string>();
    for (const auto& s : j.at("scanners")) {
        e.scanners.push_back({s.at("signatures").get<std::vector<Signature>>()});
    }
    return e;
}

} // namespace mage
