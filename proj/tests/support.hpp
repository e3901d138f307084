#pragma once

#include "mage/asm_model.hpp"
#include "mage/run_io.hpp"

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace mage::test {

inline const std::vector<std::string> kCorpus{"checksum", "collatz", "countdown", "fib", "gcd", "stack_reverse"};

inline std::filesystem::path corpus_path(const std::string& name)
{
    return std::filesystem::path(MAGE_CORPUS_DIR) / (name + ".vasm");
}

inline Program corpus_program(const std::string& name) { return parse_program(read_text(corpus_path(name))); }

// Wraps body lines in the minimal prologue and epilogue.
inline std::string program_text(std::initializer_list<std::string> body)
{
    std::string text = ".MODEL TINY\n.CODE\n;;BODY-START\n";
    for (const auto& line : body) {
        text += line + "\n";
    }
    return text + ";;BODY-END\nEND\n";
}

inline Program program_of(std::initializer_list<std::string> body) { return parse_program(program_text(body)); }

inline std::vector<std::string> body_lines(const Program& p)
{
    std::vector<std::string> out;
    for (const auto& s : p.body) {
        out.push_back(normalize_statement(s));
    }
    return out;
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("mage_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace mage::test
