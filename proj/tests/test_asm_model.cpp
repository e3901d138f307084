#include "support.hpp"

#include "mage/asm_model.hpp"
#include "mage/errors.hpp"
#include "mage/random.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace mage;
using mage::test::body_lines;
using mage::test::program_of;
using mage::test::program_text;

namespace {

Statement only_statement(std::string_view line)
{
    auto parsed = parse_line(line);
    REQUIRE(parsed.size() == 1);
    return parsed.front();
}

// Small straight-line programs over a tiny instruction pool, so that distinct programs
// often coincide in behaviour.
Program random_program(Rng& rng)
{
    static const std::vector<std::string> pool{"MOV AX, 1", "MOV AX, 2", "INC AX", "DEC AX", "OUT AX",
                                               "NOP",       "MOV BX, AX", "CMP AX, 2", "ADD AX, 0"};
    std::string text = ".CODE\n;;BODY-START\n";
    const auto n = rng.between(1, 4);
    for (std::int64_t i = 0; i < n; ++i) {
        text += pool[rng.below(pool.size())] + "\n";
    }
    return parse_program(text + ";;BODY-END\n");
}

} // namespace

TEST_CASE("parse_program splits prologue, body and epilogue")
{
    auto p = parse_program(".MODEL TINY\n;;BODY-START\n    MOV AX, 5\n    OUT AX\n;;BODY-END\n");
    CHECK(p.body.size() == 2);
    CHECK(p.label_table.empty());
    CHECK(p.prologue.size() == 2);
    CHECK(p.epilogue.size() == 1);
    CHECK(p.body[0].provenance == 0u);
    CHECK(p.body[1].provenance == 1u);
    CHECK_FALSE(p.body[0].synthetic);
}

TEST_CASE("parse_program rejects undefined and duplicate labels")
{
    CHECK_THROWS_AS(program_of({"JMP missing"}), UndefinedLabel);
    CHECK_THROWS_AS(program_of({"lbl:", "NOP", "lbl:"}), DuplicateLabel);
}

TEST_CASE("parse_program reports the failing line number")
{
    try {
        parse_program(".CODE\n;;BODY-START\nNOP\nMOV AX,, 1\n;;BODY-END\n");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 4);
    }
    CHECK_THROWS_AS(parse_program("NOP\n"), SyntaxError);
}

TEST_CASE("a label and an instruction on one line become two statements")
{
    auto parsed = parse_line("top: mov ax, 1 ; start");
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].is_label());
    CHECK(parsed[0].label_name() == "TOP");
    CHECK(normalize_statement(parsed[1]) == "MOV AX, 1");
}

TEST_CASE("normalize_statement examples")
{
    CHECK(normalize_statement(only_statement("  mov ax, 5 ; init")) == "MOV AX, 5");
    CHECK(normalize_statement(only_statement("NOP")) == "NOP");
    CHECK(normalize_statement(only_statement("Lbl_3:")) == "LBL_3:");
    CHECK(normalize_statement(only_statement("add   bx ,  0x10")) == "ADD BX, 0X10");
}

TEST_CASE("normalize_statement is idempotent")
{
    const std::vector<std::string> lines{"  mov ax, 5 ; init", "Lbl_3:", "jnz  Loop_1", "push 7", "OUT   dx ;x",
                                         "cmp Ax,bX", "hlt"};
    for (const auto& line : lines) {
        const auto once = normalize_statement(only_statement(line));
        CHECK(normalize_statement(only_statement(once)) == once);
    }
}

TEST_CASE("serialize round-trips corpus programs")
{
    for (const auto& name : mage::test::kCorpus) {
        CAPTURE(name);
        auto p = mage::test::corpus_program(name);
        auto text = serialize(p);
        auto q = parse_program(text);
        CHECK(q == p);
        CHECK(serialize(q) == text);
    }
}

TEST_CASE("serialize of an empty body is prologue, markers and epilogue")
{
    auto p = parse_program(".CODE\n;;BODY-START\n;;BODY-END\nEND\n");
    CHECK(p.body.empty());
    CHECK(serialize(p) == ".CODE\n;;BODY-START\n;;BODY-END\nEND\n");
}

TEST_CASE("serialize enforces the 64KB limit at the exact boundary")
{
    auto p = parse_program(";;BODY-START\n;;BODY-END\n");
    const auto base = serialized_size(p); // both marker lines
    // Each "    NOP" body line costs 8 bytes; a trailing comment pads to the exact size.
    const std::size_t budget = kMaxProgramBytes - base;
    const std::size_t nops = budget / 8 - 4;
    for (std::size_t i = 0; i < nops; ++i) {
        p.body.push_back(Statement::instruction("NOP"));
    }
    auto last = Statement::instruction("NOP");
    // "    NOP ; " is 10 bytes, plus the comment and the newline.
    last.comment = std::string(kMaxProgramBytes - serialized_size(p) - 11, 'x');
    p.body.push_back(last);
    CHECK(serialized_size(p) == kMaxProgramBytes);
    CHECK(serialize(p).size() == kMaxProgramBytes);
    CHECK(validate(p).valid());

    p.body.back().comment += "x";
    CHECK(serialized_size(p) == kMaxProgramBytes + 1);
    CHECK_THROWS_AS(serialize(p), SizeLimitExceeded);
}

TEST_CASE("validate examples")
{
    CHECK(validate(mage::test::corpus_program("gcd")).valid());

    auto p = program_of({"JMP L", "L:", "OUT AX"});
    p.body[0].operands = {"NOWHERE"};
    auto report = validate(p);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::UndefinedLabel);

    auto big = program_of({"NOP"});
    for (int i = 0; i < 70000 / 8; ++i) {
        big.body.push_back(Statement::instruction("NOP"));
    }
    REQUIRE(serialized_size(big) > 70000);
    report = validate(big);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::SizeLimitExceeded);
}

TEST_CASE("validate flags foreign mnemonics, bad operands and duplicate labels")
{
    auto p = program_of({"MOV AX, 1", "X:", "OUT AX"});
    p.body[0].mnemonic = "LEA";
    p.body.push_back(Statement::instruction("MOV", {"5", "AX"}));
    p.body.push_back(Statement::label("X"));
    auto report = validate(p);
    std::vector<ViolationKind> kinds;
    for (const auto& v : report.violations) {
        kinds.push_back(v.kind);
    }
    CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::ForeignMnemonic) == 1);
    CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::MalformedOperands) == 1);
    CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::DuplicateLabel) == 1);
}

TEST_CASE("validate rejects a synthetic label body that live code falls into")
{
    // JMP L0 forward, with L0's body placed where the preceding instruction falls through.
    auto p = program_of({"OUT AX", "HLT"});
    auto jump = Statement::instruction("JMP", {"L0"});
    jump.synthetic = true;
    auto label = Statement::label("L0");
    label.synthetic = true;
    auto ret = Statement::label("R0");
    ret.synthetic = true;
    auto back = Statement::instruction("JMP", {"R0"});
    back.synthetic = true;
    // Body: JMP L0; R0:; OUT AX; L0:; JMP R0; HLT   -> OUT AX falls into L0.
    p.body = {jump, ret, p.body[0], label, back, p.body[1]};
    p.refresh_labels();
    auto report = validate(p);
    REQUIRE_FALSE(report.valid());
    CHECK(report.violations[0].kind == ViolationKind::InterruptingLabelBody);
}

TEST_CASE("execute examples")
{
    auto state = execute(program_of({"MOV AX, 5", "OUT AX"}));
    CHECK(state.output == std::vector<std::int64_t>{5});
    CHECK(state.registers[AX] == 5);

    state = execute(program_of({"JMP L", "OUT AX", "L:"}));
    CHECK(state.output.empty());

    CHECK_THROWS_AS(execute(program_of({"L:", "JMP L"}), 100), StepBudgetExceeded);
}

TEST_CASE("execute semantics of flags, stack and halting")
{
    auto state = execute(program_of({"MOV CX, 3", "top:", "OUT CX", "DEC CX", "JNZ top", "PUSH 9", "POP DX",
                                     "CMP DX, 9", "HLT", "OUT DX"}));
    CHECK(state.output == std::vector<std::int64_t>{3, 2, 1});
    CHECK(state.registers[DX] == 9);
    CHECK(state.zero_flag);
    CHECK(state.stack.empty());
    CHECK_THROWS_AS(execute(program_of({"POP AX"})), StackUnderflow);
}

TEST_CASE("execute is deterministic")
{
    for (const auto& name : mage::test::kCorpus) {
        auto p = mage::test::corpus_program(name);
        CHECK(execute(p) == execute(p));
    }
}

TEST_CASE("equivalent examples")
{
    auto p = mage::test::corpus_program("fib");
    CHECK(equivalent(p, p));

    auto q = p;
    q.body.insert(q.body.begin() + 1, Statement::instruction("NOP"));
    q.refresh_labels();
    CHECK(equivalent(p, q));

    // Outputs [0] versus [1] when AX starts at zero.
    CHECK_FALSE(equivalent(program_of({"OUT AX"}), program_of({"MOV AX, 1", "OUT AX"})));
    CHECK_THROWS_AS(equivalent(program_of({"L:", "JMP L"}), p, 50), StepBudgetExceeded);
}

TEST_CASE("equivalent is an equivalence relation on random small programs")
{
    Rng rng(11);
    std::vector<Program> programs;
    for (int i = 0; i < 40; ++i) {
        programs.push_back(random_program(rng));
    }
    std::size_t related_pairs = 0;
    for (const auto& a : programs) {
        CHECK(equivalent(a, a));
        for (const auto& b : programs) {
            const bool ab = equivalent(a, b);
            CHECK(ab == equivalent(b, a));
            // Oracle: the definition applied to independently computed states.
            const auto sa = execute(a);
            const auto sb = execute(b);
            CHECK(ab == (sa.output == sb.output && sa.registers == sb.registers && sa.zero_flag == sb.zero_flag));
            related_pairs += ab ? 1 : 0;
            if (!ab) {
                continue;
            }
            for (const auto& c : programs) {
                if (equivalent(b, c)) {
                    CHECK(equivalent(a, c));
                }
            }
        }
    }
    CHECK(related_pairs > programs.size()); // the pool must produce non-trivial classes
}

TEST_CASE("parse_immediate and parse_register")
{
    CHECK(parse_immediate("42") == 42);
    CHECK(parse_immediate("-7") == -7);
    CHECK(parse_immediate("0x1F") == 31);
    CHECK_FALSE(parse_immediate("AX").has_value());
    CHECK(parse_register("bx") == BX);
    CHECK_FALSE(parse_register("EAX").has_value());
}

TEST_CASE("comments survive serialization but not normalization")
{
    auto p = parse_program(program_text({"MOV AX, 1 ; load", "; standalone note", "OUT AX"}));
    auto text = serialize(p);
    CHECK(text.find("load") != std::string::npos);
    CHECK(text.find("standalone note") != std::string::npos);
    CHECK(body_lines(p)[0] == "MOV AX, 1");
}
