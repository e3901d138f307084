#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mage {

inline constexpr std::size_t kMaxProgramBytes = 65536;
inline constexpr std::size_t kDefaultStepBudget = 100000;
inline constexpr std::string_view kBodyStart = ";;BODY-START";
inline constexpr std::string_view kBodyEnd = ";;BODY-END";

enum class StatementKind { Instruction, LabelDef, Directive, Comment };

struct Statement {
    StatementKind kind = StatementKind::Comment;
    std::string mnemonic;              // upper-cased; empty for labels and comments
    std::vector<std::string> operands; // upper-cased; a label definition holds its name here
    std::string comment;               // text after ';', trimmed
    std::string raw_text;
    std::optional<std::uint32_t> provenance; // seed body offset, absent for synthetic statements
    std::uint32_t home = 0;                  // seed offset used to split the body at a pivot
    bool synthetic = false;

    bool is_instruction() const { return kind == StatementKind::Instruction; }
    bool is_label() const { return kind == StatementKind::LabelDef; }
    const std::string& label_name() const { return operands.front(); }

    // Code equality: ignores raw text, provenance and placement metadata.
    bool same_code(const Statement& other) const
    {
        return kind == other.kind && mnemonic == other.mnemonic && operands == other.operands &&
               comment == other.comment;
    }

    static Statement instruction(std::string mnemonic, std::vector<std::string> operands = {});
    static Statement label(std::string name);
};

bool operator==(const Statement& a, const Statement& b);

struct Program {
    std::vector<Statement> prologue;
    std::vector<Statement> body;
    std::vector<Statement> epilogue;
    std::map<std::string, std::size_t> label_table;

    // Rebuilds label_table from body. Throws DuplicateLabel.
    void refresh_labels();
};

bool operator==(const Program& a, const Program& b);

bool is_jump(std::string_view mnemonic);
bool is_terminator(const Statement& s); // unconditional JMP or HLT
bool is_dialect_mnemonic(std::string_view mnemonic);

std::string to_upper(std::string_view s);

// Parses one body line into zero, one or two statements ("lbl: MOV AX, 1" yields two).
// Throws SyntaxError with the given line number.
std::vector<Statement> parse_line(std::string_view line, std::size_t line_number = 1);

// Throws SyntaxError, UndefinedLabel, DuplicateLabel.
Program parse_program(std::string_view text);

std::string normalize_statement(const Statement& s);

// Throws SizeLimitExceeded.
std::string serialize(const Program& p);
std::string serialize_unchecked(const Program& p);
std::size_t serialized_size(const Program& p);

enum class ViolationKind {
    UndefinedLabel,
    DuplicateLabel,
    SizeLimitExceeded,
    ForeignMnemonic,
    MalformedOperands,
    InterruptingLabelBody,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
    std::optional<std::size_t> body_index;
};

struct ValidityReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

ValidityReport validate(const Program& p);

enum Register : std::size_t { AX = 0, BX, CX, DX };

std::optional<Register> parse_register(std::string_view token);
std::optional<std::int64_t> parse_immediate(std::string_view token);

struct MachineState {
    std::array<std::int64_t, 4> registers{};
    bool zero_flag = false;
    std::vector<std::int64_t> stack;
    std::vector<std::int64_t> output;
    std::size_t steps = 0;

    bool operator==(const MachineState&) const = default;
};

// Runs the body from its first statement. Throws StepBudgetExceeded, StackUnderflow,
// InvalidProgram.
MachineState execute(const Program& p, std::size_t step_budget = kDefaultStepBudget,
                     const MachineState& initial = {});

// Same output trace, final registers and zero flag. Non-termination propagates as
// StepBudgetExceeded rather than reading as "not equivalent".
bool equivalent(const Program& p, const Program& q, std::size_t step_budget = kDefaultStepBudget,
                const MachineState& initial = {});

bool same_observable(const MachineState& a, const MachineState& b);

} // namespace mage
