#include "mage/asm_model.hpp"

#include "mage/errors.hpp"

namespace mage {

namespace {

enum class Op { Mov, Add, Sub, Cmp, Inc, Dec, Jmp, Jz, Jnz, Nop, Push, Pop, Out, Hlt, Skip };

struct Operand {
    bool is_register = false;
    Register reg = AX;
    std::int64_t value = 0;
};

struct Decoded {
    Op op = Op::Skip;
    Operand a;
    Operand b;
    std::size_t target = 0;
};

Operand decode_operand(const std::string& token)
{
    if (auto r = parse_register(token)) {
        return {true, *r, 0};
    }
    if (auto v = parse_immediate(token)) {
        return {false, AX, *v};
    }
    throw InvalidProgram("bad operand '" + token + "'");
}

Op decode_op(const std::string& m)
{
    static const std::map<std::string, Op, std::less<>> ops{
        {"MOV", Op::Mov}, {"ADD", Op::Add}, {"SUB", Op::Sub}, {"CMP", Op::Cmp}, {"INC", Op::Inc},
        {"DEC", Op::Dec}, {"JMP", Op::Jmp}, {"JZ", Op::Jz},   {"JNZ", Op::Jnz}, {"NOP", Op::Nop},
        {"PUSH", Op::Push}, {"POP", Op::Pop}, {"OUT", Op::Out}, {"HLT", Op::Hlt},
    };
    auto it = ops.find(m);
    if (it == ops.end()) {
        throw InvalidProgram("unknown mnemonic '" + m + "'");
    }
    return it->second;
}

std::vector<Decoded> decode(const Program& p)
{
    std::map<std::string, std::size_t> labels;
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        if (p.body[i].is_label()) {
            labels.emplace(p.body[i].label_name(), i);
        }
    }
    std::vector<Decoded> code(p.body.size());
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        const auto& s = p.body[i];
        if (!s.is_instruction()) {
            continue;
        }
        auto& d = code[i];
        d.op = decode_op(s.mnemonic);
        switch (d.op) {
        case Op::Jmp:
        case Op::Jz:
        case Op::Jnz: {
            auto it = s.operands.size() == 1 ? labels.find(s.operands[0]) : labels.end();
            if (it == labels.end()) {
                throw InvalidProgram("unresolved jump at body index " + std::to_string(i));
            }
            d.target = it->second;
            break;
        }
        case Op::Mov:
        case Op::Add:
        case Op::Sub:
        case Op::Cmp:
            if (s.operands.size() != 2) {
                throw InvalidProgram("expected two operands: " + normalize_statement(s));
            }
            d.a = decode_operand(s.operands[0]);
            d.b = decode_operand(s.operands[1]);
            if (!d.a.is_register) {
                throw InvalidProgram("destination must be a register: " + normalize_statement(s));
            }
            break;
        case Op::Inc:
        case Op::Dec:
        case Op::Pop:
        case Op::Push:
        case Op::Out:
            if (s.operands.size() != 1) {
                throw InvalidProgram("expected one operand: " + normalize_statement(s));
            }
            d.a = decode_operand(s.operands[0]);
            if (!d.a.is_register && d.op != Op::Push && d.op != Op::Out) {
                throw InvalidProgram("operand must be a register: " + normalize_statement(s));
            }
            break;
        case Op::Nop:
        case Op::Hlt:
        case Op::Skip:
            break;
        }
    }
    return code;
}

// Two's-complement wrap-around without signed overflow.
std::int64_t wrap_add(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

} // namespace

MachineState execute(const Program& p, std::size_t step_budget, const MachineState& initial)
{
    const auto code = decode(p);
    MachineState m = initial;
    m.steps = 0;
    auto read = [&m](const Operand& o) { return o.is_register ? m.registers[o.reg] : o.value; };

    std::size_t pc = 0;
    while (pc < code.size()) {
        const auto& d = code[pc];
        if (d.op == Op::Skip) {
            ++pc;
            continue;
        }
        if (m.steps == step_budget) {
            throw StepBudgetExceeded(step_budget);
        }
        ++m.steps;
        auto& dst = m.registers[d.a.reg];
        switch (d.op) {
        case Op::Mov:
            dst = read(d.b);
            break;
        case Op::Add:
            dst = wrap_add(dst, read(d.b));
            m.zero_flag = dst == 0;
            break;
        case Op::Sub:
            dst = wrap_sub(dst, read(d.b));
            m.zero_flag = dst == 0;
            break;
        case Op::Cmp:
            m.zero_flag = wrap_sub(dst, read(d.b)) == 0;
            break;
        case Op::Inc:
            dst = wrap_add(dst, 1);
            m.zero_flag = dst == 0;
            break;
        case Op::Dec:
            dst = wrap_sub(dst, 1);
            m.zero_flag = dst == 0;
            break;
        case Op::Jmp:
            pc = d.target;
            continue;
        case Op::Jz:
            if (m.zero_flag) {
                pc = d.target;
                continue;
            }
            break;
        case Op::Jnz:
            if (!m.zero_flag) {
                pc = d.target;
                continue;
            }
            break;
        case Op::Push:
            m.stack.push_back(read(d.a));
            break;
        case Op::Pop:
            if (m.stack.empty()) {
                throw StackUnderflow("POP on empty stack at body index " + std::to_string(pc));
            }
            dst = m.stack.back();
            m.stack.pop_back();
            break;
        case Op::Out:
            m.output.push_back(read(d.a));
            break;
        case Op::Hlt:
            return m;
        case Op::Nop:
        case Op::Skip:
            break;
        }
        ++pc;
    }
    return m;
}

bool same_observable(const MachineState& a, const MachineState& b)
{
    return a.output == b.output && a.registers == b.registers && a.zero_flag == b.zero_flag;
}

bool equivalent(const Program& p, const Program& q, std::size_t step_budget, const MachineState& initial)
{
    return same_observable(execute(p, step_budget, initial), execute(q, step_budget, initial));
}

} // namespace mage
