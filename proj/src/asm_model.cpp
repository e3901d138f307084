#include "mage/asm_model.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace mage {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(std::string_view s)
{
    return !s.empty() && is_ident_start(s.front()) && std::all_of(s.begin(), s.end(), is_ident_char);
}

bool is_operand_token(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return is_ident_char(c) || c == '-' || c == '+'; });
}

bool is_mnemonic_token(std::string_view s)
{
    if (s.empty() || !(is_ident_start(s.front()) || s.front() == '.')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) { return is_ident_char(c) || c == '.'; });
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
    return lines;
}

bool is_marker(std::string_view line, std::string_view marker) { return to_upper(trim(line)) == marker; }

Statement raw_statement(std::string_view line)
{
    Statement s;
    auto t = trim(line);
    s.kind = (t.empty() || t.front() == ';') ? StatementKind::Comment : StatementKind::Directive;
    s.raw_text = std::string(line);
    return s;
}

std::string render(const Statement& s)
{
    std::string line;
    switch (s.kind) {
    case StatementKind::LabelDef:
        line = normalize_statement(s);
        break;
    case StatementKind::Instruction:
    case StatementKind::Directive:
        line = "    " + normalize_statement(s);
        break;
    case StatementKind::Comment:
        line = "    ;";
        if (!s.comment.empty()) {
            line += " " + s.comment;
        }
        return line;
    }
    if (!s.comment.empty()) {
        line += " ; " + s.comment;
    }
    return line;
}

enum class OperandShape { Reg, RegOrImm, Label };

const std::map<std::string, std::vector<OperandShape>, std::less<>>& dialect()
{
    using enum OperandShape;
    static const std::map<std::string, std::vector<OperandShape>, std::less<>> table{
        {"MOV", {Reg, RegOrImm}}, {"ADD", {Reg, RegOrImm}}, {"SUB", {Reg, RegOrImm}},
        {"CMP", {Reg, RegOrImm}}, {"INC", {Reg}},           {"DEC", {Reg}},
        {"JMP", {Label}},         {"JZ", {Label}},          {"JNZ", {Label}},
        {"NOP", {}},              {"PUSH", {RegOrImm}},     {"POP", {Reg}},
        {"OUT", {RegOrImm}},      {"HLT", {}},
    };
    return table;
}

bool operand_fits(std::string_view operand, OperandShape shape)
{
    switch (shape) {
    case OperandShape::Reg:
        return parse_register(operand).has_value();
    case OperandShape::RegOrImm:
        return parse_register(operand).has_value() || parse_immediate(operand).has_value();
    case OperandShape::Label:
        return is_identifier(operand) && !parse_register(operand).has_value();
    }
    return false;
}

} // namespace

std::string to_upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

Statement Statement::instruction(std::string mnemonic, std::vector<std::string> operands)
{
    Statement s;
    s.kind = StatementKind::Instruction;
    s.mnemonic = std::move(mnemonic);
    s.operands = std::move(operands);
    s.raw_text = normalize_statement(s);
    return s;
}

Statement Statement::label(std::string name)
{
    Statement s;
    s.kind = StatementKind::LabelDef;
    s.operands = {std::move(name)};
    s.raw_text = normalize_statement(s);
    return s;
}

bool operator==(const Statement& a, const Statement& b)
{
    return a.same_code(b) && a.provenance == b.provenance && a.home == b.home && a.synthetic == b.synthetic;
}

bool operator==(const Program& a, const Program& b)
{
    auto raw_equal = [](const std::vector<Statement>& x, const std::vector<Statement>& y) {
        return std::equal(x.begin(), x.end(), y.begin(), y.end(),
                          [](const Statement& s, const Statement& t) { return s.raw_text == t.raw_text; });
    };
    return raw_equal(a.prologue, b.prologue) && a.body == b.body && raw_equal(a.epilogue, b.epilogue) &&
           a.label_table == b.label_table;
}

void Program::refresh_labels()
{
    label_table.clear();
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i].is_label() && !label_table.emplace(body[i].label_name(), i).second) {
            throw DuplicateLabel(body[i].label_name());
        }
    }
}

bool is_jump(std::string_view mnemonic) { return mnemonic == "JMP" || mnemonic == "JZ" || mnemonic == "JNZ"; }

bool is_terminator(const Statement& s)
{
    return s.is_instruction() && (s.mnemonic == "JMP" || s.mnemonic == "HLT");
}

bool is_dialect_mnemonic(std::string_view mnemonic) { return dialect().contains(mnemonic); }

std::optional<Register> parse_register(std::string_view token)
{
    auto t = to_upper(token);
    if (t == "AX") return AX;
    if (t == "BX") return BX;
    if (t == "CX") return CX;
    if (t == "DX") return DX;
    return std::nullopt;
}

std::optional<std::int64_t> parse_immediate(std::string_view token)
{
    bool negative = false;
    if (!token.empty() && (token.front() == '-' || token.front() == '+')) {
        negative = token.front() == '-';
        token.remove_prefix(1);
    }
    int base = 10;
    if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
        base = 16;
        token.remove_prefix(2);
    }
    if (token.empty()) {
        return std::nullopt;
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, base);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return negative ? -value : value;
}

std::vector<Statement> parse_line(std::string_view line, std::size_t line_number)
{
    std::vector<Statement> out;
    auto code = line;
    std::string comment;
    bool has_comment = false;
    if (auto semi = line.find(';'); semi != std::string_view::npos) {
        code = line.substr(0, semi);
        comment = std::string(trim(line.substr(semi + 1)));
        has_comment = true;
    }
    code = trim(code);
    if (code.empty()) {
        if (has_comment) {
            Statement s;
            s.kind = StatementKind::Comment;
            s.comment = std::move(comment);
            s.raw_text = std::string(line);
            out.push_back(std::move(s));
        }
        return out;
    }

    std::size_t ident_end = 0;
    while (ident_end < code.size() && is_ident_char(code[ident_end])) {
        ++ident_end;
    }
    std::size_t colon = ident_end;
    while (colon < code.size() && std::isspace(static_cast<unsigned char>(code[colon]))) {
        ++colon;
    }
    if (ident_end > 0 && is_ident_start(code.front()) && colon < code.size() && code[colon] == ':') {
        Statement label;
        label.kind = StatementKind::LabelDef;
        label.operands = {to_upper(code.substr(0, ident_end))};
        label.raw_text = std::string(line);
        out.push_back(std::move(label));
        code = trim(code.substr(colon + 1));
        if (code.empty()) {
            out.back().comment = std::move(comment);
            return out;
        }
    }

    auto space = std::find_if(code.begin(), code.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    auto mnemonic = code.substr(0, static_cast<std::size_t>(space - code.begin()));
    if (!is_mnemonic_token(mnemonic)) {
        throw SyntaxError(line_number, "bad mnemonic '" + std::string(mnemonic) + "'");
    }
    Statement s;
    s.kind = mnemonic.front() == '.' ? StatementKind::Directive : StatementKind::Instruction;
    s.mnemonic = to_upper(mnemonic);
    s.comment = std::move(comment);
    s.raw_text = std::string(line);

    auto rest = trim(code.substr(mnemonic.size()));
    if (!rest.empty()) {
        while (true) {
            auto comma = rest.find(',');
            auto operand = trim(rest.substr(0, comma));
            if (!is_operand_token(operand)) {
                throw SyntaxError(line_number, "bad operand '" + std::string(operand) + "'");
            }
            s.operands.push_back(to_upper(operand));
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
    }
    out.push_back(std::move(s));
    return out;
}

Program parse_program(std::string_view text)
{
    auto lines = split_lines(text);
    auto start = std::find_if(lines.begin(), lines.end(), [](auto l) { return is_marker(l, kBodyStart); });
    if (start == lines.end()) {
        throw SyntaxError(1, "missing " + std::string(kBodyStart) + " directive");
    }
    auto end = std::find_if(start + 1, lines.end(), [](auto l) { return is_marker(l, kBodyEnd); });
    if (end == lines.end()) {
        throw SyntaxError(lines.size(), "missing " + std::string(kBodyEnd) + " directive");
    }

    Program p;
    for (auto it = lines.begin(); it != start + 1; ++it) {
        p.prologue.push_back(raw_statement(*it));
    }
    for (auto it = start + 1; it != end; ++it) {
        auto line_number = static_cast<std::size_t>(it - lines.begin()) + 1;
        for (auto& s : parse_line(*it, line_number)) {
            auto id = static_cast<std::uint32_t>(p.body.size());
            s.provenance = id;
            s.home = id;
            p.body.push_back(std::move(s));
        }
    }
    for (auto it = end; it != lines.end(); ++it) {
        p.epilogue.push_back(raw_statement(*it));
    }

    p.refresh_labels();
    for (const auto& s : p.body) {
        if (s.is_instruction() && is_jump(s.mnemonic) && s.operands.size() == 1 &&
            !p.label_table.contains(s.operands.front())) {
            throw UndefinedLabel(s.operands.front());
        }
    }
    return p;
}

std::string normalize_statement(const Statement& s)
{
    switch (s.kind) {
    case StatementKind::LabelDef:
        return s.label_name() + ":";
    case StatementKind::Comment:
        return {};
    case StatementKind::Instruction:
    case StatementKind::Directive:
        break;
    }
    std::string out = s.mnemonic;
    for (std::size_t i = 0; i < s.operands.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += s.operands[i];
    }
    return out;
}

std::string serialize_unchecked(const Program& p)
{
    std::string out;
    for (const auto& s : p.prologue) {
        out += s.raw_text;
        out += '\n';
    }
    for (const auto& s : p.body) {
        out += render(s);
        out += '\n';
    }
    for (const auto& s : p.epilogue) {
        out += s.raw_text;
        out += '\n';
    }
    return out;
}

std::string serialize(const Program& p)
{
    auto out = serialize_unchecked(p);
    if (out.size() > kMaxProgramBytes) {
        throw SizeLimitExceeded(out.size());
    }
    return out;
}

std::size_t serialized_size(const Program& p)
{
    std::size_t n = 0;
    for (const auto& s : p.prologue) n += s.raw_text.size() + 1;
    for (const auto& s : p.body) n += render(s).size() + 1;
    for (const auto& s : p.epilogue) n += s.raw_text.size() + 1;
    return n;
}

std::string_view to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::UndefinedLabel: return "UndefinedLabel";
    case ViolationKind::DuplicateLabel: return "DuplicateLabel";
    case ViolationKind::SizeLimitExceeded: return "SizeLimitExceeded";
    case ViolationKind::ForeignMnemonic: return "ForeignMnemonic";
    case ViolationKind::MalformedOperands: return "MalformedOperands";
    case ViolationKind::InterruptingLabelBody: return "InterruptingLabelBody";
    }
    return "Unknown";
}

namespace {

// Statements reachable from the body entry, following fall-through and jump edges.
std::vector<bool> reachable_statements(const Program& p, const std::map<std::string, std::size_t>& labels)
{
    std::vector<bool> seen(p.body.size(), false);
    std::vector<std::size_t> work;
    if (!p.body.empty()) {
        work.push_back(0);
    }
    auto push = [&](std::size_t i) {
        if (i < p.body.size() && !seen[i]) {
            work.push_back(i);
        }
    };
    while (!work.empty()) {
        auto i = work.back();
        work.pop_back();
        if (seen[i]) {
            continue;
        }
        seen[i] = true;
        const auto& s = p.body[i];
        if (s.is_instruction() && is_jump(s.mnemonic) && s.operands.size() == 1) {
            if (auto it = labels.find(s.operands.front()); it != labels.end()) {
                push(it->second);
            }
            if (s.mnemonic != "JMP") {
                push(i + 1);
            }
        } else if (!(s.is_instruction() && s.mnemonic == "HLT")) {
            push(i + 1);
        }
    }
    return seen;
}

} // namespace

ValidityReport validate(const Program& p)
{
    ValidityReport report;
    auto add = [&](ViolationKind kind, std::string detail, std::optional<std::size_t> index = std::nullopt) {
        report.violations.push_back({kind, std::move(detail), index});
    };

    std::map<std::string, std::size_t> labels;
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        if (p.body[i].is_label() && !labels.emplace(p.body[i].label_name(), i).second) {
            add(ViolationKind::DuplicateLabel, p.body[i].label_name(), i);
        }
    }

    const auto& table = dialect();
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        const auto& s = p.body[i];
        if (!s.is_instruction()) {
            continue;
        }
        auto entry = table.find(s.mnemonic);
        if (entry == table.end()) {
            add(ViolationKind::ForeignMnemonic, s.mnemonic, i);
            continue;
        }
        const auto& shapes = entry->second;
        bool fits = shapes.size() == s.operands.size();
        for (std::size_t k = 0; fits && k < shapes.size(); ++k) {
            fits = operand_fits(s.operands[k], shapes[k]);
        }
        if (!fits) {
            add(ViolationKind::MalformedOperands, normalize_statement(s), i);
            continue;
        }
        if (is_jump(s.mnemonic) && !labels.contains(s.operands.front())) {
            add(ViolationKind::UndefinedLabel, s.operands.front(), i);
        }
    }

    // A synthetic label reached only through forward jumps is an out-of-line body; live code
    // must never fall into it.
    auto reachable = reachable_statements(p, labels);
    std::map<std::string, std::size_t> last_reference;
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        const auto& s = p.body[i];
        if (s.is_instruction() && is_jump(s.mnemonic) && s.operands.size() == 1) {
            last_reference[s.operands.front()] = i;
        }
    }
    for (std::size_t i = 1; i < p.body.size(); ++i) {
        const auto& s = p.body[i];
        if (!s.is_label() || !s.synthetic) {
            continue;
        }
        auto ref = last_reference.find(s.label_name());
        if (ref == last_reference.end() || ref->second > i) {
            continue;
        }
        const auto& prev = p.body[i - 1];
        if (reachable[i - 1] && !is_terminator(prev)) {
            add(ViolationKind::InterruptingLabelBody, s.label_name(), i);
        }
    }

    if (auto size = serialized_size(p); size > kMaxProgramBytes) {
        add(ViolationKind::SizeLimitExceeded, std::to_string(size) + " bytes");
    }
    return report;
}

} // namespace mage
