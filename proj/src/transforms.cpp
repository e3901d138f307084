#include "mage/transforms.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <set>

namespace mage {

std::string_view to_string(TransformTag tag)
{
    switch (tag) {
    case TransformTag::FI: return "FI";
    case TransformTag::FJ: return "FJ";
    case TransformTag::UB: return "UB";
    case TransformTag::CZJ: return "CZJ";
    case TransformTag::CNZJ: return "CNZJ";
    }
    return "?";
}

std::optional<TransformTag> parse_transform_tag(std::string_view name)
{
    auto upper = to_upper(name);
    for (auto tag : kAllTransforms) {
        if (to_string(tag) == upper) {
            return tag;
        }
    }
    return std::nullopt;
}

std::string LabelAllocator::next(const Program& p)
{
    std::string name;
    do {
        name = prefix_ + std::to_string(counter_++);
    } while (p.label_table.contains(name));
    return name;
}

namespace {

bool is_upper(std::uint32_t home, PivotPoint pivot) { return home < pivot.seed_offset; }

Statement synthetic(Statement s, std::uint32_t home)
{
    s.synthetic = true;
    s.provenance.reset();
    s.comment.clear();
    s.raw_text = normalize_statement(s);
    s.home = home;
    return s;
}

std::uint32_t home_before(const std::vector<Statement>& body, std::size_t pos)
{
    if (pos > 0) {
        return body[pos - 1].home;
    }
    return body.empty() ? 0 : body.front().home;
}

TransformResult finish(const Program& input, Program output)
{
    output.refresh_labels();
    if (serialized_size(output) > kMaxProgramBytes) {
        return {input, false, "size limit"};
    }
    return {std::move(output), true, {}};
}

std::vector<std::size_t> instruction_sites(const Program& p)
{
    std::vector<std::size_t> sites;
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        if (p.body[i].is_instruction()) {
            sites.push_back(i);
        }
    }
    return sites;
}

Statement random_dead_instruction(Rng& rng)
{
    static const std::array<const char*, 4> regs{"AX", "BX", "CX", "DX"};
    auto reg = [&] { return std::string(regs[rng.below(regs.size())]); };
    auto reg_or_imm = [&] { return rng.chance(0.5) ? reg() : std::to_string(rng.between(0, 99)); };
    switch (rng.below(10)) {
    case 0: return Statement::instruction("MOV", {reg(), reg_or_imm()});
    case 1: return Statement::instruction("ADD", {reg(), reg_or_imm()});
    case 2: return Statement::instruction("SUB", {reg(), reg_or_imm()});
    case 3: return Statement::instruction("CMP", {reg(), reg_or_imm()});
    case 4: return Statement::instruction("INC", {reg()});
    case 5: return Statement::instruction("DEC", {reg()});
    case 6: return Statement::instruction("PUSH", {reg_or_imm()});
    case 7: return Statement::instruction("POP", {reg()});
    case 8: return Statement::instruction("OUT", {reg_or_imm()});
    default: return Statement::instruction("NOP");
    }
}

// Moves control from the site into an out-of-line label body that ends with a jump back to
// `ret`. The body goes after the first unconditional terminator following the site, staying
// inside the site's crossover region; when no such terminator exists the body is wrapped in a
// jump-over at the region end.
void place_label_body(std::vector<Statement>& body, std::size_t search_from, std::uint32_t site_home,
                      std::optional<PivotPoint> pivot, std::vector<Statement> label_body, LabelAllocator& labels,
                      const Program& naming)
{
    std::size_t fence = body.size();
    if (pivot && is_upper(site_home, *pivot)) {
        for (std::size_t j = search_from; j < body.size(); ++j) {
            if (!is_upper(body[j].home, *pivot)) {
                fence = j;
                break;
            }
        }
    }
    for (std::size_t j = search_from; j < fence; ++j) {
        if (is_terminator(body[j])) {
            for (auto& s : label_body) {
                s.home = body[j].home;
            }
            body.insert(body.begin() + static_cast<std::ptrdiff_t>(j + 1), label_body.begin(), label_body.end());
            return;
        }
    }
    auto home = home_before(body, fence);
    auto skip = labels.next(naming);
    std::vector<Statement> block;
    block.push_back(synthetic(Statement::instruction("JMP", {skip}), home));
    for (auto& s : label_body) {
        s.home = home;
        block.push_back(std::move(s));
    }
    block.push_back(synthetic(Statement::label(skip), home));
    body.insert(body.begin() + static_cast<std::ptrdiff_t>(fence), block.begin(), block.end());
}

TransformResult jump_relocation(const Program& p, Rng& rng, LabelAllocator& labels, std::optional<PivotPoint> pivot,
                                std::string_view jump)
{
    auto sites = instruction_sites(p);
    if (sites.empty()) {
        throw NoEligibleSite("body has no instruction to relocate");
    }
    const auto i = sites[rng.below(sites.size())];
    const auto original = p.body[i];
    const auto home = original.home;
    const auto target = labels.next(p);
    const auto ret = labels.next(p);

    Program out = p;
    auto& body = out.body;
    std::vector<Statement> site;
    std::vector<Statement> label_body;
    site.push_back(synthetic(Statement::instruction(std::string(jump), {target}), home));
    label_body.push_back(synthetic(Statement::label(target), home));
    if (jump == "JMP") {
        // s1 moves out of line and keeps its provenance.
        auto moved = original;
        label_body.push_back(std::move(moved));
    } else {
        // Both flag outcomes run s1 once: inline on fall-through, a synthetic copy when taken.
        site.push_back(original);
        label_body.push_back(synthetic(original, home));
    }
    site.push_back(synthetic(Statement::label(ret), home));
    label_body.push_back(synthetic(Statement::instruction("JMP", {ret}), home));

    body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
    body.insert(body.begin() + static_cast<std::ptrdiff_t>(i), site.begin(), site.end());
    place_label_body(body, i + site.size(), home, pivot, std::move(label_body), labels, p);
    return finish(p, std::move(out));
}

} // namespace

TransformResult t_fake_instruction(const Program& p, Rng& rng)
{
    Program out = p;
    auto pos = rng.below(p.body.size() + 1);
    out.body.insert(out.body.begin() + static_cast<std::ptrdiff_t>(pos),
                    synthetic(Statement::instruction("NOP"), home_before(p.body, pos)));
    return finish(p, std::move(out));
}

TransformResult t_forced_jmp(const Program& p, Rng& rng, LabelAllocator& labels, std::optional<PivotPoint> pivot)
{
    return jump_relocation(p, rng, labels, pivot, "JMP");
}

TransformResult t_conditional_jmp(const Program& p, Rng& rng, LabelAllocator& labels, ZeroFlavor flavor,
                                  std::optional<PivotPoint> pivot)
{
    return jump_relocation(p, rng, labels, pivot, flavor == ZeroFlavor::Z ? "JZ" : "JNZ");
}

TransformResult t_untouchable_block(const Program& p, Rng& rng, LabelAllocator& labels)
{
    Program out = p;
    const auto pos = rng.below(p.body.size() + 1);
    const auto home = home_before(p.body, pos);
    const auto k = static_cast<std::size_t>(rng.between(1, 5));
    const auto target = labels.next(p);

    std::vector<Statement> block;
    block.push_back(synthetic(Statement::instruction("JMP", {target}), home));
    for (std::size_t n = 0; n < k; ++n) {
        block.push_back(synthetic(random_dead_instruction(rng), home));
    }
    block.push_back(synthetic(Statement::label(target), home));
    out.body.insert(out.body.begin() + static_cast<std::ptrdiff_t>(pos), block.begin(), block.end());
    return finish(p, std::move(out));
}

TransformResult apply_transform(TransformTag tag, const Program& p, Rng& rng, LabelAllocator& labels,
                                std::optional<PivotPoint> pivot)
{
    switch (tag) {
    case TransformTag::FI: return t_fake_instruction(p, rng);
    case TransformTag::FJ: return t_forced_jmp(p, rng, labels, pivot);
    case TransformTag::UB: return t_untouchable_block(p, rng, labels);
    case TransformTag::CZJ: return t_conditional_jmp(p, rng, labels, ZeroFlavor::Z, pivot);
    case TransformTag::CNZJ: return t_conditional_jmp(p, rng, labels, ZeroFlavor::NZ, pivot);
    }
    return {p, false, "unknown transform"};
}

namespace {

struct Split {
    std::size_t index = 0; // first statement of the lower region
    bool ok = false;
};

Split split_at(const Program& p, PivotPoint pivot)
{
    Split split;
    const auto& body = p.body;
    auto first_lower = std::find_if(body.begin(), body.end(), [&](const Statement& s) { return !is_upper(s.home, pivot); });
    split.index = static_cast<std::size_t>(first_lower - body.begin());
    if (std::any_of(first_lower, body.end(), [&](const Statement& s) { return is_upper(s.home, pivot); })) {
        return split;
    }
    std::map<std::string, bool> label_upper;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i].is_label()) {
            label_upper[body[i].label_name()] = i < split.index;
        }
    }
    for (std::size_t i = 0; i < body.size(); ++i) {
        const auto& s = body[i];
        if (s.is_instruction() && is_jump(s.mnemonic) && s.operands.size() == 1) {
            auto it = label_upper.find(s.operands.front());
            if (it == label_upper.end() || it->second != (i < split.index)) {
                return split;
            }
        }
    }
    split.ok = true;
    return split;
}

std::multiset<std::uint32_t> provenance_ids(const Program& p)
{
    std::multiset<std::uint32_t> ids;
    for (const auto& s : p.body) {
        if (s.provenance) {
            ids.insert(*s.provenance);
        }
    }
    return ids;
}

Program splice(const Program& upper_from, std::size_t upper_end, const Program& lower_from, std::size_t lower_begin)
{
    Program child;
    child.prologue = upper_from.prologue;
    child.epilogue = upper_from.epilogue;
    child.body.assign(upper_from.body.begin(), upper_from.body.begin() + static_cast<std::ptrdiff_t>(upper_end));
    child.body.insert(child.body.end(), lower_from.body.begin() + static_cast<std::ptrdiff_t>(lower_begin),
                      lower_from.body.end());
    child.refresh_labels();
    return child;
}

} // namespace

bool jump_crosses(const Program& p, PivotPoint pivot) { return !split_at(p, pivot).ok; }

std::optional<PivotPoint> default_pivot(const Program& seed)
{
    const auto n = static_cast<std::uint32_t>(seed.body.size());
    if (n < 2) {
        return std::nullopt;
    }
    const std::uint32_t middle = n / 2;
    for (std::uint32_t delta = 0; delta < n; ++delta) {
        for (std::uint32_t candidate : {middle + delta, middle - delta}) {
            if (candidate > 0 && candidate < n && !jump_crosses(seed, PivotPoint{candidate})) {
                return PivotPoint{candidate};
            }
        }
    }
    return std::nullopt;
}

CrossoverResult crossover_cbi(const Program& p, const Program& q, PivotPoint pivot)
{
    if (provenance_ids(p) != provenance_ids(q)) {
        throw IncompatibleParents("parents do not share seed provenance");
    }
    auto sp = split_at(p, pivot);
    auto sq = split_at(q, pivot);
    if (!sp.ok || !sq.ok) {
        return {p, q, false, "pivot splits a block"};
    }
    return {splice(p, sp.index, q, sq.index), splice(q, sq.index, p, sp.index), true, {}};
}

} // namespace mage
