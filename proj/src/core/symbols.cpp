#include "sra/core/symbols.hpp"

namespace sra {

namespace {

void collect(const ExprPtr& e, bool pre, std::set<Symbol>& out)
{
    if (!e)
        return;
    switch (e->op) {
    case Op::Old:
        collect(e->args[0], true, out);
        return;
    case Op::Field:
        if (e->field == kExecutedField)
            out.insert({SymbolKind::Executed, e->cls, kExecutedField, pre});
        else
            out.insert({SymbolKind::Field, e->cls, e->field, pre});
        break;
    case Op::AllSet: out.insert({SymbolKind::AllSet, e->cls, -1, pre}); break;
    case Op::Phase: out.insert({SymbolKind::Phase, -1, -1, pre}); break;
    default: break;
    }
    for (const auto& a : e->args)
        collect(a, pre, out);
}

} // namespace

std::set<Symbol> free_symbols(const ExprPtr& e)
{
    std::set<Symbol> out;
    collect(e, false, out);
    return out;
}

std::string to_string(const Model& m, const Symbol& s)
{
    std::string base;
    switch (s.kind) {
    case SymbolKind::Field:
    case SymbolKind::Executed: base = m.field_name({s.cls, s.field}); break;
    case SymbolKind::AllSet: base = "All_" + m.classes.at(static_cast<std::size_t>(s.cls)).name; break;
    case SymbolKind::Phase: base = "phase"; break;
    }
    return s.pre ? "old(" + base + ")" : base;
}

std::set<FieldRef> written_fields(const StmtPtr& effect)
{
    std::set<FieldRef> out;
    for_each_stmt(effect, [&](const Stmt& s) {
        switch (s.kind) {
        case StmtKind::Assign:
        case StmtKind::Havoc:
        case StmtKind::ForallAssign:
        case StmtKind::FieldAssign: out.insert({s.cls, s.field}); break;
        default: break;
        }
    });
    return out;
}

std::vector<int> guard_events(const Model& m, int cls, const ExprPtr& guard)
{
    std::vector<int> out;
    if (!guard)
        return out;
    const auto& c = m.classes.at(static_cast<std::size_t>(cls));
    auto visit = [&](const ExprPtr& g) {
        if (g->op == Op::Field && g->args[0]->op == Op::Self && g->cls == cls && g->field >= 0 &&
            c.fields[static_cast<std::size_t>(g->field)].kind == FieldKind::Event) {
            for (int f : out)
                if (f == g->field)
                    return;
            out.push_back(g->field);
        }
    };
    if (guard->op == Op::And)
        for (const auto& a : guard->args)
            visit(a);
    else
        visit(guard);
    return out;
}

std::set<FieldRef> write_footprint(const Model& m, int cls, int phase)
{
    std::set<FieldRef> out;
    const auto& c = m.classes.at(static_cast<std::size_t>(cls));
    for (const auto& t : c.transitions) {
        if (t.phase_index != phase)
            continue;
        out.insert({cls, c.location});
        for (int ev : t.events)
            out.insert({cls, ev});
        auto w = written_fields(t.effect);
        out.insert(w.begin(), w.end());
    }
    out.insert({cls, kExecutedField});
    return out;
}

} // namespace sra
