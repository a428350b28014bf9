#include "sra/core/printer.hpp"

#include <set>
#include <sstream>

namespace sra {

namespace {

enum Prec : int {
    kQuant = 0,
    kIff = 1,
    kImplies = 2,
    kOr = 3,
    kAnd = 4,
    kCmp = 5,
    kUnion = 6,
    kAdd = 7,
    kMul = 8,
    kUnary = 9,
    kPostfix = 10,
    kPrimary = 11,
};

int precedence(Op op)
{
    switch (op) {
    case Op::Forall:
    case Op::Exists:
    case Op::ScalarForall:
    case Op::Ite: return kQuant;
    case Op::Iff: return kIff;
    case Op::Implies: return kImplies;
    case Op::Or: return kOr;
    case Op::And: return kAnd;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::In:
    case Op::Subset:
    case Op::Disjoint: return kCmp;
    case Op::Union: return kUnion;
    case Op::Add:
    case Op::Sub: return kAdd;
    case Op::Mul: return kMul;
    case Op::Neg:
    case Op::Not: return kUnary;
    case Op::Field:
    case Op::TimerActive:
    case Op::TimerCount: return kPostfix;
    case Op::IntLit: return kUnary; // may carry a sign
    default: return kPrimary;
    }
}

const char* infix(Op op)
{
    switch (op) {
    case Op::Iff: return " <=> ";
    case Op::Implies: return " => ";
    case Op::Or: return " || ";
    case Op::And: return " && ";
    case Op::Eq: return " == ";
    case Op::Ne: return " != ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Gt: return " > ";
    case Op::Ge: return " >= ";
    case Op::In: return " in ";
    case Op::Subset: return " subset ";
    case Op::Disjoint: return " !! ";
    case Op::Union: return " union ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    default: return " ? ";
    }
}

class ExprPrinter {
public:
    std::string run(const ExprPtr& e)
    {
        emit(e, kQuant);
        return out_.str();
    }

private:
    std::ostringstream out_;
    std::multiset<std::string> bound_;

    void emit(const ExprPtr& e, int ctx)
    {
        if (!e) {
            out_ << "<null>";
            return;
        }
        if (e->op == Op::TimerFromInt) {
            emit(e->args[0], ctx);
            return;
        }
        int p = precedence(e->op);
        bool paren = p < ctx;
        if (paren)
            out_ << '(';
        body(*e, p);
        if (paren)
            out_ << ')';
    }

    void binder(const Expr& e, const char* kw)
    {
        out_ << kw << ' ' << e.name;
        if (e.op == Op::ScalarForall) {
            out_ << " : " << to_string(e.binder_type) << " . ";
            bound_.insert(e.name);
            emit(e.args[0], kQuant);
        } else {
            out_ << " in ";
            emit(e.args[0], kUnion);
            out_ << " : ";
            bound_.insert(e.name);
            emit(e.args[1], kQuant);
        }
        bound_.erase(bound_.find(e.name));
    }

    void body(const Expr& e, int p)
    {
        switch (e.op) {
        case Op::IntLit: out_ << e.value; return;
        case Op::BoolLit: out_ << (e.value ? "true" : "false"); return;
        case Op::EnumLit: out_ << e.name; return;
        case Op::NullLit: out_ << "null"; return;
        case Op::Inactive: out_ << "inactive"; return;
        case Op::Name:
        case Op::Var: out_ << e.name; return;
        case Op::AllAny: out_ << "All"; return;
        case Op::Self: out_ << "self"; return;
        case Op::AllSet: out_ << e.name; return;
        case Op::Phase: out_ << "phase"; return;
        case Op::Havoc: out_ << '*'; return;
        case Op::Field:
            if (e.args[0]->op != Op::Self || bound_.count(e.name)) {
                emit(e.args[0], kPostfix);
                out_ << '.';
            }
            out_ << e.name;
            return;
        case Op::TimerActive:
            emit(e.args[0], kPostfix);
            out_ << ".active";
            return;
        case Op::TimerCount:
            emit(e.args[0], kPostfix);
            out_ << ".count";
            return;
        case Op::Neg:
            out_ << '-';
            emit(e.args[0], kUnary);
            return;
        case Op::Not:
            out_ << '!';
            emit(e.args[0], e.args[0]->op == Op::Not ? kPrimary : kUnary); // `!!` lexes as disjointness
            return;
        case Op::Card:
            out_ << '|';
            emit(e.args[0], kQuant);
            out_ << '|';
            return;
        case Op::Old:
            out_ << "old(";
            emit(e.args[0], kQuant);
            out_ << ')';
            return;
        case Op::Ite:
            out_ << "if ";
            emit(e.args[0], kQuant);
            out_ << " then ";
            emit(e.args[1], kQuant);
            out_ << " else ";
            emit(e.args[2], kQuant);
            return;
        case Op::Forall: binder(e, "forall"); return;
        case Op::Exists: binder(e, "exists"); return;
        case Op::ScalarForall: binder(e, "forall"); return;
        case Op::And:
        case Op::Or:
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i)
                    out_ << infix(e.op);
                emit(e.args[i], p + 1);
            }
            return;
        case Op::Implies:
            emit(e.args[0], p + 1);
            out_ << infix(e.op);
            emit(e.args[1], p);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Union:
            emit(e.args[0], p);
            out_ << infix(e.op);
            emit(e.args[1], p + 1);
            return;
        default:
            emit(e.args[0], p + 1);
            out_ << infix(e.op);
            emit(e.args[1], p + 1);
            return;
        }
    }
};

void print_stmt(std::ostream& os, const StmtPtr& s)
{
    switch (s->kind) {
    case StmtKind::Skip: return;
    case StmtKind::Assign: os << s->target << " := " << print(s->value) << "; "; return;
    case StmtKind::Havoc: os << s->target << " := *; "; return;
    case StmtKind::If:
        os << "if " << print(s->cond) << " then { ";
        print_stmt(os, s->body[0]);
        os << "}";
        if (s->body[1]->kind != StmtKind::Skip) {
            os << " else { ";
            print_stmt(os, s->body[1]);
            os << "}";
        }
        os << ' ';
        return;
    case StmtKind::ForallAssign:
        os << "forall " << s->var << " in " << print(s->range) << " { " << s->var << '.' << s->target
           << " := " << print(s->value) << "; } ";
        return;
    case StmtKind::FieldAssign:
        os << print(s->object) << '.' << s->target << " := " << print(s->value) << "; ";
        return;
    case StmtKind::Assume: os << "assume " << print(s->cond) << "; "; return;
    case StmtKind::Assert: os << "assert " << print(s->cond) << "; "; return;
    case StmtKind::Seq:
        for (const auto& c : s->body)
            print_stmt(os, c);
        return;
    }
}

std::string field_type(const FieldDecl& f)
{
    switch (f.kind) {
    case FieldKind::Event: return "Event";
    case FieldKind::Timer: return "Timer";
    default: return to_string(f.type);
    }
}

} // namespace

std::string print(const ExprPtr& e)
{
    return ExprPrinter{}.run(e);
}

std::string print(const StmtPtr& s)
{
    std::ostringstream os;
    print_stmt(os, s);
    std::string r = os.str();
    while (!r.empty() && r.back() == ' ')
        r.pop_back();
    return r;
}

std::string print_model(const Model& m)
{
    std::ostringstream os;
    for (const auto& e : m.enums) {
        os << "enum " << e.name << " { ";
        for (std::size_t i = 0; i < e.values.size(); ++i)
            os << (i ? ", " : "") << e.values[i];
        os << " }\n";
    }
    for (const auto& c : m.classes) {
        os << "\nclass " << c.name << " {\n";
        for (const auto& f : c.fields) {
            os << "  ";
            switch (f.kind) {
            case FieldKind::Set:
                os << (f.ghost ? "ghost set " : "set ") << f.name << " : " << field_type(f);
                break;
            case FieldKind::Grounded:
                os << "grounded " << f.name << " : " << to_string(f.type) << " from "
                   << c.fields.at(static_cast<std::size_t>(f.source_set)).name;
                break;
            default:
                os << to_string(f.kind) << ' ' << f.name << " : " << field_type(f);
                if (f.init)
                    os << " = " << print(f.init);
                break;
            }
            os << '\n';
        }
        for (const auto& t : c.transitions) {
            std::string eff = print(t.effect);
            os << "  transition " << t.name << " = (" << t.from << ", " << print(t.guard) << ", " << t.to << ", { "
               << eff << (eff.empty() ? "}" : " }") << ", " << t.phase << ")\n";
        }
        os << "}\n";
    }
    const auto& s = m.scheduler;
    os << "\nscheduler {\n  phases ";
    for (std::size_t i = 0; i < s.phases.size(); ++i)
        os << (i ? ", " : "") << s.phases[i];
    os << ";\n";
    if (s.initial >= 0)
        os << "  initial " << s.phases[static_cast<std::size_t>(s.initial)] << ";\n";
    if (s.final_phase >= 0)
        os << "  final " << s.phases[static_cast<std::size_t>(s.final_phase)] << ";\n";
    for (const auto& t : s.transitions)
        os << "  trans " << t.from << " -> " << t.to << " when " << print(t.guard) << ";\n";
    os << "}\n";
    if (!m.constraints.empty()) {
        os << "\nconstraints {\n";
        for (const auto& c : m.constraints) {
            os << "  ";
            if (!c.label.empty())
                os << c.label << ": ";
            os << print(c.expr) << ";\n";
        }
        os << "}\n";
    }
    return os.str();
}

} // namespace sra
