#include "sra/vc/vcgen.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace sra {

namespace {

const ClassDecl& class_of(const Model& m, int cls)
{
    return m.classes.at(static_cast<std::size_t>(cls));
}

std::string sort_of(const Type& t)
{
    switch (t.kind) {
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Timer: return "TimerVal";
    case TypeKind::Enum: return t.name == kPhaseEnum ? "SchedPhase" : t.name;
    case TypeKind::Object: return t.name;
    default: throw VcError("type " + to_string(t) + " has no SMT sort");
    }
}

std::string int_term(std::int64_t v)
{
    return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v);
}

std::string state_prefix(bool pre)
{
    return pre ? "pre." : "post.";
}

class Encoder {
public:
    Encoder(const Model& m, const SmtOptions& o) : m_(m), o_(o) {}

    std::string term(const ExprPtr& e, bool pre)
    {
        switch (e->op) {
        case Op::IntLit: return int_term(e->value);
        case Op::BoolLit: return e->value ? "true" : "false";
        case Op::EnumLit:
            return (e->type.name == kPhaseEnum ? std::string("Phase") : e->type.name) + "." + e->name;
        case Op::NullLit: return "null." + e->type.name;
        case Op::Inactive: return "timer.inactive";
        case Op::Var: return lookup(e->name);
        case Op::Phase: return state_prefix(pre) + "phase";
        case Op::Field: return field(e, pre);
        case Op::Neg: return "(- " + term(e->args[0], pre) + ")";
        case Op::Add: return bin("+", e, pre);
        case Op::Sub: return bin("-", e, pre);
        case Op::Mul: return bin("*", e, pre);
        case Op::Ite:
            if (e->type.is(TypeKind::Set))
                throw VcError("set-valued conditional outside a membership test");
            return "(ite " + term(e->args[0], pre) + " " + term(e->args[1], pre) + " " + term(e->args[2], pre) + ")";
        case Op::Not: return "(not " + term(e->args[0], pre) + ")";
        case Op::And: return nary("and", e, pre);
        case Op::Or: return nary("or", e, pre);
        case Op::Implies: return bin("=>", e, pre);
        case Op::Iff: return bin("=", e, pre);
        case Op::Eq:
        case Op::Ne: {
            std::string t;
            if (auto c = cardinality(e, pre))
                return *c;
            if (e->args[0]->type.is(TypeKind::Set))
                t = set_equal(e->args[0], e->args[1], pre);
            else
                t = bin("=", e, pre);
            return e->op == Op::Eq ? t : "(not " + t + ")";
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: {
            if (auto c = cardinality(e, pre))
                return *c;
            static const std::map<Op, std::string> ops{{Op::Lt, "<"}, {Op::Le, "<="}, {Op::Gt, ">"}, {Op::Ge, ">="}};
            return bin(ops.at(e->op), e, pre);
        }
        case Op::In: return member(term(e->args[0], pre), e->args[1], pre);
        case Op::Subset: {
            std::string x = bind_fresh("e");
            std::string body = "(=> " + member(x, e->args[0], pre) + " " + member(x, e->args[1], pre) + ")";
            return "(forall ((" + x + " " + e->args[0]->type.name + ")) " + body + ")";
        }
        case Op::Disjoint: {
            std::string x = bind_fresh("e");
            std::string body =
                "(not (and " + member(x, e->args[0], pre) + " " + member(x, e->args[1], pre) + "))";
            return "(forall ((" + x + " " + e->args[0]->type.name + ")) " + body + ")";
        }
        case Op::Forall:
        case Op::Exists: {
            const ExprPtr& range = e->args[0];
            std::string x = push(e->name);
            std::string guard = member(x, range, pre);
            std::string body = term(e->args[1], pre);
            pop(e->name);
            std::string decl = "((" + x + " " + sort_of(e->binder_type) + "))";
            if (e->op == Op::Forall)
                return "(forall " + decl + " (=> " + guard + " " + body + "))";
            return "(exists " + decl + " (and " + guard + " " + body + "))";
        }
        case Op::ScalarForall: {
            std::string x = push(e->name);
            std::string body = term(e->args[0], pre);
            pop(e->name);
            return "(forall ((" + x + " " + sort_of(e->binder_type) + ")) " + body + ")";
        }
        case Op::Old: return term(e->args[0], true);
        case Op::TimerFromInt: {
            std::string v = term(e->args[0], pre);
            return "(ite (>= " + v + " 1) (timer.active " + v + ") timer.inactive)";
        }
        case Op::TimerActive: return "((_ is timer.active) " + term(e->args[0], pre) + ")";
        case Op::TimerCount: {
            std::string t = term(e->args[0], pre);
            return "(ite ((_ is timer.active) " + t + ") (timer.count " + t + ") 0)";
        }
        case Op::Self: throw VcError("formula mentions self; instantiate it first");
        case Op::Havoc: throw VcError("havoc marker in a verification formula");
        case Op::Card: throw VcError("cardinality is only supported in comparisons with a constant");
        case Op::Union:
        case Op::AllSet: throw VcError("set expression outside a membership test");
        case Op::Name:
        case Op::AllAny: throw VcError("unresolved expression");
        }
        throw VcError("unsupported expression");
    }

    // Membership of the object term `obj` in set expression `s`.
    std::string member(const std::string& obj, const ExprPtr& s, bool pre)
    {
        switch (s->op) {
        case Op::AllSet: return "(All_" + class_of(m_, s->cls).name + " " + obj + ")";
        case Op::Field:
            return "(" + class_of(m_, s->cls).name + "." + s->name + " " + term(s->args[0], pre) + " " + obj + ")";
        case Op::Union: return "(or " + member(obj, s->args[0], pre) + " " + member(obj, s->args[1], pre) + ")";
        case Op::Ite:
            return "(ite " + term(s->args[0], pre) + " " + member(obj, s->args[1], pre) + " " +
                   member(obj, s->args[2], pre) + ")";
        case Op::Old: return member(obj, s->args[0], true);
        default: throw VcError("unsupported set expression");
        }
    }

private:
    const Model& m_;
    SmtOptions o_;
    int counter_ = 0;
    std::map<std::string, std::vector<std::string>> scope_;

    std::string push(const std::string& name)
    {
        std::string s = name + "!" + std::to_string(counter_++);
        scope_[name].push_back(s);
        return s;
    }
    void pop(const std::string& name) { scope_[name].pop_back(); }

    std::string bind_fresh(const std::string& base) { return base + "!" + std::to_string(counter_++); }

    std::string lookup(const std::string& name) const
    {
        auto it = scope_.find(name);
        if (it == scope_.end() || it->second.empty())
            throw VcError("free variable '" + name + "' in a verification formula");
        return it->second.back();
    }

    std::string field(const ExprPtr& e, bool pre)
    {
        const auto& c = class_of(m_, e->cls);
        std::string obj = term(e->args[0], pre);
        if (e->field == kExecutedField)
            return "(" + state_prefix(pre) + c.name + ".executed " + obj + ")";
        const auto& fd = c.fields.at(static_cast<std::size_t>(e->field));
        if (fd.kind == FieldKind::Set)
            throw VcError("set field '" + fd.name + "' outside a membership test");
        if (fd.is_mutable())
            return "(" + state_prefix(pre) + c.name + "." + fd.name + " " + obj + ")";
        return "(" + c.name + "." + fd.name + " " + obj + ")";
    }

    std::string bin(const std::string& op, const ExprPtr& e, bool pre)
    {
        return "(" + op + " " + term(e->args[0], pre) + " " + term(e->args[1], pre) + ")";
    }

    std::string nary(const std::string& op, const ExprPtr& e, bool pre)
    {
        std::string out = "(" + op;
        for (const auto& a : e->args)
            out += " " + term(a, pre);
        return out + ")";
    }

    std::string set_equal(const ExprPtr& a, const ExprPtr& b, bool pre)
    {
        std::string x = bind_fresh("e");
        return "(forall ((" + x + " " + a->type.name + ")) (= " + member(x, a, pre) + " " + member(x, b, pre) + "))";
    }

    // At least k distinct members of s.
    std::string at_least(const ExprPtr& s, std::int64_t k, bool pre)
    {
        if (k <= 0)
            return "true";
        std::vector<std::string> ws;
        std::string decl;
        for (std::int64_t i = 0; i < k; ++i) {
            ws.push_back(bind_fresh("w"));
            decl += "(" + ws.back() + " " + s->type.name + ")";
        }
        std::string body = "(and";
        if (k > 1) {
            body += " (distinct";
            for (const auto& w : ws)
                body += " " + w;
            body += ")";
        }
        for (const auto& w : ws)
            body += " " + member(w, s, pre);
        body += ")";
        return "(exists (" + decl + ") " + body + ")";
    }

    // |s| op n with n a literal, either side; nullopt when no cardinality is involved.
    std::optional<std::string> cardinality(const ExprPtr& e, bool pre)
    {
        const ExprPtr& a = e->args[0];
        const ExprPtr& b = e->args[1];
        Op op = e->op;
        ExprPtr s;
        std::int64_t n = 0;
        if (a->op == Op::Card) {
            if (b->op != Op::IntLit)
                throw VcError("cardinality must be compared with an integer literal");
            s = a->args[0];
            n = b->value;
        } else if (b->op == Op::Card) {
            if (a->op != Op::IntLit)
                throw VcError("cardinality must be compared with an integer literal");
            s = b->args[0];
            n = a->value;
            static const std::map<Op, Op> flip{{Op::Lt, Op::Gt}, {Op::Le, Op::Ge}, {Op::Gt, Op::Lt},
                                               {Op::Ge, Op::Le}, {Op::Eq, Op::Eq}, {Op::Ne, Op::Ne}};
            op = flip.at(op);
        } else {
            return std::nullopt;
        }
        if (n > o_.card_bound)
            throw VcError("cardinality bound " + std::to_string(n) + " exceeds the configured limit " +
                          std::to_string(o_.card_bound));
        auto ge = [&](std::int64_t k) { return at_least(s, k, pre); };
        auto neg = [](const std::string& t) { return t == "true" ? std::string("false") : "(not " + t + ")"; };
        switch (op) {
        case Op::Ge: return ge(n);
        case Op::Gt: return ge(n + 1);
        case Op::Le: return n < 0 ? std::string("false") : neg(ge(n + 1));
        case Op::Lt: return n <= 0 ? std::string("false") : neg(ge(n));
        case Op::Eq: return n < 0 ? std::string("false") : "(and " + ge(n) + " " + neg(ge(n + 1)) + ")";
        case Op::Ne: return n < 0 ? std::string("true") : "(not (and " + ge(n) + " " + neg(ge(n + 1)) + "))";
        default: throw VcError("unsupported cardinality comparison");
        }
    }
};

void declare_enum(std::ostringstream& out, const std::string& sort, const std::string& prefix,
                  const std::vector<std::string>& values)
{
    out << "(declare-datatype " << sort << " (";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << (i ? " " : "") << "(" << prefix << "." << values[i] << ")";
    out << "))\n";
}

} // namespace

std::string encode_formula(const Model& m, const ExprPtr& f, const SmtOptions& opts)
{
    Encoder enc(m, opts);
    return enc.term(f, false);
}

std::string encode_model(const Model& m, const SmtOptions& opts)
{
    std::ostringstream out;
    out << "(set-logic ALL)\n(set-option :produce-models true)\n";
    for (const auto& e : m.enums)
        declare_enum(out, e.name, e.name, e.values);
    declare_enum(out, "SchedPhase", "Phase", m.scheduler.phases);
    out << "(declare-datatype TimerVal ((timer.inactive) (timer.active (timer.count Int))))\n";
    for (const auto& c : m.classes) {
        out << "(declare-sort " << c.name << " 0)\n";
        out << "(declare-fun All_" << c.name << " (" << c.name << ") Bool)\n";
        out << "(declare-const null." << c.name << " " << c.name << ")\n";
        out << "(assert (not (All_" << c.name << " null." << c.name << ")))\n";
    }
    out << "(declare-const pre.phase SchedPhase)\n(declare-const post.phase SchedPhase)\n";
    for (const auto& c : m.classes) {
        for (const char* s : {"pre.", "post."})
            out << "(declare-fun " << s << c.name << ".executed (" << c.name << ") Bool)\n";
        for (const auto& f : c.fields) {
            if (f.kind == FieldKind::Set) {
                out << "(declare-fun " << c.name << "." << f.name << " (" << c.name << " " << f.type.name
                    << ") Bool)\n";
                out << "(assert (forall ((x " << c.name << ") (y " << f.type.name << ")) (=> (" << c.name << "."
                    << f.name << " x y) (All_" << f.type.name << " y))))\n";
            } else if (f.is_mutable()) {
                for (const char* s : {"pre.", "post."})
                    out << "(declare-fun " << s << c.name << "." << f.name << " (" << c.name << ") "
                        << sort_of(f.type) << ")\n";
                if (f.kind == FieldKind::Timer)
                    for (const char* s : {"pre.", "post."})
                        out << "(assert (forall ((x " << c.name << ")) (let ((t (" << s << c.name << "." << f.name
                            << " x))) (=> ((_ is timer.active) t) (>= (timer.count t) 1)))))\n";
            } else {
                out << "(declare-fun " << c.name << "." << f.name << " (" << c.name << ") " << sort_of(f.type)
                    << ")\n";
            }
        }
    }
    // A grounded reference is null for an empty source set and the sole
    // member of a singleton one.
    for (std::size_t ci = 0; ci < m.classes.size(); ++ci) {
        const auto& c = m.classes[ci];
        for (const auto& f : c.fields) {
            if (f.kind != FieldKind::Grounded || f.source_set < 0)
                continue;
            const auto& src = c.fields.at(static_cast<std::size_t>(f.source_set));
            std::string g = "(" + c.name + "." + f.name + " x)";
            std::string in = "(" + c.name + "." + src.name + " x y)";
            out << "(assert (forall ((x " << c.name << ")) (=> (All_" << c.name << " x) (ite (exists ((y "
                << src.type.name << ")) " << in << ") (" << c.name << "." << src.name << " x " << g << ") (= " << g
                << " null." << src.type.name << ")))))\n";
        }
    }
    for (const auto& k : m.constraints)
        out << "; constraint " << k.label << "\n(assert " << encode_formula(m, k.expr, opts) << ")\n";
    return out.str();
}

namespace {

std::string query(const std::string& preamble, const Model& m, const VerificationTask& t, const SmtOptions& opts)
{
    std::ostringstream out;
    out << "; " << t.id << "\n" << preamble;
    out << "(assert (not " << encode_formula(m, t.formula, opts) << "))\n";
    out << "(check-sat)\n(get-model)\n(get-info :all-statistics)\n";
    return out.str();
}

} // namespace

std::string encode_task(const Model& m, const VerificationTask& t, const SmtOptions& opts)
{
    return query(encode_model(m, opts), m, t, opts);
}

void encode_tasks(const Model& m, std::vector<VerificationTask>& tasks, const SmtOptions& opts)
{
    std::string preamble = encode_model(m, opts);
    for (auto& t : tasks)
        t.smt = query(preamble, m, t, opts);
}

void write_tasks(const std::vector<VerificationTask>& tasks, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    for (const auto& t : tasks) {
        std::ofstream f(std::filesystem::path(dir) / (t.id + ".smt2"));
        if (!f)
            throw VcError("cannot write " + dir + "/" + t.id + ".smt2");
        f << t.smt;
    }
}

} // namespace sra
