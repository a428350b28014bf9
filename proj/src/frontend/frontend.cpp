#include "sra/frontend/frontend.hpp"

#include "resolve.hpp"
#include "sra/frontend/parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sra {

Parsed<Model> parse_model(std::string_view src, const std::string& file)
{
    Diagnostics d;
    RawModel raw = parse_model_syntax(src, file, d);
    Model m = resolve_model(raw, file, d);
    d.append(check_model(m));
    Parsed<Model> out;
    out.diagnostics = d.all();
    if (!d.has_errors())
        out.value = std::move(m);
    return out;
}

Parsed<ExprPtr> parse_expression(std::string_view src, const Model& m, ExprMode mode, int cls)
{
    Diagnostics d;
    std::string text = "__expr__: " + std::string(src) + ";";
    RawInvariantFile raw = parse_invariant_syntax(text, "<expr>", d);
    Parsed<ExprPtr> out;
    if (!d.has_errors() && raw.items.size() != 1)
        d.error("E001", "expected one expression", SourceSpan{"<expr>", 0, 0, 1, 1});
    if (d.has_errors()) {
        out.diagnostics = d.all();
        return out;
    }
    Resolver r(m, d);
    auto e = r.expr(raw.items[0].expr, mode, cls);
    out.diagnostics = d.all();
    if (!d.has_errors())
        out.value = e;
    return out;
}

ExprPtr InvariantSpec::conjunction() const
{
    std::vector<ExprPtr> parts;
    for (const auto& i : items)
        parts.push_back(i.expr);
    return build::conj(parts);
}

Parsed<InvariantSpec> parse_invariant_file(std::string_view src, const Model& m, const std::string& file)
{
    Diagnostics d;
    RawInvariantFile raw = parse_invariant_syntax(src, file, d);
    Resolver r(m, d);
    InvariantSpec spec;
    for (const auto& item : raw.items) {
        Constraint c = item;
        c.expr = r.expr(item.expr, ExprMode::Invariant, -1);
        if (c.expr && c.expr->type.kind != TypeKind::Unknown && c.expr->type.kind != TypeKind::Bool)
            d.error("E011", "invariant items must be boolean", item.span);
        spec.items.push_back(std::move(c));
    }
    for (const auto& g : raw.gprime) {
        int p = m.scheduler.find_phase(g.phase);
        int c = m.class_index(g.cls);
        if (p < 0)
            d.error("E003", "unknown phase '" + g.phase + "'", g.span);
        if (c < 0)
            d.error("E003", "unknown class '" + g.cls + "'", g.span);
        if (p < 0 || c < 0)
            continue;
        auto e = r.expr(g.expr, ExprMode::LocalCondition, c);
        if (e && e->type.kind != TypeKind::Unknown && e->type.kind != TypeKind::Bool)
            d.error("E011", "gprime conditions must be boolean", g.span);
        if (!spec.gprime.emplace(std::make_pair(p, c), e).second)
            d.error("E002", "duplicate gprime for " + g.phase + "/" + g.cls, g.span);
    }
    Parsed<InvariantSpec> out;
    out.diagnostics = d.all();
    if (!d.has_errors())
        out.value = std::move(spec);
    return out;
}

Parsed<ExprPtr> parse_invariant(std::string_view src, const Model& m, const std::string& file)
{
    auto spec = parse_invariant_file(src, m, file);
    Parsed<ExprPtr> out;
    out.diagnostics = spec.diagnostics;
    if (spec.ok())
        out.value = spec.value->conjunction();
    return out;
}

namespace {

// Evaluator for formulas over immutable symbols only.
class GammaEval {
public:
    GammaEval(const Model& m, const Configuration& cfg) : m_(m), cfg_(cfg) {}

    Value eval(const ExprPtr& e)
    {
        switch (e->op) {
        case Op::IntLit:
        case Op::BoolLit:
        case Op::EnumLit: return Value::of(e->value);
        case Op::NullLit: return Value::of_obj({m_.class_index(e->type.name), -1});
        case Op::Var: return Value::of_obj(env_.at(e->name));
        case Op::AllSet: {
            std::vector<int> all(cfg_.instances[static_cast<std::size_t>(e->cls)].size());
            for (std::size_t i = 0; i < all.size(); ++i)
                all[i] = static_cast<int>(i);
            return Value::of_set(std::move(all));
        }
        case Op::Field: {
            Value o = eval(e->args[0]);
            if (o.obj.is_null())
                throw std::runtime_error("field access through null");
            const auto& f = m_.classes[static_cast<std::size_t>(e->cls)].fields[static_cast<std::size_t>(e->field)];
            if (f.is_mutable() || e->field < 0)
                throw std::runtime_error("constraint reads mutable field " + f.name);
            return cfg_.get(o.obj, e->field);
        }
        case Op::Neg: return Value::of(-eval(e->args[0]).scalar);
        case Op::Add: return Value::of(eval(e->args[0]).scalar + eval(e->args[1]).scalar);
        case Op::Sub: return Value::of(eval(e->args[0]).scalar - eval(e->args[1]).scalar);
        case Op::Mul: return Value::of(eval(e->args[0]).scalar * eval(e->args[1]).scalar);
        case Op::Lt: return Value::of_bool(eval(e->args[0]).scalar < eval(e->args[1]).scalar);
        case Op::Le: return Value::of_bool(eval(e->args[0]).scalar <= eval(e->args[1]).scalar);
        case Op::Gt: return Value::of_bool(eval(e->args[0]).scalar > eval(e->args[1]).scalar);
        case Op::Ge: return Value::of_bool(eval(e->args[0]).scalar >= eval(e->args[1]).scalar);
        case Op::Eq: return Value::of_bool(eval(e->args[0]) == eval(e->args[1]));
        case Op::Ne: return Value::of_bool(!(eval(e->args[0]) == eval(e->args[1])));
        case Op::Not: return Value::of_bool(!eval(e->args[0]).truthy());
        case Op::And:
            for (const auto& a : e->args)
                if (!eval(a).truthy())
                    return Value::of_bool(false);
            return Value::of_bool(true);
        case Op::Or:
            for (const auto& a : e->args)
                if (eval(a).truthy())
                    return Value::of_bool(true);
            return Value::of_bool(false);
        case Op::Implies: return Value::of_bool(!eval(e->args[0]).truthy() || eval(e->args[1]).truthy());
        case Op::Iff: return Value::of_bool(eval(e->args[0]).truthy() == eval(e->args[1]).truthy());
        case Op::Ite: return eval(e->args[0]).truthy() ? eval(e->args[1]) : eval(e->args[2]);
        case Op::Card: return Value::of(static_cast<std::int64_t>(eval(e->args[0]).set.size()));
        case Op::In: {
            Value o = eval(e->args[0]);
            Value s = eval(e->args[1]);
            return Value::of_bool(std::binary_search(s.set.begin(), s.set.end(), o.obj.index));
        }
        case Op::Subset: {
            Value a = eval(e->args[0]);
            Value b = eval(e->args[1]);
            return Value::of_bool(std::includes(b.set.begin(), b.set.end(), a.set.begin(), a.set.end()));
        }
        case Op::Disjoint: {
            Value a = eval(e->args[0]);
            Value b = eval(e->args[1]);
            std::vector<int> both;
            std::set_intersection(a.set.begin(), a.set.end(), b.set.begin(), b.set.end(), std::back_inserter(both));
            return Value::of_bool(both.empty());
        }
        case Op::Union: {
            Value a = eval(e->args[0]);
            Value b = eval(e->args[1]);
            std::vector<int> u;
            std::set_union(a.set.begin(), a.set.end(), b.set.begin(), b.set.end(), std::back_inserter(u));
            return Value::of_set(std::move(u));
        }
        case Op::Forall:
        case Op::Exists: {
            Value range = eval(e->args[0]);
            int cls = m_.class_index(e->binder_type.name);
            bool forall = e->op == Op::Forall;
            auto saved = env_.find(e->name) != env_.end() ? std::optional<ObjRef>(env_[e->name]) : std::nullopt;
            bool result = forall;
            for (int i : range.set) {
                env_[e->name] = ObjRef{cls, i};
                bool b = eval(e->args[1]).truthy();
                if (b != forall) {
                    result = !forall;
                    break;
                }
            }
            if (saved)
                env_[e->name] = *saved;
            else
                env_.erase(e->name);
            return Value::of_bool(result);
        }
        default: throw std::runtime_error("unsupported construct in constraint");
        }
    }

private:
    const Model& m_;
    const Configuration& cfg_;
    std::map<std::string, ObjRef> env_;
};

} // namespace

std::vector<GammaResult> evaluate_gamma(const Model& m, const Configuration& cfg)
{
    std::vector<GammaResult> out;
    GammaEval ev(m, cfg);
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        const auto& c = m.constraints[i];
        std::string label = c.label.empty() ? "constraint" + std::to_string(i + 1) : c.label;
        bool holds = false;
        try {
            holds = ev.eval(c.expr).truthy();
        } catch (const std::exception&) {
            holds = false;
        }
        out.push_back({label, holds});
    }
    return out;
}

bool ConfigReport::satisfies_gamma() const
{
    return std::all_of(gamma.begin(), gamma.end(), [](const GammaResult& g) { return g.holds; });
}

Parsed<ConfigReport> parse_configuration(std::string_view src, const Model& m, const std::string& file)
{
    Diagnostics d;
    RawConfiguration raw = parse_configuration_syntax(src, file, d);
    Configuration cfg = Configuration::empty_for(m);
    std::set<std::string> names;
    std::set<int> listed;
    for (const auto& u : raw.universes) {
        int c = m.class_index(u.cls);
        if (c < 0) {
            d.error("E003", "unknown class '" + u.cls + "'", u.span);
            continue;
        }
        if (!listed.insert(c).second)
            d.error("E002", "universe of class " + u.cls + " listed twice", u.span);
        for (std::size_t i = 0; i < u.names.size(); ++i) {
            if (!names.insert(u.names[i]).second) {
                d.error("E002", "instance '" + u.names[i] + "' listed twice", u.spans[i]);
                continue;
            }
            cfg.instances[static_cast<std::size_t>(c)].push_back(u.names[i]);
        }
    }
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        cfg.fixed[c].assign(cfg.instances[c].size(), std::vector<Value>(m.classes[c].fields.size()));
        for (std::size_t f = 0; f < m.classes[c].fields.size(); ++f)
            if (m.classes[c].fields[f].kind == FieldKind::Set)
                for (auto& row : cfg.fixed[c])
                    row[f] = Value::of_set({});
    }
    std::set<std::pair<ObjRef, int>> bound;
    Resolver r(m, d);
    for (const auto& b : raw.bindings) {
        auto obj = cfg.find(b.object);
        if (!obj) {
            d.error("E003", "unknown instance '" + b.object + "'", b.span);
            continue;
        }
        const auto& cls = m.classes[static_cast<std::size_t>(obj->cls)];
        int f = cls.find_field(b.field);
        if (f < 0) {
            d.error("E003", "class " + cls.name + " has no field '" + b.field + "'", b.span);
            continue;
        }
        const auto& fd = cls.fields[static_cast<std::size_t>(f)];
        if (!bound.insert({*obj, f}).second)
            d.error("E002", b.object + "." + b.field + " bound twice", b.span);
        if (fd.kind == FieldKind::Set) {
            if (!b.is_set) {
                d.error("E011", b.object + "." + b.field + " is a set; expected '{ ... }'", b.span);
                continue;
            }
            int elem = m.class_index(fd.type.name);
            std::vector<int> idx;
            for (const auto& n : b.elems) {
                auto o = cfg.find(n);
                if (!o) {
                    d.error("E003", "unknown instance '" + n + "'", b.span);
                    continue;
                }
                if (o->cls != elem) {
                    d.error("E011",
                            "instance '" + n + "' is not a " + fd.type.name + " (set " + b.object + "." + b.field + ")",
                            b.span);
                    continue;
                }
                idx.push_back(o->index);
            }
            cfg.set(*obj, f, Value::of_set(std::move(idx)));
        } else if (fd.kind == FieldKind::Param) {
            if (b.is_set || !b.literal) {
                d.error("E011", b.object + "." + b.field + " is a parameter; expected a literal", b.span);
                continue;
            }
            auto v = r.expr(b.literal, ExprMode::Initializer, -1);
            if (!v || v->type.kind == TypeKind::Unknown)
                continue;
            if (!(v->type == fd.type) || (v->op != Op::IntLit && v->op != Op::BoolLit && v->op != Op::EnumLit)) {
                d.error("E011", "parameter " + b.object + "." + b.field + " expects a " + to_string(fd.type) +
                                    " literal",
                        b.span);
                continue;
            }
            cfg.set(*obj, f, Value::of(v->value));
        } else {
            d.error("E017", "only set and parameter fields are configured; '" + b.field + "' is " +
                                to_string(fd.kind),
                    b.span);
        }
    }
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        for (std::size_t f = 0; f < m.classes[c].fields.size(); ++f) {
            if (m.classes[c].fields[f].kind != FieldKind::Param)
                continue;
            for (std::size_t i = 0; i < cfg.instances[c].size(); ++i)
                if (!bound.count({ObjRef{static_cast<int>(c), static_cast<int>(i)}, static_cast<int>(f)}))
                    d.error("E020",
                            "parameter " + cfg.instances[c][i] + "." + m.classes[c].fields[f].name + " has no value",
                            SourceSpan{file, 0, 0, 1, 1});
        }
    }
    Parsed<ConfigReport> out;
    if (!d.has_errors()) {
        cfg.derive_grounded(m);
        ConfigReport rep{cfg, evaluate_gamma(m, cfg)};
        out.value = std::move(rep);
    }
    out.diagnostics = d.all();
    return out;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace sra
