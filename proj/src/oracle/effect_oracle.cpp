#include "oracle_util.hpp"
#include "sra/core/printer.hpp"
#include "sra/core/rewrite.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/eval.hpp"

namespace sra {

using namespace detail;

namespace {

constexpr std::size_t kMaxMismatches = 50;

// Typed random expressions in the context of class `cls`, optionally with a
// bound variable of another class in scope.
class ExprGen {
public:
    ExprGen(const Model& m, int cls, std::mt19937_64& rng) : m_(m), cls_(cls), rng_(rng) {}

    ExprPtr bound; // current quantified-assignment variable, if any

    ExprPtr gen(const Type& t, int depth)
    {
        switch (t.kind) {
        case TypeKind::Bool: return boolean(depth);
        case TypeKind::Int: return integer(depth);
        case TypeKind::Enum: return enumeration(t, depth);
        case TypeKind::Timer: return timer(depth);
        default: throw OracleError("no generator for type " + to_string(t));
        }
    }

    // Readable fields of type kind `k` (and enum name) on `obj` of class `c`.
    std::vector<ExprPtr> reads(const ExprPtr& obj, int c, const Type& t) const
    {
        std::vector<ExprPtr> out;
        const auto& cls = m_.classes[static_cast<std::size_t>(c)];
        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
            const auto& fd = cls.fields[f];
            if (fd.kind == FieldKind::Set || fd.kind == FieldKind::Grounded || fd.ghost)
                continue;
            if (fd.type.kind == t.kind && fd.type.name == t.name)
                out.push_back(m_.field_ref(obj, c, static_cast<int>(f)));
        }
        return out;
    }

    std::vector<ExprPtr> own_sets() const
    {
        std::vector<ExprPtr> out;
        const auto& cls = m_.classes[static_cast<std::size_t>(cls_)];
        for (std::size_t f = 0; f < cls.fields.size(); ++f)
            if (cls.fields[f].kind == FieldKind::Set && !cls.fields[f].ghost)
                out.push_back(m_.field_ref(m_.self_ref(cls_), cls_, static_cast<int>(f)));
        return out;
    }

private:
    const Model& m_;
    int cls_;
    std::mt19937_64& rng_;

    std::vector<ExprPtr> leaves(const Type& t) const
    {
        auto out = reads(m_.self_ref(cls_), cls_, t);
        if (bound) {
            auto more = reads(bound, m_.class_index(bound->type.name), t);
            out.insert(out.end(), more.begin(), more.end());
        }
        return out;
    }

    ExprPtr leaf_or(const Type& t, ExprPtr fallback)
    {
        auto ls = leaves(t);
        if (ls.empty() || coin(rng_, 0.3))
            return fallback;
        return pick(rng_, ls);
    }

    ExprPtr boolean(int depth)
    {
        int choice = depth <= 0 ? static_cast<int>(draw(rng_, 0, 1)) : static_cast<int>(draw(rng_, 0, 7));
        switch (choice) {
        case 0: return build::bool_lit(coin(rng_));
        case 1: return leaf_or(Type::boolean(), build::bool_lit(coin(rng_)));
        case 2: return build::not_(boolean(depth - 1));
        case 3: return build::conj(boolean(depth - 1), boolean(depth - 1));
        case 4: return build::disj(boolean(depth - 1), boolean(depth - 1));
        case 5: {
            static const Op ops[] = {Op::Lt, Op::Le, Op::Gt, Op::Ge};
            return build::cmp(pick(rng_, ops), integer(depth - 1), integer(depth - 1));
        }
        case 6: {
            for (const auto& e : m_.enums) {
                Type t = Type::enumeration(e.name);
                if (!leaves(t).empty())
                    return build::eq(enumeration(t, depth - 1), enumeration(t, depth - 1));
            }
            return build::eq(integer(depth - 1), integer(depth - 1));
        }
        default: {
            auto sets = own_sets();
            if (sets.empty() || bound)
                return leaf_or(Type::boolean(), build::true_());
            ExprPtr range = pick(rng_, sets);
            int elem = m_.class_index(range->type.name);
            ExprPtr x = build::var("q" + std::to_string(depth), Type::object(range->type.name));
            auto fs = reads(x, elem, Type::boolean());
            if (fs.empty())
                return build::true_();
            ExprPtr body = pick(rng_, fs);
            if (coin(rng_))
                return build::forall(x->name, x->type, range, body);
            return build::exists(x->name, x->type, range, body);
        }
        }
    }

    ExprPtr integer(int depth)
    {
        int choice = depth <= 0 ? static_cast<int>(draw(rng_, 0, 1)) : static_cast<int>(draw(rng_, 0, 5));
        switch (choice) {
        case 0: return build::int_lit(draw(rng_, -3, 3));
        case 1: return leaf_or(Type::integer(), build::int_lit(draw(rng_, -3, 3)));
        case 2: return build::arith(Op::Add, integer(depth - 1), integer(depth - 1));
        case 3: return build::arith(Op::Sub, integer(depth - 1), integer(depth - 1));
        case 4: {
            auto ts = leaves(Type::timer());
            if (!ts.empty())
                return build::timer_count(pick(rng_, ts));
            return build::arith(Op::Mul, integer(depth - 1), build::int_lit(draw(rng_, -2, 2)));
        }
        default: {
            auto sets = own_sets();
            if (sets.empty())
                return build::ite(boolean(depth - 1), integer(depth - 1), integer(depth - 1));
            return build::card(pick(rng_, sets));
        }
        }
    }

    ExprPtr enumeration(const Type& t, int depth)
    {
        auto lit = [&] {
            return m_.enum_value(t.name, static_cast<int>(draw(rng_, 0, domain_size(m_, t) - 1)));
        };
        if (depth > 0 && coin(rng_, 0.25))
            return build::ite(boolean(depth - 1), enumeration(t, depth - 1), enumeration(t, depth - 1));
        return leaf_or(t, lit());
    }

    ExprPtr timer(int depth)
    {
        switch (draw(rng_, 0, 2)) {
        case 0: return build::inactive();
        case 1: return build::timer_from_int(integer(depth - 1));
        default: return leaf_or(Type::timer(), build::inactive());
        }
    }
};

struct Target {
    int cls;
    int field;
    const FieldDecl* decl;
};

std::vector<Target> assignable(const Model& m, int c)
{
    std::vector<Target> out;
    const auto& cls = m.classes[static_cast<std::size_t>(c)];
    for (std::size_t f = 0; f < cls.fields.size(); ++f) {
        const auto& fd = cls.fields[f];
        if (static_cast<int>(f) == cls.location)
            continue;
        if (fd.kind == FieldKind::Var || fd.kind == FieldKind::Timer || fd.kind == FieldKind::Event)
            out.push_back({c, static_cast<int>(f), &fd});
    }
    return out;
}

ExprPtr value_for(ExprGen& g, const Target& t, int depth)
{
    if (t.decl->kind == FieldKind::Event)
        return build::true_();
    return g.gen(t.decl->type, depth);
}

StmtPtr gen_stmt(const Model& m, int cls, int depth, std::mt19937_64& rng, ExprGen& g)
{
    auto own = assignable(m, cls);
    int choice = static_cast<int>(draw(rng, 0, depth > 0 ? 5 : 2));
    switch (choice) {
    case 0:
    case 1: {
        if (own.empty())
            return build::skip();
        const Target& t = pick(rng, own);
        return build::assign(cls, t.field, t.decl->name, value_for(g, t, 2));
    }
    case 2: {
        std::vector<Target> hv;
        for (const auto& t : own)
            if (t.decl->kind != FieldKind::Event)
                hv.push_back(t);
        if (hv.empty())
            return build::skip();
        const Target& t = pick(rng, hv);
        return build::havoc_stmt(cls, t.field, t.decl->name);
    }
    case 3:
        return build::if_stmt(g.gen(Type::boolean(), 2), gen_stmt(m, cls, depth - 1, rng, g),
                              coin(rng) ? gen_stmt(m, cls, depth - 1, rng, g) : build::skip());
    case 4: {
        std::vector<ExprPtr> ranges;
        for (const auto& s : g.own_sets())
            if (m.class_index(s->type.name) != cls && !assignable(m, m.class_index(s->type.name)).empty())
                ranges.push_back(s);
        if (ranges.empty())
            return gen_stmt(m, cls, 0, rng, g);
        ExprPtr range = pick(rng, ranges);
        int elem = m.class_index(range->type.name);
        const Target t = pick(rng, assignable(m, elem));
        std::string v = "v" + std::to_string(depth);
        Type vt = Type::object(range->type.name);
        g.bound = build::var(v, vt);
        ExprPtr value = value_for(g, t, 2);
        g.bound = nullptr;
        return build::forall_assign(v, vt, range, elem, t.field, t.decl->name, value);
    }
    default: {
        std::vector<StmtPtr> parts;
        int n = static_cast<int>(draw(rng, 2, 3));
        for (int i = 0; i < n; ++i)
            parts.push_back(gen_stmt(m, cls, depth - 1, rng, g));
        return build::seq(parts);
    }
    }
}

std::string slot_name(const Model& m, const Configuration& cfg, ObjRef o, int field)
{
    return cfg.name_of(o) + "." + m.classes[static_cast<std::size_t>(o.cls)].fields[static_cast<std::size_t>(field)].name;
}

} // namespace

StmtPtr random_effect(const Model& m, int cls, int depth, std::mt19937_64& rng)
{
    ExprGen g(m, cls, rng);
    if (depth <= 0)
        return gen_stmt(m, cls, 0, rng, g);
    // Top level is a sequence so that effects compose several updates.
    std::vector<StmtPtr> parts;
    int n = static_cast<int>(draw(rng, 1, 3));
    for (int i = 0; i < n; ++i)
        parts.push_back(gen_stmt(m, cls, depth - 1, rng, g));
    return build::seq(parts);
}

void check_effect(const Model& m, const Configuration& cfg, int cls, const StmtPtr& effect, int prestates,
                  std::mt19937_64& rng, EffectOracleReport& report)
{
    auto mismatch = [&](const std::string& what) {
        if (report.mismatches.size() < kMaxMismatches)
            report.mismatches.push_back(m.classes[static_cast<std::size_t>(cls)].name + " { " + print(effect) +
                                        " }: " + what);
    };
    SymbolicMap map;
    try {
        map = transform_effect(m, cls, effect);
    } catch (const std::exception& e) {
        mismatch(std::string("transformation failed: ") + e.what());
        return;
    }
    const auto& insts = cfg.instances[static_cast<std::size_t>(cls)];
    if (insts.empty())
        return;
    for (int k = 0; k < prestates; ++k) {
        ++report.checks;
        ObjRef self{cls, static_cast<int>(draw(rng, 0, static_cast<std::int64_t>(insts.size()) - 1))};
        GlobalState pre = random_state(m, cfg, rng);
        GlobalState post = pre;
        try {
            exec_stmt(m, cfg, post, self, effect, random_havoc(rng()));
        } catch (const std::exception& e) {
            mismatch(std::string("execution failed: ") + e.what());
            return;
        }
        auto compare = [&](ObjRef o, int field, Evaluator& ev, const ExprPtr& value) {
            std::int64_t expected;
            try {
                expected = ev.eval(value).scalar;
            } catch (const EvalError&) {
                return true; // havocked on this path
            }
            std::int64_t actual = post.get(m, o, field);
            if (expected != actual) {
                mismatch(slot_name(m, cfg, o, field) + ": map gives " + std::to_string(expected) +
                         ", execution gives " + std::to_string(actual));
                return false;
            }
            return true;
        };
        bool ok = true;
        for (std::size_t c = 0; c < m.classes.size() && ok; ++c) {
            for (std::size_t i = 0; i < cfg.instances[c].size() && ok; ++i) {
                ObjRef o{static_cast<int>(c), static_cast<int>(i)};
                for (int f : m.classes[c].mutable_fields) {
                    const SymbolicEntry* e = m.classes[c].fields[static_cast<std::size_t>(f)].is_mutable()
                                                 ? map.find({static_cast<int>(c), f})
                                                 : nullptr;
                    if (e && e->function) {
                        Evaluator ev(m, cfg, post, &pre, self);
                        ev.bind(e->var, Value::of_obj(o));
                        ok = compare(o, f, ev, e->value);
                    } else if (e && o == self) {
                        Evaluator ev(m, cfg, post, &pre, self);
                        ok = compare(o, f, ev, e->value);
                    } else if (post.get(m, o, f) != pre.get(m, o, f)) {
                        mismatch(slot_name(m, cfg, o, f) + " changed but is outside the symbolic map");
                        ok = false;
                    }
                    if (!ok)
                        break;
                }
            }
        }
        if (!ok)
            return;
    }
}

EffectOracleReport effect_transformation_oracle(const Model& m, int random_effects, int prestates,
                                                std::uint64_t seed, int depth)
{
    EffectOracleReport rep;
    std::mt19937_64 rng(seed);
    RandomConfigOptions opts;
    std::vector<Configuration> cfgs;
    for (int i = 0; i < 4; ++i)
        cfgs.push_back(random_configuration(m, rng, opts));
    const int per_cfg = (prestates + static_cast<int>(cfgs.size()) - 1) / static_cast<int>(cfgs.size());
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        for (const auto& t : m.classes[c].transitions) {
            ++rep.effects;
            for (const auto& cfg : cfgs)
                check_effect(m, cfg, static_cast<int>(c), t.effect, per_cfg, rng, rep);
        }
    }
    if (m.classes.empty())
        return rep;
    for (int i = 0; i < random_effects; ++i) {
        int cls = static_cast<int>(i % static_cast<int>(m.classes.size()));
        StmtPtr eff = random_effect(m, cls, depth, rng);
        ++rep.effects;
        check_effect(m, pick(rng, cfgs), cls, eff, prestates, rng, rep);
    }
    return rep;
}

} // namespace sra
