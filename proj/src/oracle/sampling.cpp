#include "oracle_util.hpp"
#include "sra/frontend/frontend.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/eval.hpp"

#include <algorithm>
#include <cctype>

namespace sra {

namespace detail {

std::int64_t random_scalar(const Model& m, const Type& t, std::mt19937_64& rng)
{
    switch (t.kind) {
    case TypeKind::Bool: return draw(rng, 0, 1);
    case TypeKind::Enum: return draw(rng, 0, std::max<std::int64_t>(1, domain_size(m, t)) - 1);
    case TypeKind::Timer: return draw(rng, 0, 3);
    default: return draw(rng, -3, 3);
    }
}

std::int64_t perturb(const Model& m, const Type& t, std::int64_t v)
{
    switch (t.kind) {
    case TypeKind::Bool: return v ? 0 : 1;
    case TypeKind::Enum: {
        std::int64_t n = domain_size(m, t);
        return n > 1 ? (v + 1) % n : v;
    }
    default: return v + 1;
    }
}

} // namespace detail

using namespace detail;

namespace {

// One adjustable bit of a configuration: membership of `elem` in a set field,
// or the value of a parameter (`elem` == -1).
struct Knob {
    ObjRef owner;
    int field = -1;
    int elem = -1;
};

std::int64_t random_param(const Model& m, const Type& t, std::mt19937_64& rng, const RandomConfigOptions& o)
{
    switch (t.kind) {
    case TypeKind::Bool: return draw(rng, 0, 1);
    case TypeKind::Enum: return draw(rng, 0, std::max<std::int64_t>(1, domain_size(m, t)) - 1);
    default: return draw(rng, o.param_lo, o.param_hi);
    }
}

std::string instance_name(const std::string& cls, int i)
{
    std::string n = cls;
    for (auto& ch : n)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return n + std::to_string(i);
}

// Number of falsified leaves of a constraint: universally quantified and
// conjunctive parts count each failing element separately.
class ConflictCounter {
public:
    ConflictCounter(const Model& m, const Configuration& cfg) : m_(m), cfg_(cfg), s_(GlobalState::zero(m, cfg)) {}

    int count(const ExprPtr& e)
    {
        if (e->op == Op::And) {
            int n = 0;
            for (const auto& a : e->args)
                n += count(a);
            return n;
        }
        if (e->op == Op::Forall) {
            Value range;
            try {
                range = evaluator().eval(e->args[0]);
            } catch (const std::exception&) {
                return 1;
            }
            int cls = m_.class_index(e->binder_type.name);
            int n = 0;
            for (int idx : range.set) {
                env_.emplace_back(e->name, Value::of_obj({cls, idx}));
                n += count(e->args[1]);
                env_.pop_back();
            }
            return n;
        }
        try {
            return evaluator().holds(e) ? 0 : 1;
        } catch (const std::exception&) {
            return 1;
        }
    }

    int total()
    {
        int n = 0;
        for (const auto& c : m_.constraints)
            n += count(c.expr);
        return n;
    }

private:
    const Model& m_;
    const Configuration& cfg_;
    GlobalState s_;
    std::vector<std::pair<std::string, Value>> env_;

    Evaluator evaluator()
    {
        Evaluator ev(m_, cfg_, s_);
        for (const auto& [n, v] : env_)
            ev.bind(n, v);
        return ev;
    }
};

// Value of `k` after the move: membership toggled, or a different parameter
// value.
Value moved(const Model& m, const Configuration& cfg, const Knob& k, std::mt19937_64& rng,
            const RandomConfigOptions& o)
{
    Value v = cfg.get(k.owner, k.field);
    if (k.elem >= 0) {
        auto it = std::find(v.set.begin(), v.set.end(), k.elem);
        if (it == v.set.end())
            v.set.push_back(k.elem);
        else
            v.set.erase(it);
        return Value::of_set(v.set);
    }
    const auto& fd = m.classes[static_cast<std::size_t>(k.owner.cls)].fields[static_cast<std::size_t>(k.field)];
    std::int64_t old = v.scalar;
    for (int i = 0; i < 8 && v.scalar == old; ++i)
        v.scalar = random_param(m, fd.type, rng, o);
    return v;
}

void set_knob(const Model& m, Configuration& cfg, const Knob& k, Value v)
{
    cfg.set(k.owner, k.field, std::move(v));
    cfg.derive_grounded(m);
}

Configuration random_proposal(const Model& m, std::mt19937_64& rng, const RandomConfigOptions& o,
                              std::vector<Knob>& knobs)
{
    Configuration cfg = Configuration::empty_for(m);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        int n = static_cast<int>(draw(rng, o.min_instances, o.max_instances));
        for (int i = 0; i < n; ++i)
            cfg.instances[c].push_back(instance_name(m.classes[c].name, i));
    }
    cfg.derive_grounded(m);
    knobs.clear();
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cls = m.classes[c];
        for (std::size_t i = 0; i < cfg.instances[c].size(); ++i) {
            ObjRef inst{static_cast<int>(c), static_cast<int>(i)};
            for (std::size_t f = 0; f < cls.fields.size(); ++f) {
                const auto& fd = cls.fields[f];
                if (fd.kind == FieldKind::Set) {
                    int elem_cls = m.class_index(fd.type.name);
                    std::vector<int> members;
                    for (std::size_t e = 0; e < cfg.instances[static_cast<std::size_t>(elem_cls)].size(); ++e) {
                        knobs.push_back({inst, static_cast<int>(f), static_cast<int>(e)});
                        if (coin(rng))
                            members.push_back(static_cast<int>(e));
                    }
                    cfg.set(inst, static_cast<int>(f), Value::of_set(members));
                } else if (fd.kind == FieldKind::Param) {
                    knobs.push_back({inst, static_cast<int>(f), -1});
                    cfg.set(inst, static_cast<int>(f), Value::of(random_param(m, fd.type, rng, o)));
                }
            }
        }
    }
    cfg.derive_grounded(m);
    return cfg;
}

} // namespace

Configuration random_configuration(const Model& m, std::mt19937_64& rng, const RandomConfigOptions& opts)
{
    constexpr int kStall = 15;
    constexpr double kNoise = 0.1;
    std::vector<Knob> knobs;
    for (int attempt = 0; attempt < opts.max_tries; ++attempt) {
        Configuration cfg = random_proposal(m, rng, opts, knobs);
        int cost = ConflictCounter(m, cfg).total();
        int best_seen = cost;
        for (int stall = 0; stall < kStall && cost > 0 && !knobs.empty(); ++stall) {
            if (coin(rng, kNoise)) {
                const Knob& k = pick(rng, knobs);
                set_knob(m, cfg, k, moved(m, cfg, k, rng, opts));
                cost = ConflictCounter(m, cfg).total();
            } else {
                int best = -1;
                std::vector<std::pair<std::size_t, Value>> moves;
                for (std::size_t i = 0; i < knobs.size(); ++i) {
                    const Knob& k = knobs[i];
                    Value before = cfg.get(k.owner, k.field);
                    Value after = moved(m, cfg, k, rng, opts);
                    set_knob(m, cfg, k, after);
                    int c = ConflictCounter(m, cfg).total();
                    set_knob(m, cfg, k, std::move(before));
                    if (best < 0 || c < best) {
                        best = c;
                        moves.clear();
                    }
                    if (c == best)
                        moves.emplace_back(i, std::move(after));
                }
                auto& mv = moves[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(moves.size()) - 1))];
                set_knob(m, cfg, knobs[mv.first], std::move(mv.second));
                cost = best;
            }
            if (cost < best_seen) {
                best_seen = cost;
                stall = -1;
            }
        }
        if (cost != 0)
            continue;
        auto gamma = evaluate_gamma(m, cfg);
        if (std::all_of(gamma.begin(), gamma.end(), [](const GammaResult& g) { return g.holds; }))
            return cfg;
    }
    throw OracleError("no configuration satisfying the constraints found after " + std::to_string(opts.max_tries) +
                      " proposals");
}

GlobalState random_state(const Model& m, const Configuration& cfg, std::mt19937_64& rng,
                         const std::vector<int>& phases)
{
    GlobalState s = GlobalState::zero(m, cfg);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cls = m.classes[c];
        for (std::size_t i = 0; i < cfg.instances[c].size(); ++i) {
            ObjRef o{static_cast<int>(c), static_cast<int>(i)};
            for (int f : cls.mutable_fields)
                s.set(m, o, f, random_scalar(m, cls.fields[static_cast<std::size_t>(f)].type, rng));
            s.set_executed(o, coin(rng));
        }
    }
    if (!phases.empty())
        s.phase = pick(rng, phases);
    else if (!m.scheduler.phases.empty())
        s.phase = static_cast<int>(draw(rng, 0, static_cast<std::int64_t>(m.scheduler.phases.size()) - 1));
    return s;
}

} // namespace sra
