#include "sra/sim/simulator.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace sra {

namespace {

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi)
{
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::int64_t parse_literal(const Model& m, const Type& t, const std::string& text)
{
    switch (t.kind) {
    case TypeKind::Bool:
        if (text == "true")
            return 1;
        if (text == "false")
            return 0;
        break;
    case TypeKind::Int:
        try {
            std::size_t used = 0;
            std::int64_t v = std::stoll(text, &used);
            if (used == text.size())
                return v;
        } catch (const std::exception&) {
        }
        break;
    case TypeKind::Enum: {
        auto vals = m.enum_values(t);
        auto it = std::find(vals.begin(), vals.end(), text);
        if (it != vals.end())
            return it - vals.begin();
        break;
    }
    default: break;
    }
    throw SimError("'" + text + "' is not a value of type " + to_string(t));
}

} // namespace

HavocSource random_havoc(std::uint64_t seed, std::int64_t lo, std::int64_t hi)
{
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng, lo, hi](const Type& t) -> std::int64_t {
        switch (t.kind) {
        case TypeKind::Bool: return draw(*rng, 0, 1);
        case TypeKind::Timer: return std::max<std::int64_t>(0, draw(*rng, lo, hi));
        case TypeKind::Int: return draw(*rng, lo, hi);
        default: throw SimError("havoc of type " + to_string(t) + " needs a model-aware source");
        }
    };
}

// --- inputs -----------------------------------------------------------------

ScriptedInputs ScriptedInputs::from_json(const std::string& text)
{
    auto j = nlohmann::json::parse(text);
    std::vector<std::vector<Assignment>> cycles;
    for (const auto& cyc : j.at("cycles")) {
        std::vector<Assignment> as;
        for (const auto& [inst, fields] : cyc.items()) {
            for (const auto& [field, v] : fields.items()) {
                std::string value;
                if (v.is_boolean())
                    value = v.get<bool>() ? "true" : "false";
                else if (v.is_number_integer())
                    value = std::to_string(v.get<std::int64_t>());
                else if (v.is_string())
                    value = v.get<std::string>();
                else
                    throw SimError("unsupported input value for " + inst + "." + field);
                as.push_back({inst, field, value});
            }
        }
        cycles.push_back(std::move(as));
    }
    return ScriptedInputs(std::move(cycles));
}

void ScriptedInputs::validate(const Model& m, const Configuration& cfg) const
{
    for (const auto& cyc : cycles_) {
        for (const auto& a : cyc) {
            auto o = cfg.find(a.instance);
            if (!o)
                throw SimError("scripted input names unknown instance '" + a.instance + "'");
            const auto& cls = m.classes[static_cast<std::size_t>(o->cls)];
            int f = cls.find_field(a.field);
            if (f < 0 || cls.fields[static_cast<std::size_t>(f)].kind != FieldKind::Input)
                throw SimError("scripted input " + a.instance + "." + a.field + " is not an input field");
            parse_literal(m, cls.fields[static_cast<std::size_t>(f)].type, a.value);
        }
    }
}

void ScriptedInputs::provide(const Model& m, const Configuration& cfg, GlobalState& s, int cycle)
{
    if (cycle < 0 || static_cast<std::size_t>(cycle) >= cycles_.size())
        return;
    for (const auto& a : cycles_[static_cast<std::size_t>(cycle)]) {
        auto o = cfg.find(a.instance);
        if (!o)
            throw SimError("scripted input names unknown instance '" + a.instance + "'");
        const auto& cls = m.classes[static_cast<std::size_t>(o->cls)];
        int f = cls.find_field(a.field);
        if (f < 0 || cls.fields[static_cast<std::size_t>(f)].kind != FieldKind::Input)
            throw SimError("scripted input " + a.instance + "." + a.field + " is not an input field");
        s.set(m, *o, f, parse_literal(m, cls.fields[static_cast<std::size_t>(f)].type, a.value));
    }
}

void RandomInputs::provide(const Model& m, const Configuration& cfg, GlobalState& s, int)
{
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cls = m.classes[c];
        for (std::size_t i = 0; i < cfg.instances[c].size(); ++i) {
            for (std::size_t f = 0; f < cls.fields.size(); ++f) {
                const auto& fd = cls.fields[f];
                if (fd.kind != FieldKind::Input)
                    continue;
                std::int64_t n = domain_size(m, fd.type);
                std::int64_t v = n > 0 ? draw(rng_, 0, n - 1) : draw(rng_, lo_, hi_);
                s.set(m, ObjRef{static_cast<int>(c), static_cast<int>(i)}, static_cast<int>(f), v);
            }
        }
    }
}

// --- ordering ---------------------------------------------------------------

std::vector<ObjRef> all_instances(const Configuration& cfg)
{
    std::vector<ObjRef> out;
    for (std::size_t c = 0; c < cfg.instances.size(); ++c)
        for (std::size_t i = 0; i < cfg.instances[c].size(); ++i)
            out.push_back({static_cast<int>(c), static_cast<int>(i)});
    return out;
}

OrderPolicy OrderPolicy::parse(const std::string& text, const Model& m, const Configuration& cfg)
{
    if (text == "declaration" || text.empty())
        return declaration();
    if (text == "exhaustive")
        return exhaustive();
    if (text.rfind("seeded:", 0) == 0)
        return seeded(std::stoull(text.substr(7)));
    if (text.rfind("fixed:", 0) != 0)
        throw SimError("unknown order policy '" + text + "'");
    OrderPolicy p = declaration();
    std::stringstream phases(text.substr(6));
    std::string item;
    auto everyone = all_instances(cfg);
    while (std::getline(phases, item, ';')) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw SimError("expected Phase=a,b,... in '" + item + "'");
        int ph = m.scheduler.find_phase(item.substr(0, eq));
        if (ph < 0)
            throw SimError("unknown phase '" + item.substr(0, eq) + "'");
        std::vector<ObjRef> order;
        std::stringstream names(item.substr(eq + 1));
        std::string n;
        while (std::getline(names, n, ',')) {
            auto o = cfg.find(n);
            if (!o)
                throw SimError("unknown instance '" + n + "' in order");
            order.push_back(*o);
        }
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != everyone)
            throw SimError("order for phase " + m.scheduler.phases[static_cast<std::size_t>(ph)] +
                           " is not a permutation of all instances");
        p.fixed[ph] = std::move(order);
    }
    return p;
}

// --- local semantics -------------------------------------------------------

GlobalState init_state(const Model& m, const Configuration& cfg, InputProvider& inputs)
{
    GlobalState s = GlobalState::zero(m, cfg);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cls = m.classes[c];
        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
            const auto& fd = cls.fields[f];
            if (!fd.is_mutable())
                continue;
            if (!fd.init && fd.kind == FieldKind::Var)
                throw SimError("field " + cls.name + "." + fd.name + " has no initial value");
            if (!fd.init)
                continue;
            for (std::size_t i = 0; i < cfg.instances[c].size(); ++i) {
                ObjRef o{static_cast<int>(c), static_cast<int>(i)};
                s.set(m, o, static_cast<int>(f), evaluate(fd.init, m, cfg, s, nullptr, o).scalar);
            }
        }
    }
    s.phase = m.scheduler.initial;
    inputs.provide(m, cfg, s, 0);
    return s;
}

int enabled_transition(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef inst, int phase)
{
    const auto& cls = m.classes[static_cast<std::size_t>(inst.cls)];
    std::int64_t loc = s.get(m, inst, cls.location);
    for (std::size_t t = 0; t < cls.transitions.size(); ++t) {
        const auto& tr = cls.transitions[t];
        if (tr.phase_index != phase || tr.from_index != loc)
            continue;
        if (holds(tr.guard, m, cfg, s, nullptr, inst))
            return static_cast<int>(t);
    }
    return -1;
}

void exec_stmt(const Model& m, const Configuration& cfg, GlobalState& s, ObjRef self, const StmtPtr& st,
               const HavocSource& havoc)
{
    if (!st)
        return;
    switch (st->kind) {
    case StmtKind::Skip: return;
    case StmtKind::Seq:
        for (const auto& b : st->body)
            exec_stmt(m, cfg, s, self, b, havoc);
        return;
    case StmtKind::Assign:
        s.set(m, {st->cls, self.index}, st->field, evaluate(st->value, m, cfg, s, nullptr, self).scalar);
        return;
    case StmtKind::Havoc: {
        if (!havoc)
            throw SimError("havoc of " + st->target + " without a value source");
        const auto& fd = m.classes[static_cast<std::size_t>(st->cls)].fields[static_cast<std::size_t>(st->field)];
        std::int64_t v;
        std::int64_t n = domain_size(m, fd.type);
        if (n > 0)
            v = ((havoc(Type::integer()) % n) + n) % n;
        else
            v = havoc(fd.type);
        s.set(m, {st->cls, self.index}, st->field, v);
        return;
    }
    case StmtKind::If:
        if (holds(st->cond, m, cfg, s, nullptr, self))
            exec_stmt(m, cfg, s, self, st->body.at(0), havoc);
        else if (st->body.size() > 1)
            exec_stmt(m, cfg, s, self, st->body[1], havoc);
        return;
    case StmtKind::ForallAssign: {
        Value range = evaluate(st->range, m, cfg, s, nullptr, self);
        int elem = m.class_index(st->var_type.name);
        std::vector<std::pair<ObjRef, std::int64_t>> writes;
        for (int i : range.set) {
            ObjRef y{elem, i};
            Evaluator ev(m, cfg, s, nullptr, self);
            ev.bind(st->var, Value::of_obj(y));
            writes.emplace_back(y, ev.eval(st->value).scalar);
        }
        for (const auto& [y, v] : writes)
            s.set(m, {st->cls, y.index}, st->field, v);
        return;
    }
    case StmtKind::FieldAssign: {
        Value o = evaluate(st->object, m, cfg, s, nullptr, self);
        if (o.obj.is_null())
            return;
        std::int64_t v = evaluate(st->value, m, cfg, s, nullptr, self).scalar;
        s.set(m, {st->cls, o.obj.index}, st->field, v);
        return;
    }
    case StmtKind::Assume:
        if (!holds(st->cond, m, cfg, s, nullptr, self))
            throw SimError("assumption violated at line " + std::to_string(st->span.line));
        return;
    case StmtKind::Assert:
        if (!holds(st->cond, m, cfg, s, nullptr, self))
            throw SimError("assertion failed at line " + std::to_string(st->span.line));
        return;
    }
}

ExecResult exec_local(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef inst, int phase,
                      const HavocSource& havoc)
{
    ExecResult r{s, enabled_transition(m, cfg, s, inst, phase)};
    if (r.fired < 0)
        return r;
    const auto& cls = m.classes[static_cast<std::size_t>(inst.cls)];
    const auto& tr = cls.transitions[static_cast<std::size_t>(r.fired)];
    exec_stmt(m, cfg, r.state, inst, tr.effect, havoc);
    r.state.set(m, inst, cls.location, tr.to_index);
    for (int ev : tr.events)
        r.state.set(m, inst, ev, 0);
    return r;
}

void tick(const Model& m, GlobalState& s, ObjRef inst)
{
    const auto& cls = m.classes[static_cast<std::size_t>(inst.cls)];
    for (std::size_t f = 0; f < cls.fields.size(); ++f) {
        if (cls.fields[f].kind != FieldKind::Timer)
            continue;
        std::int64_t v = s.get(m, inst, static_cast<int>(f));
        if (v > 0)
            s.set(m, inst, static_cast<int>(f), v - 1);
    }
}

void change_phase(const Model& m, const Configuration& cfg, GlobalState& s, int to)
{
    s.phase = to;
    for (auto& row : s.executed)
        std::fill(row.begin(), row.end(), 0);
    if (to == m.scheduler.final_phase)
        for (ObjRef o : all_instances(cfg))
            tick(m, s, o);
}

int enabled_scheduler_transition(const Model& m, const Configuration& cfg, const GlobalState& s)
{
    const auto& ts = m.scheduler.transitions;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i].from_index == s.phase && holds(ts[i].guard, m, cfg, s))
            return static_cast<int>(i);
    return -1;
}

// --- global semantics ------------------------------------------------------

Simulator::Simulator(const Model& m, const Configuration& cfg, OrderPolicy order, InputProvider& inputs,
                     HavocSource havoc)
    : m_(m), cfg_(cfg), order_(std::move(order)), inputs_(inputs), havoc_(std::move(havoc)), rng_(order_.seed)
{
}

GlobalState Simulator::init()
{
    cycle_ = 0;
    steps_ = 0;
    return init_state(m_, cfg_, inputs_);
}

std::vector<ObjRef> Simulator::order_for(int phase)
{
    auto all = all_instances(cfg_);
    switch (order_.kind) {
    case OrderPolicy::Kind::Seeded:
        for (std::size_t i = all.size(); i > 1; --i)
            std::swap(all[i - 1], all[rng_() % i]);
        return all;
    case OrderPolicy::Kind::Fixed: {
        auto it = order_.fixed.find(phase);
        return it == order_.fixed.end() ? all : it->second;
    }
    case OrderPolicy::Kind::Exhaustive: break;
    }
    throw SimError("the exhaustive order policy enumerates successors and cannot drive a single run");
}

TraceStep Simulator::step(const GlobalState& s)
{
    TraceStep out{++steps_, {}, s};
    GlobalState& t = out.state;
    const auto& sched = m_.scheduler;
    if (s.phase == sched.final_phase) {
        out.label.kind = StepLabel::Kind::Reset;
        out.label.from = s.phase;
        out.label.to = sched.initial;
        t.phase = sched.initial;
        ++cycle_;
        inputs_.provide(m_, cfg_, t, cycle_);
        return out;
    }
    int k = enabled_scheduler_transition(m_, cfg_, s);
    if (k < 0)
        throw SimError("scheduler deadlock in phase " + sched.phases[static_cast<std::size_t>(s.phase)]);
    const auto& tr = sched.transitions[static_cast<std::size_t>(k)];
    out.label.from = tr.from_index;
    out.label.to = tr.to_index;
    if (tr.self_loop()) {
        out.label.kind = StepLabel::Kind::SelfLoop;
        out.label.order = order_for(s.phase);
        for (ObjRef o : out.label.order) {
            ExecResult r = exec_local(m_, cfg_, t, o, s.phase, havoc_);
            t = std::move(r.state);
            t.set_executed(o, true);
            out.label.fired.push_back(r.fired);
        }
        return out;
    }
    out.label.kind = StepLabel::Kind::PhaseChange;
    change_phase(m_, cfg_, t, tr.to_index);
    return out;
}

RunResult run(const Model& m, const Configuration& cfg, const OrderPolicy& order, InputProvider& inputs,
              const std::vector<ExprPtr>& monitors, const RunOptions& opts, const HavocSource& havoc)
{
    RunResult res;
    try {
        Simulator sim(m, cfg, order, inputs, havoc);
        GlobalState s = sim.init();
        res.trace.push_back({0, {}, s});
        for (int c = 0; c < opts.cycles; ++c) {
            if (c > 0) {
                res.trace.push_back(sim.step(res.trace.back().state));
            }
            int steps = 0;
            while (res.trace.back().state.phase != m.scheduler.final_phase) {
                if (++steps > opts.max_steps_per_cycle)
                    throw SimError("cycle " + std::to_string(c + 1) + " exceeded " +
                                   std::to_string(opts.max_steps_per_cycle) + " scheduler steps");
                res.trace.push_back(sim.step(res.trace.back().state));
            }
            for (std::size_t i = 0; i < monitors.size(); ++i) {
                if (!holds(monitors[i], m, cfg, res.trace.back().state)) {
                    res.violated = true;
                    res.violation_step = res.trace.back().step;
                    res.violated_monitor = static_cast<int>(i);
                    return res;
                }
            }
        }
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    return res;
}

namespace {

struct SweepKey {
    GlobalState state;
    std::uint64_t done;
    bool operator==(const SweepKey&) const = default;
};

struct SweepKeyHash {
    std::size_t operator()(const SweepKey& k) const { return GlobalStateHash{}(k.state) ^ (k.done * 0x100000001b3ULL); }
};

} // namespace

std::vector<GlobalState> self_loop_successors(const Model& m, const Configuration& cfg, const GlobalState& s,
                                              int phase, std::size_t cap)
{
    auto all = all_instances(cfg);
    if (all.size() > cap || all.size() > 63)
        throw SimError("exhaustive ordering over " + std::to_string(all.size()) + " instances exceeds the cap of " +
                       std::to_string(cap));
    const std::uint64_t full = (std::uint64_t{1} << all.size()) - 1;
    std::unordered_set<SweepKey, SweepKeyHash> seen;
    std::unordered_set<GlobalState, GlobalStateHash> out;
    std::vector<SweepKey> work{{s, 0}};
    seen.insert(work.back());
    while (!work.empty()) {
        SweepKey k = std::move(work.back());
        work.pop_back();
        if (k.done == full) {
            out.insert(std::move(k.state));
            continue;
        }
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (k.done & (std::uint64_t{1} << i))
                continue;
            ExecResult r = exec_local(m, cfg, k.state, all[i], phase);
            r.state.set_executed(all[i], true);
            SweepKey next{std::move(r.state), k.done | (std::uint64_t{1} << i)};
            if (seen.insert(next).second)
                work.push_back(std::move(next));
        }
    }
    std::vector<GlobalState> v(out.begin(), out.end());
    std::sort(v.begin(), v.end(), [](const GlobalState& a, const GlobalState& b) {
        return std::tie(a.phase, a.values, a.executed) < std::tie(b.phase, b.values, b.executed);
    });
    return v;
}

// --- traces -----------------------------------------------------------------

std::string format_field(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef o, int field)
{
    if (field == kExecutedField)
        return s.is_executed(o) ? "true" : "false";
    const auto& fd = m.classes[static_cast<std::size_t>(o.cls)].fields[static_cast<std::size_t>(field)];
    (void)cfg;
    return format_scalar(m, fd.type, s.get(m, o, field));
}

namespace {

nlohmann::ordered_json scalar_json(const Model& m, const Type& t, std::int64_t v)
{
    switch (t.kind) {
    case TypeKind::Bool: return v != 0;
    case TypeKind::Int: return v;
    case TypeKind::Timer:
        if (v > 0)
            return v;
        return "inactive";
    default: return format_scalar(m, t, v);
    }
}

} // namespace

std::string trace_step_json(const Model& m, const Configuration& cfg, const TraceStep& t)
{
    using J = nlohmann::ordered_json;
    const auto& phases = m.scheduler.phases;
    auto phase_name = [&](int p) { return p >= 0 ? phases[static_cast<std::size_t>(p)] : std::string(); };
    J label;
    switch (t.label.kind) {
    case StepLabel::Kind::Init: label["kind"] = "init"; break;
    case StepLabel::Kind::SelfLoop: {
        label["kind"] = "self-loop";
        label["phase"] = phase_name(t.label.from);
        J order = J::array();
        J fired = J::array();
        for (std::size_t i = 0; i < t.label.order.size(); ++i) {
            ObjRef o = t.label.order[i];
            order.push_back(cfg.name_of(o));
            int f = i < t.label.fired.size() ? t.label.fired[i] : -1;
            if (f < 0)
                fired.push_back(nullptr);
            else
                fired.push_back(m.classes[static_cast<std::size_t>(o.cls)].transitions[static_cast<std::size_t>(f)].name);
        }
        label["order"] = order;
        label["fired"] = fired;
        break;
    }
    case StepLabel::Kind::PhaseChange:
    case StepLabel::Kind::Reset:
        label["kind"] = t.label.kind == StepLabel::Kind::Reset ? "reset" : "phase-change";
        label["from"] = phase_name(t.label.from);
        label["to"] = phase_name(t.label.to);
        break;
    }
    J state = J::object();
    for (ObjRef o : all_instances(cfg)) {
        const auto& cls = m.classes[static_cast<std::size_t>(o.cls)];
        J inst = J::object();
        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
            const auto& fd = cls.fields[f];
            if (fd.is_mutable())
                inst[fd.name] = scalar_json(m, fd.type, t.state.get(m, o, static_cast<int>(f)));
        }
        inst["executed"] = t.state.is_executed(o);
        state[cfg.name_of(o)] = std::move(inst);
    }
    J line;
    line["step"] = t.step;
    line["label"] = std::move(label);
    line["phase"] = phase_name(t.state.phase);
    line["state"] = std::move(state);
    return line.dump();
}

std::string trace_jsonl(const Model& m, const Configuration& cfg, const Trace& trace)
{
    std::string out;
    for (const auto& t : trace)
        out += trace_step_json(m, cfg, t) + "\n";
    return out;
}

} // namespace sra
