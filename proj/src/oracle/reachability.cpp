#include "oracle_util.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/eval.hpp"

#include <deque>
#include <unordered_set>

namespace sra {

using namespace detail;

namespace {

struct InputSlot {
    ObjRef inst;
    int field;
    std::vector<std::int64_t> domain;
};

using Valuation = std::vector<std::int64_t>;

std::vector<InputSlot> input_slots(const Model& m, const Configuration& cfg)
{
    std::vector<InputSlot> out;
    for (ObjRef o : all_instances(cfg)) {
        const auto& cls = m.classes[static_cast<std::size_t>(o.cls)];
        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
            const auto& fd = cls.fields[f];
            if (fd.kind != FieldKind::Input)
                continue;
            InputSlot slot{o, static_cast<int>(f), {}};
            std::int64_t n = domain_size(m, fd.type);
            if (n > 0) {
                for (std::int64_t v = 0; v < n; ++v)
                    slot.domain.push_back(v);
            } else {
                slot.domain = {-1, 0, 1};
            }
            out.push_back(std::move(slot));
        }
    }
    return out;
}

std::vector<Valuation> valuations(const std::vector<InputSlot>& slots, const ReachOptions& opts)
{
    double total = 1;
    for (const auto& s : slots)
        total *= static_cast<double>(s.domain.size());
    std::vector<Valuation> out;
    if (total <= static_cast<double>(opts.max_input_combinations)) {
        Valuation v(slots.size(), 0);
        std::vector<std::size_t> idx(slots.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < slots.size(); ++i)
                v[i] = slots[i].domain[idx[i]];
            out.push_back(v);
            std::size_t i = 0;
            while (i < slots.size() && ++idx[i] == slots[i].domain.size())
                idx[i++] = 0;
            if (i == slots.size())
                break;
        }
        return out;
    }
    std::mt19937_64 rng(opts.seed);
    for (int k = 0; k < opts.input_samples; ++k) {
        Valuation v;
        for (const auto& s : slots)
            v.push_back(pick(rng, s.domain));
        out.push_back(std::move(v));
    }
    return out;
}

struct Node {
    GlobalState state;
    int cycle = 0;
    int parent = -1;
    StepLabel label;
};

struct Key {
    GlobalState state;
    int cycle;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const
    {
        return GlobalStateHash{}(k.state) * 31 + static_cast<std::size_t>(k.cycle);
    }
};

} // namespace

ReachReport bounded_reachability_check(const Model& m, const Configuration& cfg, const ExprPtr& inv,
                                       const ExprPtr& prop, const ReachOptions& opts)
{
    ReachReport rep;
    const auto& sched = m.scheduler;
    auto slots = input_slots(m, cfg);
    auto vals = valuations(slots, opts);
    auto apply = [&](GlobalState& s, const Valuation& v) {
        for (std::size_t i = 0; i < slots.size(); ++i)
            s.set(m, slots[i].inst, slots[i].field, v[i]);
    };

    std::vector<Node> nodes;
    std::unordered_set<Key, KeyHash> seen;
    std::deque<int> work;
    auto push = [&](GlobalState s, int cycle, int parent, StepLabel label) {
        Key k{s, cycle};
        if (!seen.insert(std::move(k)).second)
            return;
        nodes.push_back({std::move(s), cycle, parent, std::move(label)});
        work.push_back(static_cast<int>(nodes.size()) - 1);
    };
    auto trace_to = [&](int i) {
        Trace t;
        for (int j = i; j >= 0; j = nodes[static_cast<std::size_t>(j)].parent)
            t.push_back({0, nodes[static_cast<std::size_t>(j)].label, nodes[static_cast<std::size_t>(j)].state});
        std::reverse(t.begin(), t.end());
        for (std::size_t k = 0; k < t.size(); ++k)
            t[k].step = static_cast<int>(k);
        return t;
    };

    try {
        NoInputs none;
        GlobalState base = init_state(m, cfg, none);
        for (const auto& v : vals) {
            GlobalState s = base;
            apply(s, v);
            push(std::move(s), 0, -1, StepLabel{});
        }
        while (!work.empty()) {
            if (nodes.size() > opts.max_states) {
                rep.error = "state limit of " + std::to_string(opts.max_states) + " exceeded";
                break;
            }
            int i = work.front();
            work.pop_front();
            const GlobalState s = nodes[static_cast<std::size_t>(i)].state;
            const int cycle = nodes[static_cast<std::size_t>(i)].cycle;
            ++rep.states;
            if (inv && !holds(inv, m, cfg, s)) {
                rep.violation = ReachViolation{"invariant", trace_to(i)};
                break;
            }
            if (s.phase == sched.final_phase) {
                ++rep.lf_states;
                if (prop && !holds(prop, m, cfg, s)) {
                    rep.violation = ReachViolation{"property", trace_to(i)};
                    break;
                }
                if (cycle + 1 >= opts.cycles)
                    continue;
                StepLabel label{StepLabel::Kind::Reset, s.phase, sched.initial, {}, {}};
                for (const auto& v : vals) {
                    GlobalState t = s;
                    t.phase = sched.initial;
                    apply(t, v);
                    push(std::move(t), cycle + 1, i, label);
                }
                continue;
            }
            int k = enabled_scheduler_transition(m, cfg, s);
            if (k < 0) {
                rep.error = "scheduler deadlock in phase " + sched.phases[static_cast<std::size_t>(s.phase)];
                rep.violation = ReachViolation{"deadlock", trace_to(i)};
                break;
            }
            const auto& tr = sched.transitions[static_cast<std::size_t>(k)];
            if (tr.self_loop()) {
                StepLabel label{StepLabel::Kind::SelfLoop, s.phase, s.phase, {}, {}};
                for (auto& t : self_loop_successors(m, cfg, s, s.phase, opts.exhaustive_cap))
                    push(std::move(t), cycle, i, label);
            } else {
                GlobalState t = s;
                change_phase(m, cfg, t, tr.to_index);
                push(std::move(t), cycle, i, StepLabel{StepLabel::Kind::PhaseChange, tr.from_index, tr.to_index, {}, {}});
            }
        }
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

} // namespace sra
