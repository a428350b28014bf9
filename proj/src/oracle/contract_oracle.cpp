#include "oracle_util.hpp"
#include "sra/core/symbols.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/eval.hpp"

#include <sstream>

namespace sra {

using namespace detail;

namespace {

constexpr std::size_t kMaxFailures = 20;
constexpr int kPoolSize = 24; // configurations drawn per run

struct Slot {
    ObjRef inst;
    int field; // kExecutedField for the executed flag
};

bool effect_havocs(const StmtPtr& s)
{
    bool found = false;
    for_each_stmt(s, [&](const Stmt& st) { found = found || st.kind == StmtKind::Havoc; });
    return found;
}

GlobalState with_perturbed(const Model& m, const GlobalState& s, const Slot& slot, bool& changed)
{
    GlobalState out = s;
    if (slot.field == kExecutedField) {
        out.set_executed(slot.inst, !s.is_executed(slot.inst));
        changed = true;
        return out;
    }
    const auto& fd =
        m.classes[static_cast<std::size_t>(slot.inst.cls)].fields[static_cast<std::size_t>(slot.field)];
    std::int64_t v = s.get(m, slot.inst, slot.field);
    std::int64_t w = perturb(m, fd.type, v);
    changed = w != v;
    out.set(m, slot.inst, slot.field, w);
    return out;
}

class Sampler {
public:
    Sampler(const Model& m, const ExecContractFn& exec) : m_(m), exec_(exec), loops_(self_loop_phases(m))
    {
        for (std::size_t c = 0; c < m.classes.size(); ++c)
            for (int p : loops_)
                exec_pairs_.emplace_back(static_cast<int>(c), p);
    }

    void run(std::uint64_t seed, const Configuration& cfg, ContractOracleReport& rep)
    {
        seed_ = seed;
        rng_.seed(seed);
        cfg_ = &cfg;
        double u = std::uniform_real_distribution<double>(0, 1)(rng_);
        std::vector<ObjRef> insts = all_instances(cfg);
        if (insts.empty()) {
            ++rep.samples, ++rep.sound, ++rep.precise;
            return;
        }
        if (u < 0.1 || exec_pairs_.empty())
            init_sample(insts, rep);
        else if (u < 0.2)
            tick_sample(insts, rep);
        else
            exec_sample(rep);
    }

private:
    const Model& m_;
    const ExecContractFn& exec_;
    std::vector<int> loops_;
    std::vector<std::pair<int, int>> exec_pairs_;
    std::mt19937_64 rng_;
    std::uint64_t seed_ = 0;
    const Configuration* cfg_ = nullptr;

    void fail(ContractOracleReport& rep, const Contract& k, const std::string& why)
    {
        if (rep.failures.size() < kMaxFailures)
            rep.failures.push_back({seed_, contract_name(m_, k), why});
    }

    bool eval(const ExprPtr& f, const GlobalState& post, const GlobalState* pre, ObjRef self)
    {
        return holds(f, m_, *cfg_, post, pre, self);
    }

    // Every slot in `slots` perturbed must falsify `f`.
    bool rejects_perturbations(const ExprPtr& f, const GlobalState& post, const GlobalState* pre, ObjRef self,
                               const std::vector<Slot>& slots, std::string& why)
    {
        for (const Slot& slot : slots) {
            bool changed = false;
            GlobalState bad = with_perturbed(m_, post, slot, changed);
            if (changed && eval(f, bad, pre, self)) {
                why = "accepts perturbed " + cfg_->name_of(slot.inst) + "." +
                      (slot.field == kExecutedField
                           ? std::string("executed")
                           : m_.classes[static_cast<std::size_t>(slot.inst.cls)]
                                 .fields[static_cast<std::size_t>(slot.field)]
                                 .name);
                return false;
            }
        }
        return true;
    }

    GlobalState pre_state(int phase)
    {
        if (coin(rng_))
            return random_state(m_, *cfg_, rng_, {phase});
        RandomInputs inputs(rng_());
        Simulator sim(m_, *cfg_, OrderPolicy::seeded(rng_()), inputs, random_havoc(rng_()));
        GlobalState s = sim.init();
        int steps = static_cast<int>(draw(rng_, 0, 30));
        try {
            for (int i = 0; i < steps; ++i)
                s = sim.step(s).state;
        } catch (const SimError&) {
        }
        s.phase = phase;
        return s;
    }

    void exec_sample(ContractOracleReport& rep)
    {
        auto [cls, phase] = pick(rng_, exec_pairs_);
        ++rep.samples;
        Contract k = exec_(m_, cls, phase);
        if (cfg_->instances[static_cast<std::size_t>(cls)].empty()) {
            ++rep.sound, ++rep.precise;
            return;
        }
        ObjRef self{cls, static_cast<int>(draw(rng_, 0, static_cast<std::int64_t>(cfg_->instances[cls].size()) - 1))};
        GlobalState pre = pre_state(phase);
        ExecResult r = exec_local(m_, *cfg_, pre, self, phase, random_havoc(rng_()));
        r.state.set_executed(self, true);
        const GlobalState& post = r.state;

        if (!eval(k.formula, post, &pre, self)) {
            fail(rep, k, "post-state of " + describe(self, r.fired) + " violates the contract");
            return;
        }
        ++rep.sound;

        int satisfied = 0;
        int which = -2;
        for (const auto& [t, d] : k.disjuncts) {
            if (eval(d, post, &pre, self)) {
                ++satisfied;
                which = t;
            }
        }
        if (satisfied != 1 || which != r.fired) {
            fail(rep, k, std::to_string(satisfied) + " disjuncts hold for " + describe(self, r.fired));
            return;
        }

        const auto& c = m_.classes[static_cast<std::size_t>(cls)];
        std::set<FieldRef> loose;
        if (r.fired >= 0 && effect_havocs(c.transitions[static_cast<std::size_t>(r.fired)].effect))
            loose = written_fields(c.transitions[static_cast<std::size_t>(r.fired)].effect);
        std::vector<Slot> slots{{self, kExecutedField}};
        for (int f : c.mutable_fields)
            if (!loose.count({cls, f}))
                slots.push_back({self, f});
        for (FieldRef ref : write_footprint(m_, cls, phase)) {
            if (ref.cls == cls || ref.field == kExecutedField || loose.count(ref))
                continue;
            for (std::size_t i = 0; i < cfg_->instances[static_cast<std::size_t>(ref.cls)].size(); ++i)
                slots.push_back({{ref.cls, static_cast<int>(i)}, ref.field});
        }
        std::string why;
        if (!rejects_perturbations(k.formula, post, &pre, self, slots, why)) {
            fail(rep, k, why + " after " + describe(self, r.fired));
            return;
        }
        ++rep.precise;
    }

    void init_sample(const std::vector<ObjRef>& insts, ContractOracleReport& rep)
    {
        ++rep.samples;
        ObjRef self = pick(rng_, insts);
        Contract k = init_contract(m_, self.cls);
        RandomInputs inputs(rng_());
        GlobalState s = init_state(m_, *cfg_, inputs);
        if (!eval(k.formula, s, nullptr, self)) {
            fail(rep, k, "initial state of " + cfg_->name_of(self) + " violates the contract");
            return;
        }
        ++rep.sound;
        const auto& c = m_.classes[static_cast<std::size_t>(self.cls)];
        std::vector<Slot> slots{{self, kExecutedField}};
        for (int f : c.mutable_fields) {
            const auto& fd = c.fields[static_cast<std::size_t>(f)];
            if ((fd.kind == FieldKind::Var && fd.init) || fd.kind == FieldKind::Event || fd.kind == FieldKind::Timer)
                slots.push_back({self, f});
        }
        std::string why;
        if (!rejects_perturbations(k.formula, s, nullptr, self, slots, why)) {
            fail(rep, k, why);
            return;
        }
        ++rep.precise;
    }

    void tick_sample(const std::vector<ObjRef>& insts, ContractOracleReport& rep)
    {
        ++rep.samples;
        ObjRef self = pick(rng_, insts);
        Contract k = tick_contract(m_, self.cls);
        int lf = m_.scheduler.final_phase;
        GlobalState pre = random_state(m_, *cfg_, rng_, {lf >= 0 ? lf : 0});
        GlobalState post = pre;
        for (ObjRef o : insts)
            tick(m_, post, o);
        if (!eval(k.formula, post, &pre, self)) {
            fail(rep, k, "tick of " + cfg_->name_of(self) + " violates the contract");
            return;
        }
        ++rep.sound;
        std::vector<Slot> slots;
        for (int f : m_.classes[static_cast<std::size_t>(self.cls)].mutable_fields)
            slots.push_back({self, f});
        std::string why;
        if (!rejects_perturbations(k.formula, post, &pre, self, slots, why)) {
            fail(rep, k, why);
            return;
        }
        ++rep.precise;
    }

    std::string describe(ObjRef self, int fired) const
    {
        const auto& c = m_.classes[static_cast<std::size_t>(self.cls)];
        return cfg_->name_of(self) + " (" +
               (fired < 0 ? std::string("stutter") : c.transitions[static_cast<std::size_t>(fired)].name) + ")";
    }
};

} // namespace

ContractOracleReport contract_vs_simulator(const Model& m, int samples, std::uint64_t seed,
                                           const ExecContractFn& exec, const RandomConfigOptions& cfg_opts)
{
    ContractOracleReport rep;
    if (samples <= 0)
        return rep;
    std::vector<Configuration> pool;
    std::mt19937_64 rng(seed);
    try {
        for (int i = 0; i < std::min(samples, kPoolSize); ++i)
            pool.push_back(random_configuration(m, rng, cfg_opts));
    } catch (const std::exception& e) {
        rep.failures.push_back({seed, "", e.what()});
        return rep;
    }
    Sampler sampler(m, exec);
    for (int i = 0; i < samples; ++i) {
        std::uint64_t s = splitmix(seed + static_cast<std::uint64_t>(i));
        try {
            sampler.run(s, pool[s % pool.size()], rep);
        } catch (const std::exception& e) {
            if (rep.failures.size() < kMaxFailures)
                rep.failures.push_back({s, "", e.what()});
        }
    }
    return rep;
}

} // namespace sra
