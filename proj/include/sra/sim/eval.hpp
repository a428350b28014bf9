#pragma once

#include "sra/core/state.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sra {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Concrete evaluation of expressions over a configuration and a state.
// `pre` supplies the values read under old(); `self` is the executing instance
// for class-context expressions.
class Evaluator {
public:
    Evaluator(const Model& m, const Configuration& cfg, const GlobalState& s, const GlobalState* pre = nullptr,
              ObjRef self = {})
        : m_(m), cfg_(cfg), cur_(&s), pre_(pre), self_(self)
    {
    }

    Value eval(const ExprPtr& e);
    bool holds(const ExprPtr& e) { return eval(e).truthy(); }
    void bind(const std::string& name, Value v) { env_.emplace_back(name, std::move(v)); }

private:
    const Model& m_;
    const Configuration& cfg_;
    const GlobalState* cur_;
    const GlobalState* pre_;
    ObjRef self_;
    std::vector<std::pair<std::string, Value>> env_;

    Value lookup(const std::string& name) const;
    Value field(const Expr& e);
    Value quantifier(const Expr& e);
    std::vector<int> all_of(int cls) const;
};

Value evaluate(const ExprPtr& e, const Model& m, const Configuration& cfg, const GlobalState& s,
               const GlobalState* pre = nullptr, ObjRef self = {});
bool holds(const ExprPtr& e, const Model& m, const Configuration& cfg, const GlobalState& s,
           const GlobalState* pre = nullptr, ObjRef self = {});

// Value equality as the language defines it: objects by identity (null equals
// null), sets by membership.
bool value_equal(const Value& a, const Value& b);

// Number of values of a finite scalar type (Bool, Enum); 0 for other types.
std::int64_t domain_size(const Model& m, const Type& t);

} // namespace sra
