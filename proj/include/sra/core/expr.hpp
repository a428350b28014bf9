#pragma once

#include "sra/core/source.hpp"
#include "sra/core/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace sra {

enum class Op : std::uint8_t {
    IntLit,
    BoolLit,
    EnumLit,
    NullLit,
    Inactive,
    Name,   // unresolved identifier, parser output only
    AllAny, // `All` before desugaring, parser output only
    Var,    // bound variable
    Self,   // the executing instance in class context
    Field,  // args[0].name
    AllSet, // All_C
    Phase,  // scheduler phase
    Havoc,  // unconstrained value, symbolic maps only
    Neg,
    Add,
    Sub,
    Mul,
    Ite,
    Card,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Subset,
    Disjoint,
    Union,
    Forall,       // name = bound variable, args = {range, body}
    Exists,       // name = bound variable, args = {range, body}
    ScalarForall, // name = bound variable, args = {body}; unbounded over binder_type
    Old,
    TimerFromInt,
    TimerActive,
    TimerCount,
};

inline constexpr int kExecutedField = -2;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Resolution data (cls, field) is filled by the
// checker or by the builders; spans are informational only and are ignored by
// structural equality.
struct Expr {
    Op op = Op::BoolLit;
    Type type;
    std::int64_t value = 0; // literal value, enum ordinal
    std::string name;       // identifier, field name, enum literal, bound variable
    int cls = -1;           // owning class of Field, class of AllSet/Self
    int field = -1;         // field index within cls, or kExecutedField
    Type binder_type;       // type of the bound variable for quantifiers
    std::vector<ExprPtr> args;
    SourceSpan span;
};

bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

bool is_true(const ExprPtr& e);
bool is_false(const ExprPtr& e);

// Builders. Conjunction/disjunction flatten nested nodes and drop neutral
// elements so that printed formulas re-parse to the same tree.
namespace build {

ExprPtr int_lit(std::int64_t v);
ExprPtr bool_lit(bool b);
ExprPtr true_();
ExprPtr false_();
ExprPtr enum_lit(const std::string& enum_name, const std::string& literal, std::int64_t ordinal);
ExprPtr null_lit(const std::string& cls);
ExprPtr inactive();
ExprPtr havoc(const Type& t);
ExprPtr var(const std::string& name, const Type& t);
ExprPtr self(const std::string& cls_name, int cls);
ExprPtr field(ExprPtr obj, int cls, int field, const std::string& name, const Type& t);
ExprPtr executed(ExprPtr obj, int cls);
ExprPtr all_set(const std::string& cls_name, int cls);
ExprPtr phase();
ExprPtr unary(Op op, ExprPtr a, const Type& t);
ExprPtr binary(Op op, ExprPtr a, ExprPtr b, const Type& t);
ExprPtr neg(ExprPtr a);
ExprPtr not_(ExprPtr a);
ExprPtr conj(std::vector<ExprPtr> parts);
ExprPtr conj(ExprPtr a, ExprPtr b);
ExprPtr disj(std::vector<ExprPtr> parts);
ExprPtr disj(ExprPtr a, ExprPtr b);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr iff(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr ne(ExprPtr a, ExprPtr b);
ExprPtr cmp(Op op, ExprPtr a, ExprPtr b);
ExprPtr arith(Op op, ExprPtr a, ExprPtr b);
ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr card(ExprPtr set);
ExprPtr member(ExprPtr obj, ExprPtr set);
ExprPtr set_union(ExprPtr a, ExprPtr b);
ExprPtr forall(const std::string& v, const Type& vt, ExprPtr range, ExprPtr body);
ExprPtr exists(const std::string& v, const Type& vt, ExprPtr range, ExprPtr body);
ExprPtr scalar_forall(const std::string& v, const Type& vt, ExprPtr body);
ExprPtr old(ExprPtr e);
ExprPtr timer_from_int(ExprPtr e);
ExprPtr timer_active(ExprPtr t);
ExprPtr timer_count(ExprPtr t);

// Copy of `e` with replaced children.
ExprPtr with_args(const Expr& e, std::vector<ExprPtr> args);

} // namespace build

} // namespace sra
