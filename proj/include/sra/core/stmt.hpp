#pragma once

#include "sra/core/expr.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sra {

enum class StmtKind : std::uint8_t {
    Skip,
    Assign,       // own field := value
    Havoc,        // own field := *
    If,           // cond, body = {then, else}
    ForallAssign, // forall var in range { var.target := value; }
    FieldAssign,  // object.target := value (produced by grounding)
    Assume,
    Assert,
    Seq,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Skip;
    std::string target; // assigned field name
    int cls = -1;       // class owning the assigned field
    int field = -1;     // index of the assigned field in cls
    std::string var;    // ForallAssign bound variable
    Type var_type;
    ExprPtr range;  // ForallAssign set expression
    ExprPtr object; // FieldAssign target object
    ExprPtr value;  // right-hand side (Assign, ForallAssign, FieldAssign)
    ExprPtr cond;   // If, Assume, Assert
    std::vector<StmtPtr> body;
    SourceSpan span;
};

bool structurally_equal(const StmtPtr& a, const StmtPtr& b);

namespace build {

StmtPtr skip();
StmtPtr seq(std::vector<StmtPtr> parts);
StmtPtr assign(int cls, int field, const std::string& target, ExprPtr value);
StmtPtr havoc_stmt(int cls, int field, const std::string& target);
StmtPtr if_stmt(ExprPtr cond, StmtPtr then_s, StmtPtr else_s);
StmtPtr forall_assign(const std::string& var, const Type& var_type, ExprPtr range, int cls, int field,
                      const std::string& target, ExprPtr value);
StmtPtr field_assign(ExprPtr object, int cls, int field, const std::string& target, ExprPtr value);

} // namespace build

// Pre-order visit of every statement in `s`.
template <typename F>
void for_each_stmt(const StmtPtr& s, F&& f)
{
    if (!s)
        return;
    f(*s);
    for (const auto& c : s->body)
        for_each_stmt(c, f);
}

} // namespace sra
