#pragma once

#include "sra/frontend/ast.hpp"
#include "sra/frontend/diagnostics.hpp"
#include "sra/frontend/frontend.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sra {

// Name and type resolution of raw parser output against a model. Errors
// produce nodes of unknown type so that resolution continues and later
// errors are still reported.
class Resolver {
public:
    Resolver(const Model& m, Diagnostics& d) : m_(m), d_(d) {}

    ExprPtr expr(const ExprPtr& raw, ExprMode mode, int cls);
    StmtPtr stmt(const StmtPtr& raw, int cls);

private:
    struct Ctx {
        ExprMode mode;
        int cls;
        bool in_old = false;
    };

    const Model& m_;
    Diagnostics& d_;
    std::vector<std::pair<std::string, Type>> scope_;

    ExprPtr resolve(const ExprPtr& e, Ctx& ctx);
    ExprPtr name(const Expr& e, Ctx& ctx);
    ExprPtr field_access(const Expr& e, Ctx& ctx);
    ExprPtr quantifier(const Expr& e, Ctx& ctx);
    ExprPtr equality(const Expr& e, Ctx& ctx);
    ExprPtr error(const SourceSpan& sp);

    bool expect(const ExprPtr& e, TypeKind k, const char* what);
    // Unifies two operand types for ==, != and if-then-else. May wrap an Int
    // operand into a timer.
    bool unify(ExprPtr& a, ExprPtr& b, const SourceSpan& sp);
    // Checks `value` against a field type and applies Int -> Timer coercion.
    ExprPtr coerce_to(const ExprPtr& value, const Type& t, const SourceSpan& sp);

    StmtPtr resolve_stmt(const StmtPtr& s, int cls);
    std::pair<int, int> assign_target(int cls, const std::string& name, const SourceSpan& sp);
};

Model resolve_model(const RawModel& raw, const std::string& file, Diagnostics& d);

} // namespace sra
