#include "sra/core/stmt.hpp"

namespace sra {

bool structurally_equal(const StmtPtr& a, const StmtPtr& b)
{
    if (!a || !b)
        return !a && !b;
    if (a->kind != b->kind || a->target != b->target || a->cls != b->cls || a->field != b->field ||
        a->var != b->var || !(a->var_type == b->var_type))
        return false;
    if (!structurally_equal(a->range, b->range) || !structurally_equal(a->object, b->object) ||
        !structurally_equal(a->value, b->value) || !structurally_equal(a->cond, b->cond))
        return false;
    if (a->body.size() != b->body.size())
        return false;
    for (std::size_t i = 0; i < a->body.size(); ++i)
        if (!structurally_equal(a->body[i], b->body[i]))
            return false;
    return true;
}

namespace build {

StmtPtr skip()
{
    static const StmtPtr s = std::make_shared<Stmt>();
    return s;
}

StmtPtr seq(std::vector<StmtPtr> parts)
{
    std::vector<StmtPtr> flat;
    for (auto& p : parts) {
        if (!p || p->kind == StmtKind::Skip)
            continue;
        if (p->kind == StmtKind::Seq)
            flat.insert(flat.end(), p->body.begin(), p->body.end());
        else
            flat.push_back(std::move(p));
    }
    if (flat.empty())
        return skip();
    if (flat.size() == 1)
        return flat.front();
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Seq;
    s->body = std::move(flat);
    return s;
}

StmtPtr assign(int cls, int field, const std::string& target, ExprPtr value)
{
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Assign;
    s->cls = cls;
    s->field = field;
    s->target = target;
    s->value = std::move(value);
    return s;
}

StmtPtr havoc_stmt(int cls, int field, const std::string& target)
{
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Havoc;
    s->cls = cls;
    s->field = field;
    s->target = target;
    return s;
}

StmtPtr if_stmt(ExprPtr cond, StmtPtr then_s, StmtPtr else_s)
{
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::If;
    s->cond = std::move(cond);
    s->body = {then_s ? then_s : skip(), else_s ? else_s : skip()};
    return s;
}

StmtPtr forall_assign(const std::string& var, const Type& var_type, ExprPtr range, int cls, int field,
                      const std::string& target, ExprPtr value)
{
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::ForallAssign;
    s->var = var;
    s->var_type = var_type;
    s->range = std::move(range);
    s->cls = cls;
    s->field = field;
    s->target = target;
    s->value = std::move(value);
    return s;
}

StmtPtr field_assign(ExprPtr object, int cls, int field, const std::string& target, ExprPtr value)
{
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::FieldAssign;
    s->object = std::move(object);
    s->cls = cls;
    s->field = field;
    s->target = target;
    s->value = std::move(value);
    return s;
}

} // namespace build

} // namespace sra
