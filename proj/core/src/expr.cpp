#include "stepwise/expr.hpp"

namespace stepwise {

std::string_view to_string(ParseErrorKind kind)
{
    switch (kind) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UnknownBuiltin: return "UnknownBuiltin";
    case ParseErrorKind::Arity: return "Arity";
    case ParseErrorKind::ParamRange: return "ParamRange";
    case ParseErrorKind::UnresolvedAlpha: return "UnresolvedAlpha";
    }
    return "?";
}

std::string_view to_string(SetOp op)
{
    switch (op) {
    case SetOp::Union: return "union";
    case SetOp::Intersect: return "intersect";
    case SetOp::Diff: return "diff";
    case SetOp::Complement: return "complement";
    }
    return "?";
}

bool structurally_equal(const ProcedureExpr& a, const ProcedureExpr& b)
{
    if (a.node.index() != b.node.index()) return false;
    if (auto* x = std::get_if<BuiltinExpr>(&a.node)) {
        const auto& y = std::get<BuiltinExpr>(b.node);
        if (x->name != y.name) return false;
        if (x->name == BuiltinName::TopK) return x->k == y.k;
        return x->alpha == y.alpha;
    }
    if (auto* x = std::get_if<BinaryExpr>(&a.node)) {
        const auto& y = std::get<BinaryExpr>(b.node);
        return x->op == y.op && structurally_equal(*x->left, *y.left) && structurally_equal(*x->right, *y.right);
    }
    const auto& x = std::get<ComplementExpr>(a.node);
    const auto& y = std::get<ComplementExpr>(b.node);
    return x.alpha == y.alpha && structurally_equal(*x.child, *y.child);
}

bool uses_symbolic_alpha(const ProcedureExpr& e)
{
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BuiltinExpr>) {
                return n.name != BuiltinName::TopK && !n.alpha;
            }
            else if constexpr (std::is_same_v<T, BinaryExpr>) {
                return uses_symbolic_alpha(*n.left) || uses_symbolic_alpha(*n.right);
            }
            else {
                return !n.alpha || uses_symbolic_alpha(*n.child);
            }
        },
        e.node);
}

namespace expr {

ExprPtr builtin(BuiltinName name, LevelParam alpha)
{
    return std::make_shared<const ProcedureExpr>(ProcedureExpr{BuiltinExpr{name, alpha, 0}, {}});
}

ExprPtr topk(std::size_t k)
{
    return std::make_shared<const ProcedureExpr>(ProcedureExpr{BuiltinExpr{BuiltinName::TopK, std::nullopt, k}, {}});
}

ExprPtr union_of(ExprPtr a, ExprPtr b)
{
    return std::make_shared<const ProcedureExpr>(ProcedureExpr{BinaryExpr{SetOp::Union, std::move(a), std::move(b)}, {}});
}

ExprPtr intersect(ExprPtr a, ExprPtr b)
{
    return std::make_shared<const ProcedureExpr>(
        ProcedureExpr{BinaryExpr{SetOp::Intersect, std::move(a), std::move(b)}, {}});
}

ExprPtr diff(ExprPtr a, ExprPtr b)
{
    return std::make_shared<const ProcedureExpr>(ProcedureExpr{BinaryExpr{SetOp::Diff, std::move(a), std::move(b)}, {}});
}

ExprPtr complement(ExprPtr child, LevelParam alpha)
{
    return std::make_shared<const ProcedureExpr>(ProcedureExpr{ComplementExpr{std::move(child), alpha}, {}});
}

} // namespace expr

} // namespace stepwise
