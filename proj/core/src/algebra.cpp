#include "stepwise/algebra.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace stepwise {
namespace {

void require_same_shape(const StepwiseProcedure& h1, const StepwiseProcedure& h2, std::string_view what)
{
    if (h1.kind() != h2.kind()) {
        throw std::invalid_argument(std::string(what) + ": operands must both be step-up or both step-down");
    }
    if (h1.transform() != h2.transform()) {
        throw std::invalid_argument(std::string(what) + ": operands read different input transforms");
    }
}

Claim both(Claim a, Claim b)
{
    return (a == Claim::Guaranteed && b == Claim::Guaranteed) ? Claim::Guaranteed : Claim::NotGuaranteed;
}

CompiledProcedure::Info merge_info(const CompiledProcedure::Info& a, const CompiledProcedure::Info& b)
{
    CompiledProcedure::Info out;
    out.m = a.m ? a.m : b.m;
    out.min_m = std::max(a.min_m, b.min_m);
    out.frozen_alpha = a.frozen_alpha ? a.frozen_alpha : b.frozen_alpha;
    out.uses_alpha = a.uses_alpha || b.uses_alpha;
    return out;
}

double resolve_level(const LevelParam& param, const CompileOptions& options, SourceSpan span)
{
    double value = 0.0;
    if (param) {
        value = *param;
    }
    else if (options.alpha) {
        value = *options.alpha;
    }
    else {
        throw ParseError(ParseErrorKind::UnresolvedAlpha, span,
                         "complement needs a constant level: bind 'alpha' or give a number");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ParseError(ParseErrorKind::ParamRange, span, "complement level outside [0,1]");
    }
    return value;
}

CompiledPtr compile_node(const ProcedureExpr& e, const CompileOptions& options);

CompiledPtr compile_builtin(const BuiltinExpr& b, SourceSpan span, const CompileOptions& options)
{
    if (b.name == BuiltinName::TopK) {
        if (b.k == 0) {
            throw ParseError(ParseErrorKind::ParamRange, span, "topk: k must be at least 1");
        }
        if (options.m && b.k > *options.m) {
            throw ParseError(ParseErrorKind::ParamRange, span,
                             "topk: k=" + std::to_string(b.k) + " exceeds m=" + std::to_string(*options.m));
        }
    }
    else if (b.alpha && !(*b.alpha >= 0.0 && *b.alpha <= 1.0)) {
        throw ParseError(ParseErrorKind::ParamRange, span, std::string(to_string(b.name)) + ": level outside [0,1]");
    }
    StepwiseProcedure h = builtin(b.name, BuiltinParams{b.alpha, b.k});
    CompiledProcedure::Info info;
    info.m = options.m;
    info.min_m = b.name == BuiltinName::TopK ? b.k : 1;
    info.uses_alpha = h.threshold().depends_on_alpha();
    // Condition 2 only implies monotonicity for thresholds fixed in p. topk
    // is not monotone: lowering a p-value outside the top k can evict one inside.
    const Claim claim = h.threshold().depends_on_p() ? Claim::NotGuaranteed : Claim::Guaranteed;
    return std::make_shared<const CompiledProcedure>(std::move(h), claim, claim, info);
}

CompiledPtr compile_binary(const BinaryExpr& b, const CompileOptions& options)
{
    if (!b.left || !b.right) {
        throw std::invalid_argument("malformed expression: missing operand");
    }
    CompiledPtr left = compile_node(*b.left, options);
    CompiledPtr right = compile_node(*b.right, options);
    const auto info = merge_info(left->info(), right->info());

    if (b.op == SetOp::Diff) {
        return std::make_shared<const CompiledProcedure>(OutputNode{SetOp::Diff, left, right, std::nullopt},
                                                         Claim::NotGuaranteed, Claim::NotGuaranteed, info);
    }

    const Claim monotonic = both(left->monotonic_claim(), right->monotonic_claim());
    const auto* h1 = left->closed_form();
    const auto* h2 = right->closed_form();
    if (!options.output_level_only && h1 && h2 && h1->kind() == h2->kind() && h1->transform() == h2->transform() &&
        (options.fuse_inexact || fusion_is_exact(b.op, h1->kind()))) {
        StepwiseProcedure fused = b.op == SetOp::Union ? union_same_kind(*h1, *h2) : intersect_same_kind(*h1, *h2);
        const Claim well_behaved = both(left->well_behaved_claim(), right->well_behaved_claim());
        return std::make_shared<const CompiledProcedure>(std::move(fused), monotonic, well_behaved, info);
    }
    return std::make_shared<const CompiledProcedure>(OutputNode{b.op, left, right, std::nullopt}, monotonic,
                                                     Claim::NotGuaranteed, info);
}

CompiledPtr compile_complement(const ComplementExpr& c, SourceSpan span, const CompileOptions& options)
{
    if (!c.child) {
        throw std::invalid_argument("malformed expression: complement without operand");
    }
    const double level = resolve_level(c.alpha, options, span);
    CompiledPtr child = compile_node(*c.child, options);

    CompiledProcedure::Info info = child->info();
    info.uses_alpha = false;
    if (!c.alpha) {
        info.frozen_alpha = level;
    }

    const auto* h = child->closed_form();
    if (!options.output_level_only && h && h->transform() == InputTransform::Identity &&
        !h->threshold().depends_on_p()) {
        return std::make_shared<const CompiledProcedure>(complement(*h, level), Claim::NotGuaranteed,
                                                         Claim::NotGuaranteed, info);
    }
    return std::make_shared<const CompiledProcedure>(OutputNode{SetOp::Complement, child, nullptr, level},
                                                     Claim::NotGuaranteed, Claim::NotGuaranteed, info);
}

CompiledPtr compile_node(const ProcedureExpr& e, const CompileOptions& options)
{
    if (auto* b = std::get_if<BuiltinExpr>(&e.node)) return compile_builtin(*b, e.span, options);
    if (auto* b = std::get_if<BinaryExpr>(&e.node)) {
        if (b->op == SetOp::Complement) {
            throw std::invalid_argument("malformed expression: complement is unary");
        }
        return compile_binary(*b, options);
    }
    return compile_complement(std::get<ComplementExpr>(e.node), e.span, options);
}

} // namespace

StepwiseProcedure union_same_kind(const StepwiseProcedure& h1, const StepwiseProcedure& h2)
{
    require_same_shape(h1, h2, "union");
    return {h1.kind(), pointwise_max(h1.threshold(), h2.threshold()), h1.transform()};
}

StepwiseProcedure intersect_same_kind(const StepwiseProcedure& h1, const StepwiseProcedure& h2)
{
    require_same_shape(h1, h2, "intersect");
    return {h1.kind(), pointwise_min(h1.threshold(), h2.threshold()), h1.transform()};
}

StepwiseProcedure complement(const StepwiseProcedure& h, double alpha0)
{
    if (h.transform() != InputTransform::Identity) {
        throw std::invalid_argument("complement: operand already reads 1 - p");
    }
    const StepKind flipped = h.kind() == StepKind::StepUp ? StepKind::StepDown : StepKind::StepUp;
    return {flipped, reflected(h.threshold(), Level(alpha0)), InputTransform::OneMinus};
}

bool fusion_is_exact(SetOp op, StepKind kind)
{
    return (op == SetOp::Union && kind == StepKind::StepUp) || (op == SetOp::Intersect && kind == StepKind::StepDown);
}

std::string_view to_string(Claim claim)
{
    return claim == Claim::Guaranteed ? "guaranteed" : "not-guaranteed";
}

CompiledProcedure::CompiledProcedure(Strategy strategy, Claim monotonic, Claim well_behaved, Info info)
    : strategy_(std::move(strategy)), monotonic_(monotonic), well_behaved_(well_behaved), info_(info)
{
}

RejectionSet CompiledProcedure::evaluate(const PValueVector& p, Level alpha) const
{
    if (info_.frozen_alpha && alpha.value() != *info_.frozen_alpha) {
        throw std::invalid_argument("procedure was compiled with alpha=" + std::to_string(*info_.frozen_alpha) +
                                    " frozen into a complement; cannot evaluate at alpha=" +
                                    std::to_string(alpha.value()));
    }
    return evaluate_unchecked(*this, p, alpha);
}

RejectionSet evaluate_unchecked(const CompiledProcedure& c, const PValueVector& p, Level alpha)
{
    const auto& info = c.info_;
    if (info.m && p.size() != *info.m) {
        throw std::invalid_argument("procedure compiled for m=" + std::to_string(*info.m) + ", got " +
                                    std::to_string(p.size()) + " p-values");
    }
    if (p.size() < info.min_m) {
        throw std::invalid_argument("procedure needs at least m=" + std::to_string(info.min_m) + " p-values");
    }
    if (const auto* h = c.closed_form()) {
        return h->evaluate(p, alpha);
    }
    const auto& node = std::get<OutputNode>(c.strategy_);
    if (node.op == SetOp::Complement) {
        return evaluate_unchecked(*node.left, p, Level(*node.level)).complemented();
    }
    const RejectionSet a = evaluate_unchecked(*node.left, p, alpha);
    const RejectionSet b = evaluate_unchecked(*node.right, p, alpha);
    switch (node.op) {
    case SetOp::Union: return a.united(b);
    case SetOp::Intersect: return a.intersected(b);
    default: return a.minus(b);
    }
}

CompiledProcedure compile(const ProcedureExpr& expr, const CompileOptions& options)
{
    if (options.m && *options.m == 0) {
        throw std::invalid_argument("m must be positive");
    }
    return *compile_node(expr, options);
}

CompiledProcedure compile_output_level(const ProcedureExpr& expr, CompileOptions options)
{
    options.output_level_only = true;
    return compile(expr, options);
}

RejectionSet eval_compiled(const CompiledProcedure& c, const PValueVector& p, Level alpha)
{
    return c.evaluate(p, alpha);
}

CompiledProcedure as_compiled(StepwiseProcedure h, std::optional<std::size_t> m)
{
    CompiledProcedure::Info info;
    info.m = m;
    info.uses_alpha = h.threshold().depends_on_alpha();
    return CompiledProcedure(std::move(h), Claim::NotGuaranteed, Claim::NotGuaranteed, info);
}

} // namespace stepwise
