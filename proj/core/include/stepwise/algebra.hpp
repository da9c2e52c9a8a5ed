#pragma once

#include "stepwise/expr.hpp"
#include "stepwise/procedure.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

namespace stepwise {

/// Step-up (or step-down) procedure with threshold max(tau1, tau2).
/// For step-up operands the result rejects exactly h1 ∪ h2. For step-down
/// operands it does so only when one threshold dominates the other.
/// Throws std::invalid_argument on kind or transform mismatch.
StepwiseProcedure union_same_kind(const StepwiseProcedure& h1, const StepwiseProcedure& h2);

/// Same with min(tau1, tau2). Exact for step-down operands; for step-up
/// operands exact only when one threshold dominates the other.
StepwiseProcedure intersect_same_kind(const StepwiseProcedure& h1, const StepwiseProcedure& h2);

/// Complement at the constant level alpha0: the kind flips, the threshold
/// becomes i -> 1 - tau_alpha0(m + 1 - i) and the procedure reads 1 - p.
/// Agrees with {1..m} \ h(p, alpha0) whenever no p_(i) equals tau_alpha0(i).
/// Throws std::invalid_argument when h already reads 1 - p.
StepwiseProcedure complement(const StepwiseProcedure& h, double alpha0);

/// True when the pointwise max/min fusion of two same-kind procedures is
/// exact for every pair of thresholds.
bool fusion_is_exact(SetOp op, StepKind kind);

enum class Claim { Guaranteed, NotGuaranteed };

std::string_view to_string(Claim claim);

class CompiledProcedure;
using CompiledPtr = std::shared_ptr<const CompiledProcedure>;

/// Set operation applied to the rejection sets of compiled children.
struct OutputNode {
    SetOp op;
    CompiledPtr left;
    CompiledPtr right;           // empty for Complement
    std::optional<double> level; // Complement: level the child is evaluated at
};

/// Result of compile(): a single stepwise procedure when a closed form is
/// available, otherwise an output-level evaluation tree.
class CompiledProcedure {
public:
    using Strategy = std::variant<StepwiseProcedure, OutputNode>;

    struct Info {
        std::optional<std::size_t> m;       // fixed m, if compiled for one
        std::size_t min_m = 1;              // largest topk k in the tree
        std::optional<double> frozen_alpha; // binding captured by a complement
        bool uses_alpha = false;            // result depends on the runtime level
    };

    CompiledProcedure(Strategy strategy, Claim monotonic, Claim well_behaved, Info info);

    bool is_closed_form() const noexcept { return std::holds_alternative<StepwiseProcedure>(strategy_); }
    const StepwiseProcedure* closed_form() const noexcept { return std::get_if<StepwiseProcedure>(&strategy_); }
    const OutputNode* output_node() const noexcept { return std::get_if<OutputNode>(&strategy_); }

    Claim monotonic_claim() const noexcept { return monotonic_; }
    Claim well_behaved_claim() const noexcept { return well_behaved_; }
    const Info& info() const noexcept { return info_; }

    /// Throws std::invalid_argument when p does not fit the compiled m, or
    /// when alpha differs from a frozen complement binding.
    RejectionSet evaluate(const PValueVector& p, Level alpha) const;

private:
    friend RejectionSet evaluate_unchecked(const CompiledProcedure& c, const PValueVector& p, Level alpha);

    Strategy strategy_;
    Claim monotonic_;
    Claim well_behaved_;
    Info info_;
};

/// Evaluation without the frozen-alpha check, as used for subtrees.
RejectionSet evaluate_unchecked(const CompiledProcedure& c, const PValueVector& p, Level alpha);

struct CompileOptions {
    std::optional<double> alpha;   // binding for 'alpha' inside complement
    std::optional<std::size_t> m;
    /// Fuse every same-kind union/intersection by max/min, as the
    /// construction is usually stated, even where the result is not the set operation.
    bool fuse_inexact = false;
    /// Keep every set operation at output level (the oracle form).
    bool output_level_only = false;
};

/// Leaves: built-ins with p-independent thresholds are Guaranteed/Guaranteed;
/// p-dependent ones (topk) carry no claims.
///
/// Bottom-up closure table:
///   union of step-ups, intersection of step-downs (same transform) -> closed form
///   complement of an alpha-fixed, p-independent closed form        -> closed form
///   everything else                                                 -> output level
/// Throws ParseError (UnresolvedAlpha, ParamRange) and std::invalid_argument.
CompiledProcedure compile(const ProcedureExpr& expr, const CompileOptions& options = {});

/// compile() with output_level_only set.
CompiledProcedure compile_output_level(const ProcedureExpr& expr, CompileOptions options = {});

RejectionSet eval_compiled(const CompiledProcedure& c, const PValueVector& p, Level alpha);

/// Wraps a hand-built procedure so the checkers can run on it. Claims are
/// NotGuaranteed since nothing is known about the threshold.
CompiledProcedure as_compiled(StepwiseProcedure h, std::optional<std::size_t> m = std::nullopt);

} // namespace stepwise
