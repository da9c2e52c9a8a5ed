#include "stepwise/procedure.hpp"

#include <optional>

namespace stepwise {
namespace {

// Applies the stepwise rule to `compared` with per-rank critical values `tau`.
RejectionSet apply_rule(StepKind kind, std::span<const double> compared, const std::vector<double>& tau)
{
    const SortedView x(compared);
    const std::size_t m = x.size();
    std::vector<std::size_t> rejected;

    if (kind == StepKind::StepUp) {
        std::optional<double> cut;
        for (std::size_t j = m; j >= 1; --j) {
            if (x.value(j) <= tau[j - 1]) {
                cut = x.value(j);
                break;
            }
        }
        if (!cut) {
            return RejectionSet::from_indices({}, m);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (compared[i] <= *cut) rejected.push_back(i + 1);
        }
    }
    else {
        std::optional<double> cut;
        for (std::size_t j = 1; j <= m; ++j) {
            if (x.value(j) > tau[j - 1]) {
                cut = x.value(j);
                break;
            }
        }
        if (!cut) {
            return RejectionSet::all(m);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (compared[i] < *cut) rejected.push_back(i + 1);
        }
    }
    return RejectionSet::from_indices(std::move(rejected), m);
}

} // namespace

std::string_view to_string(StepKind kind)
{
    return kind == StepKind::StepUp ? "step-up" : "step-down";
}

std::string_view to_string(InputTransform transform)
{
    return transform == InputTransform::Identity ? "identity" : "one-minus";
}

RejectionSet eval_step_up(const ThresholdFunction& tau, const PValueVector& p, Level alpha)
{
    return apply_rule(StepKind::StepUp, p.values(), tau.values(alpha, SortedView(p)));
}

RejectionSet eval_step_down(const ThresholdFunction& tau, const PValueVector& p, Level alpha)
{
    return apply_rule(StepKind::StepDown, p.values(), tau.values(alpha, SortedView(p)));
}

StepwiseProcedure::StepwiseProcedure(StepKind kind, ThresholdFunction threshold, InputTransform transform)
    : kind_(kind), threshold_(std::move(threshold)), transform_(transform)
{
}

RejectionSet StepwiseProcedure::evaluate(const PValueVector& p, Level alpha) const
{
    const auto tau = threshold_.values(alpha, SortedView(p));
    if (transform_ == InputTransform::Identity) {
        return apply_rule(kind_, p.values(), tau);
    }
    const PValueVector flipped = p.one_minus();
    return apply_rule(kind_, flipped.values(), tau);
}

std::vector<double> StepwiseProcedure::p_scale_thresholds(const PValueVector& p, Level alpha) const
{
    auto tau = threshold_.values(alpha, SortedView(p));
    if (transform_ == InputTransform::OneMinus) {
        const std::size_t m = tau.size();
        std::vector<double> mapped(m);
        for (std::size_t r = 1; r <= m; ++r) {
            mapped[r - 1] = 1.0 - tau[m - r];
        }
        return mapped;
    }
    return tau;
}

} // namespace stepwise
