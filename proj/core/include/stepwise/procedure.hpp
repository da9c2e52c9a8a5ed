#pragma once

#include "stepwise/pvalues.hpp"
#include "stepwise/threshold.hpp"

#include <string_view>
#include <vector>

namespace stepwise {

enum class StepKind { StepUp, StepDown };

/// Which vector the procedure compares against its thresholds.
/// OneMinus only arises from the complement construction.
enum class InputTransform { Identity, OneMinus };

std::string_view to_string(StepKind kind);
std::string_view to_string(InputTransform transform);

/// Step-up rule: reject every i with p_i <= max{p_(j) : p_(j) <= tau(j)}.
/// max of the empty set is -inf, so nothing is rejected.
RejectionSet eval_step_up(const ThresholdFunction& tau, const PValueVector& p, Level alpha);

/// Step-down rule: reject every i with p_i < min{p_(j) : p_(j) > tau(j)}.
/// min of the empty set is +inf, so everything is rejected.
RejectionSet eval_step_down(const ThresholdFunction& tau, const PValueVector& p, Level alpha);

/// A step-up or step-down procedure: kind, threshold and input transform
/// fully determine the rejections.
class StepwiseProcedure {
public:
    StepwiseProcedure(StepKind kind, ThresholdFunction threshold,
                      InputTransform transform = InputTransform::Identity);

    StepKind kind() const noexcept { return kind_; }
    const ThresholdFunction& threshold() const noexcept { return threshold_; }
    InputTransform transform() const noexcept { return transform_; }

    RejectionSet evaluate(const PValueVector& p, Level alpha) const;

    /// Threshold per ascending rank of the original p, expressed on the p scale.
    /// For OneMinus procedures this undoes the reflection: rank r maps to 1 - tau(m + 1 - r).
    std::vector<double> p_scale_thresholds(const PValueVector& p, Level alpha) const;

private:
    StepKind kind_;
    ThresholdFunction threshold_;
    InputTransform transform_;
};

} // namespace stepwise
