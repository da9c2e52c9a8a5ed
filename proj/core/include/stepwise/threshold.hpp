#pragma once

#include "stepwise/pvalues.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stepwise {

/// Critical-value map tau_alpha(i) for ranks 1..m.
///
/// The rule receives the ascending view of the *original* p-value vector,
/// even when the owning procedure compares 1 - p. A p-dependent threshold
/// such as top-k therefore always sees the input the caller passed in.
///
/// Instances are immutable and cheap to copy.
class ThresholdFunction {
public:
    using Rule = std::function<double(std::size_t rank, Level alpha, const SortedView& p)>;

    ThresholdFunction(std::string name, Rule rule, bool depends_on_p, bool depends_on_alpha);

    /// Threshold fixed per rank, independent of alpha and p. Evaluation requires m == values.size().
    static ThresholdFunction table(std::string name, std::vector<double> values);

    const std::string& name() const noexcept { return state_->name; }
    bool depends_on_p() const noexcept { return state_->depends_on_p; }
    bool depends_on_alpha() const noexcept { return state_->depends_on_alpha; }

    /// tau_alpha(rank); m is p.size().
    double operator()(std::size_t rank, Level alpha, const SortedView& p) const;

    /// tau_alpha(1..m).
    std::vector<double> values(Level alpha, const SortedView& p) const;

private:
    struct State {
        std::string name;
        Rule rule;
        bool depends_on_p;
        bool depends_on_alpha;
    };
    std::shared_ptr<const State> state_;
};

/// max(a(i), b(i)) pointwise.
ThresholdFunction pointwise_max(const ThresholdFunction& a, const ThresholdFunction& b);

/// min(a(i), b(i)) pointwise.
ThresholdFunction pointwise_min(const ThresholdFunction& a, const ThresholdFunction& b);

/// i -> 1 - t(m + 1 - i), with t evaluated at the frozen level `alpha0`.
ThresholdFunction reflected(const ThresholdFunction& t, Level alpha0);

} // namespace stepwise
