#include "stepwise/threshold.hpp"

#include <algorithm>
#include <stdexcept>

namespace stepwise {

ThresholdFunction::ThresholdFunction(std::string name, Rule rule, bool depends_on_p, bool depends_on_alpha)
    : state_(std::make_shared<const State>(State{std::move(name), std::move(rule), depends_on_p, depends_on_alpha}))
{
    if (!state_->rule) {
        throw std::invalid_argument("threshold rule must be callable");
    }
}

ThresholdFunction ThresholdFunction::table(std::string name, std::vector<double> values)
{
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("threshold table entries must lie in [0,1]");
        }
    }
    auto rule = [values = std::move(values)](std::size_t rank, Level, const SortedView& p) {
        if (p.size() != values.size()) {
            throw std::invalid_argument("threshold table defined for m=" + std::to_string(values.size()) +
                                        ", evaluated with m=" + std::to_string(p.size()));
        }
        return values.at(rank - 1);
    };
    return ThresholdFunction(std::move(name), std::move(rule), false, false);
}

double ThresholdFunction::operator()(std::size_t rank, Level alpha, const SortedView& p) const
{
    if (rank == 0 || rank > p.size()) {
        throw std::out_of_range("threshold rank outside 1..m");
    }
    return state_->rule(rank, alpha, p);
}

std::vector<double> ThresholdFunction::values(Level alpha, const SortedView& p) const
{
    std::vector<double> out(p.size());
    for (std::size_t i = 1; i <= p.size(); ++i) {
        out[i - 1] = state_->rule(i, alpha, p);
    }
    return out;
}

ThresholdFunction pointwise_max(const ThresholdFunction& a, const ThresholdFunction& b)
{
    return ThresholdFunction(
        "max(" + a.name() + ", " + b.name() + ")",
        [a, b](std::size_t i, Level alpha, const SortedView& p) { return std::max(a(i, alpha, p), b(i, alpha, p)); },
        a.depends_on_p() || b.depends_on_p(), a.depends_on_alpha() || b.depends_on_alpha());
}

ThresholdFunction pointwise_min(const ThresholdFunction& a, const ThresholdFunction& b)
{
    return ThresholdFunction(
        "min(" + a.name() + ", " + b.name() + ")",
        [a, b](std::size_t i, Level alpha, const SortedView& p) { return std::min(a(i, alpha, p), b(i, alpha, p)); },
        a.depends_on_p() || b.depends_on_p(), a.depends_on_alpha() || b.depends_on_alpha());
}

ThresholdFunction reflected(const ThresholdFunction& t, Level alpha0)
{
    return ThresholdFunction(
        "reflect(" + t.name() + ")",
        [t, alpha0](std::size_t i, Level, const SortedView& p) { return 1.0 - t(p.size() + 1 - i, alpha0, p); },
        t.depends_on_p(), false);
}

} // namespace stepwise
