#include "stepwise/pvalues.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace stepwise {

Level::Level(double alpha) : alpha_(alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("significance level must lie in [0,1]");
    }
}

PValueVector::PValueVector(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) {
        throw std::invalid_argument("p-value vector must hold at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("p-value " + std::to_string(i + 1) + " outside [0,1]");
        }
    }
}

PValueVector::PValueVector(std::initializer_list<double> values)
    : PValueVector(std::vector<double>(values))
{
}

double PValueVector::at(std::size_t index) const
{
    if (index == 0 || index > values_.size()) {
        throw std::out_of_range("p-value index out of range");
    }
    return values_[index - 1];
}

PValueVector PValueVector::one_minus() const
{
    std::vector<double> flipped(values_.size());
    std::transform(values_.begin(), values_.end(), flipped.begin(), [](double v) { return 1.0 - v; });
    return PValueVector(std::move(flipped));
}

SortedView::SortedView(std::span<const double> values) : order_(values.size()), sorted_(values.size())
{
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    for (std::size_t r = 0; r < order_.size(); ++r) {
        sorted_[r] = values[order_[r]];
    }
}

std::vector<std::size_t> SortedView::order() const
{
    std::vector<std::size_t> out(order_.size());
    std::transform(order_.begin(), order_.end(), out.begin(), [](std::size_t i) { return i + 1; });
    return out;
}

SortedView sort_pvalues(const PValueVector& p)
{
    return SortedView(p);
}

RejectionSet RejectionSet::from_indices(std::vector<std::size_t> indices, std::size_t m)
{
    for (auto i : indices) {
        if (i == 0 || i > m) {
            throw std::out_of_range("rejection index " + std::to_string(i) + " outside 1.." + std::to_string(m));
        }
    }
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return RejectionSet(std::move(indices), m);
}

RejectionSet RejectionSet::all(std::size_t m)
{
    std::vector<std::size_t> indices(m);
    std::iota(indices.begin(), indices.end(), std::size_t{1});
    return RejectionSet(std::move(indices), m);
}

bool RejectionSet::contains(std::size_t index) const
{
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool RejectionSet::is_subset_of(const RejectionSet& other) const
{
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

RejectionSet RejectionSet::united(const RejectionSet& other) const
{
    std::vector<std::size_t> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out));
    return RejectionSet(std::move(out), std::max(m_, other.m_));
}

RejectionSet RejectionSet::intersected(const RejectionSet& other) const
{
    std::vector<std::size_t> out;
    std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                          std::back_inserter(out));
    return RejectionSet(std::move(out), std::max(m_, other.m_));
}

RejectionSet RejectionSet::minus(const RejectionSet& other) const
{
    std::vector<std::size_t> out;
    std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
    return RejectionSet(std::move(out), std::max(m_, other.m_));
}

RejectionSet RejectionSet::complemented() const
{
    return all(m_).minus(*this);
}

std::string RejectionSet::to_string() const
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i) os << ',';
        os << indices_[i];
    }
    os << '}';
    return os.str();
}

} // namespace stepwise
