#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stepwise {

/// Significance level in [0,1].
class Level {
public:
    explicit Level(double alpha);

    double value() const noexcept { return alpha_; }

    friend bool operator==(Level, Level) = default;

private:
    double alpha_;
};

/// Vector of m >= 1 p-values, each in [0,1].
class PValueVector {
public:
    explicit PValueVector(std::vector<double> values);
    PValueVector(std::initializer_list<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    /// 1-based access, matching hypothesis numbering.
    double at(std::size_t index) const;

    /// Coordinate-wise 1 - p.
    PValueVector one_minus() const;

private:
    std::vector<double> values_;
};

/// Ascending view of a p-value vector. Ties keep ascending original index.
class SortedView {
public:
    explicit SortedView(std::span<const double> values);
    explicit SortedView(const PValueVector& p) : SortedView(p.values()) {}

    std::size_t size() const noexcept { return sorted_.size(); }

    /// p_(rank) for rank in 1..m.
    double value(std::size_t rank) const { return sorted_.at(rank - 1); }

    /// Original 1-based index of the hypothesis at `rank`.
    std::size_t original_index(std::size_t rank) const { return order_.at(rank - 1) + 1; }

    std::span<const double> sorted_values() const noexcept { return sorted_; }

    /// 1-based original indices in rank order.
    std::vector<std::size_t> order() const;

private:
    std::vector<std::size_t> order_;  // 0-based
    std::vector<double> sorted_;
};

SortedView sort_pvalues(const PValueVector& p);

/// Set of rejected hypotheses, 1-based, kept ascending and duplicate-free.
class RejectionSet {
public:
    RejectionSet() = default;

    /// Validates 1 <= i <= m; duplicates are merged.
    static RejectionSet from_indices(std::vector<std::size_t> indices, std::size_t m);
    static RejectionSet all(std::size_t m);

    std::size_t m() const noexcept { return m_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(std::size_t index) const;
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

    bool is_subset_of(const RejectionSet& other) const;

    RejectionSet united(const RejectionSet& other) const;
    RejectionSet intersected(const RejectionSet& other) const;
    RejectionSet minus(const RejectionSet& other) const;
    RejectionSet complemented() const;

    std::string to_string() const;

    friend bool operator==(const RejectionSet& a, const RejectionSet& b)
    {
        return a.indices_ == b.indices_;
    }

private:
    RejectionSet(std::vector<std::size_t> sorted, std::size_t m) : indices_(std::move(sorted)), m_(m) {}

    std::vector<std::size_t> indices_;
    std::size_t m_ = 0;
};

} // namespace stepwise
