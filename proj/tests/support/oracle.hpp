#pragma once

// Brute-force reference implementations used only by the tests. They follow
// the textbook definitions directly and share no code with the library
// beyond the AST types.

#include <stepwise/expr.hpp>

#include <cstddef>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Set = std::set<std::size_t>;

/// Critical value for rank i (1-based) out of m, from the closed formulas.
/// `sorted` is the ascending p-vector (needed by topk).
double threshold(stepwise::BuiltinName name, double alpha, std::size_t k, std::size_t i, std::size_t m,
                 const std::vector<double>& sorted);

/// i is rejected iff some rank j has p_(j) <= tau(j) and p_i <= p_(j).
Set step_up(const std::vector<double>& p, const std::vector<double>& tau_by_rank);

/// i is rejected iff every rank j with p_(j) > tau(j) has p_i < p_(j).
Set step_down(const std::vector<double>& p, const std::vector<double>& tau_by_rank);

/// Evaluates a builtin leaf by brute force.
Set builtin(stepwise::BuiltinName name, double alpha, std::size_t k, const std::vector<double>& p);

/// Evaluates a whole expression by set operations on brute-force leaves.
/// `alpha` is the runtime level; complements use their own level (or alpha).
Set eval(const stepwise::ProcedureExpr& e, const std::vector<double>& p, double alpha);

Set all(std::size_t m);
std::vector<std::size_t> to_vector(const Set& s);

std::vector<double> ascending(std::vector<double> p);

/// Uniform p-values; with `grid` > 0 values are rounded to multiples of
/// 1/grid so that ties occur.
std::vector<double> random_pvalues(std::mt19937_64& rng, std::size_t m, int grid = 0);

} // namespace oracle
