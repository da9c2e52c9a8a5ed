#pragma once

#include <stepwise/expr.hpp>

#include <random>

namespace oracle {

/// Random expression tree of at most `depth` combinator levels, mixing
/// literal and symbolic levels.
stepwise::ExprPtr random_expr(std::mt19937_64& rng, int depth);

} // namespace oracle
