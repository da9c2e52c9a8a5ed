#pragma once

#include "stepwise/expr.hpp"

#include <string>
#include <string_view>

namespace stepwise {

/// Parses the composition language:
///
///   expr  := NAME '(' args? ')'
///   args  := arg (',' arg)*
///   arg   := expr | NUMBER | 'alpha' | 'k' '=' INTEGER
///
/// Combinators: union(e, e), intersect(e, e), diff(e, e), complement(e, a).
/// Builtins: bonferroni(a), sidak_sd(a), sidak_su(a), holm(a), hochberg(a),
/// bh(a), bh_sd(a), topk(INTEGER) where a is a NUMBER in [0,1] or 'alpha'.
/// Names are case-insensitive; whitespace is ignored between tokens.
///
/// Throws ParseError; the span always lies within `text`.
ExprPtr parse(std::string_view text);

/// Canonical text; parse(format(e)) is structurally equal to e.
std::string format(const ProcedureExpr& expr);

} // namespace stepwise
