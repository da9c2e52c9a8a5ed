#pragma once

#include "stepwise/builtins.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace stepwise {

/// Byte range [start, end) into expression text.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
};

enum class ParseErrorKind { Syntax, UnknownBuiltin, Arity, ParamRange, UnresolvedAlpha };

std::string_view to_string(ParseErrorKind kind);

/// Raised by the parser, and by compile() for level and range problems
/// that can only be resolved once alpha and m are known.
class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, SourceSpan span, const std::string& message)
        : std::runtime_error(message), kind_(kind), span_(span)
    {
    }

    ParseErrorKind kind() const noexcept { return kind_; }
    SourceSpan span() const noexcept { return span_; }

private:
    ParseErrorKind kind_;
    SourceSpan span_;
};

enum class SetOp { Union, Intersect, Diff, Complement };

std::string_view to_string(SetOp op);

/// A level argument: a literal, or the global symbol 'alpha' when empty.
using LevelParam = std::optional<double>;

struct ProcedureExpr;
using ExprPtr = std::shared_ptr<const ProcedureExpr>;

struct BuiltinExpr {
    BuiltinName name;
    LevelParam alpha;   // unused by topk
    std::size_t k = 0;  // topk only
};

/// Union, Intersect or Diff.
struct BinaryExpr {
    SetOp op;
    ExprPtr left;
    ExprPtr right;
};

struct ComplementExpr {
    ExprPtr child;
    LevelParam alpha;  // 'alpha' is resolved to a constant at compile time
};

struct ProcedureExpr {
    std::variant<BuiltinExpr, BinaryExpr, ComplementExpr> node;
    SourceSpan span;
};

/// Structural equality; spans are ignored.
bool structurally_equal(const ProcedureExpr& a, const ProcedureExpr& b);

/// True when any level argument is the symbol 'alpha'.
bool uses_symbolic_alpha(const ProcedureExpr& e);

namespace expr {

ExprPtr builtin(BuiltinName name, LevelParam alpha);
ExprPtr topk(std::size_t k);
ExprPtr union_of(ExprPtr a, ExprPtr b);
ExprPtr intersect(ExprPtr a, ExprPtr b);
ExprPtr diff(ExprPtr a, ExprPtr b);
ExprPtr complement(ExprPtr child, LevelParam alpha);

} // namespace expr

} // namespace stepwise
