#include "stepwise/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <variant>
#include <vector>

namespace stepwise {
namespace {

constexpr std::size_t kMaxDepth = 200;

enum class Tok { Name, Number, LParen, RParen, Comma, Equals, End };

struct Token {
    Tok type;
    SourceSpan span;
    std::string_view text;
};

bool is_name_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) return {Tok::End, {start, start}, {}};

        const char c = text_[pos_];
        switch (c) {
        case '(': ++pos_; return {Tok::LParen, {start, pos_}, text_.substr(start, 1)};
        case ')': ++pos_; return {Tok::RParen, {start, pos_}, text_.substr(start, 1)};
        case ',': ++pos_; return {Tok::Comma, {start, pos_}, text_.substr(start, 1)};
        case '=': ++pos_; return {Tok::Equals, {start, pos_}, text_.substr(start, 1)};
        default: break;
        }
        if (is_name_start(c)) {
            while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
            return {Tok::Name, {start, pos_}, text_.substr(start, pos_ - start)};
        }
        if (is_digit(c) || c == '.' || c == '+' || c == '-') {
            return number(start);
        }
        throw ParseError(ParseErrorKind::Syntax, {start, start + 1}, "unexpected character");
    }

private:
    Token number(std::size_t start)
    {
        if (text_[pos_] == '+' || text_[pos_] == '-') ++pos_;
        std::size_t digits = 0;
        while (pos_ < text_.size() && is_digit(text_[pos_])) { ++pos_; ++digits; }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) { ++pos_; ++digits; }
        }
        if (digits == 0) {
            throw ParseError(ParseErrorKind::Syntax, {start, pos_ == start ? start + 1 : pos_}, "malformed number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && is_digit(text_[look])) {
                pos_ = look;
                while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            }
        }
        return {Tok::Number, {start, pos_}, text_.substr(start, pos_ - start)};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct NumberArg {
    std::string_view text;
    SourceSpan span;
};
struct AlphaArg {
    SourceSpan span;
};
struct KArg {
    std::string_view text;
    SourceSpan span;
};
using Arg = std::variant<ExprPtr, NumberArg, AlphaArg, KArg>;

SourceSpan span_of(const Arg& a)
{
    return std::visit(
        [](const auto& x) -> SourceSpan {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ExprPtr>) return x->span;
            else return x.span;
        },
        a);
}

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    ExprPtr parse_top()
    {
        ExprPtr e = parse_call(0);
        if (cur_.type != Tok::End) {
            throw ParseError(ParseErrorKind::Syntax, cur_.span, "unexpected input after expression");
        }
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    Token expect(Tok type, const char* what)
    {
        if (cur_.type != type) {
            throw ParseError(ParseErrorKind::Syntax, cur_.span, std::string("expected ") + what);
        }
        Token t = cur_;
        advance();
        return t;
    }

    ExprPtr parse_call(std::size_t depth)
    {
        const Token name = expect(Tok::Name, "a procedure name");
        return parse_call_after_name(name, depth);
    }

    Arg parse_arg(std::size_t depth)
    {
        if (cur_.type == Tok::Number) {
            Token t = cur_;
            advance();
            return NumberArg{t.text, t.span};
        }
        if (cur_.type != Tok::Name) {
            throw ParseError(ParseErrorKind::Syntax, cur_.span, "expected an argument");
        }
        const Token name = cur_;
        advance();
        if (cur_.type == Tok::LParen) {
            return parse_call_after_name(name, depth + 1);
        }
        const std::string word = lower(name.text);
        if (word == "alpha") return AlphaArg{name.span};
        if (word == "k" && cur_.type == Tok::Equals) {
            advance();
            const Token value = expect(Tok::Number, "an integer after 'k='");
            return KArg{value.text, SourceSpan{name.span.start, value.span.end}};
        }
        throw ParseError(ParseErrorKind::Syntax, name.span, "unexpected name '" + std::string(name.text) + "'");
    }

    ExprPtr parse_call_after_name(const Token& name, std::size_t depth)
    {
        if (depth > kMaxDepth) {
            throw ParseError(ParseErrorKind::Syntax, name.span, "expression nested too deeply");
        }
        expect(Tok::LParen, "'('");
        std::vector<Arg> args;
        if (cur_.type != Tok::RParen) {
            args.push_back(parse_arg(depth));
            while (cur_.type == Tok::Comma) {
                advance();
                args.push_back(parse_arg(depth));
            }
        }
        const Token close = expect(Tok::RParen, "')' or ','");
        return build(name, SourceSpan{name.span.start, close.span.end}, args);
    }

    static void require_arity(const std::vector<Arg>& args, std::size_t n, const std::string& name, SourceSpan span)
    {
        if (args.size() != n) {
            throw ParseError(ParseErrorKind::Arity, span,
                             name + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") + ", got " +
                                 std::to_string(args.size()));
        }
    }

    static ExprPtr as_expr(const Arg& a)
    {
        if (auto* e = std::get_if<ExprPtr>(&a)) return *e;
        throw ParseError(ParseErrorKind::Syntax, span_of(a), "expected a procedure");
    }

    static LevelParam as_level(const Arg& a)
    {
        if (std::holds_alternative<AlphaArg>(a)) return std::nullopt;
        const auto* n = std::get_if<NumberArg>(&a);
        if (!n) {
            throw ParseError(ParseErrorKind::Syntax, span_of(a), "expected a level (number or 'alpha')");
        }
        std::string_view text = n->text;
        if (!text.empty() && text.front() == '+') text.remove_prefix(1);
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(value >= 0.0 && value <= 1.0)) {
            throw ParseError(ParseErrorKind::ParamRange, n->span, "level must be a number in [0,1]");
        }
        return value;
    }

    static std::size_t as_count(const Arg& a)
    {
        std::string_view text;
        SourceSpan span = span_of(a);
        if (auto* n = std::get_if<NumberArg>(&a)) {
            text = n->text;
        }
        else if (auto* k = std::get_if<KArg>(&a)) {
            text = k->text;
        }
        else {
            throw ParseError(ParseErrorKind::Syntax, span, "expected an integer k");
        }
        if (!text.empty() && text.front() == '+') text.remove_prefix(1);
        std::size_t value = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || value == 0) {
            throw ParseError(ParseErrorKind::ParamRange, span, "k must be a positive integer");
        }
        return value;
    }

    ExprPtr build(const Token& name, SourceSpan span, const std::vector<Arg>& args)
    {
        const std::string word = lower(name.text);
        auto node = [&](auto&& n) {
            return std::make_shared<const ProcedureExpr>(ProcedureExpr{std::forward<decltype(n)>(n), span});
        };

        if (word == "union" || word == "intersect" || word == "diff") {
            require_arity(args, 2, word, span);
            const SetOp op = word == "union" ? SetOp::Union : word == "intersect" ? SetOp::Intersect : SetOp::Diff;
            return node(BinaryExpr{op, as_expr(args[0]), as_expr(args[1])});
        }
        if (word == "complement") {
            require_arity(args, 2, word, span);
            ExprPtr child = as_expr(args[0]);
            return node(ComplementExpr{std::move(child), as_level(args[1])});
        }
        const auto b = builtin_from_name(word);
        if (!b) {
            throw ParseError(ParseErrorKind::UnknownBuiltin, name.span, "unknown procedure '" + std::string(name.text) + "'");
        }
        require_arity(args, 1, word, span);
        if (*b == BuiltinName::TopK) {
            return node(BuiltinExpr{*b, std::nullopt, as_count(args[0])});
        }
        if (std::holds_alternative<KArg>(args[0])) {
            throw ParseError(ParseErrorKind::Syntax, span_of(args[0]), "'k=' only applies to topk");
        }
        return node(BuiltinExpr{*b, as_level(args[0]), 0});
    }

    Lexer lexer_;
    Token cur_{Tok::End, {}, {}};
};

void format_number(std::string& out, double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void format_level(std::string& out, const LevelParam& level)
{
    if (level) format_number(out, *level);
    else out += "alpha";
}

void format_into(std::string& out, const ProcedureExpr& e)
{
    if (auto* b = std::get_if<BuiltinExpr>(&e.node)) {
        out += to_string(b->name);
        out += '(';
        if (b->name == BuiltinName::TopK) out += std::to_string(b->k);
        else format_level(out, b->alpha);
        out += ')';
        return;
    }
    if (auto* b = std::get_if<BinaryExpr>(&e.node)) {
        out += to_string(b->op);
        out += '(';
        format_into(out, *b->left);
        out += ", ";
        format_into(out, *b->right);
        out += ')';
        return;
    }
    const auto& c = std::get<ComplementExpr>(e.node);
    out += "complement(";
    format_into(out, *c.child);
    out += ", ";
    format_level(out, c.alpha);
    out += ')';
}

} // namespace

ExprPtr parse(std::string_view text)
{
    return Parser(text).parse_top();
}

std::string format(const ProcedureExpr& expr)
{
    std::string out;
    format_into(out, expr);
    return out;
}

} // namespace stepwise
