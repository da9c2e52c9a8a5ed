#include "stepwise/builtins.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stepwise {
namespace {

std::string format_level(const std::optional<double>& alpha)
{
    if (!alpha) return "alpha";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, *alpha);
    return std::string(buf, res.ptr);
}

// Wraps a rule that only needs (i, m, alpha) into a ThresholdFunction,
// pinning alpha when a literal was given.
template <typename F>
ThresholdFunction level_threshold(BuiltinName name, const std::optional<double>& literal, F f)
{
    std::string label = std::string(to_string(name)) + "(" + format_level(literal) + ")";
    if (literal) {
        const double a = *literal;
        return ThresholdFunction(
            std::move(label), [f, a](std::size_t i, Level, const SortedView& p) { return f(i, p.size(), a); },
            false, false);
    }
    return ThresholdFunction(
        std::move(label),
        [f](std::size_t i, Level alpha, const SortedView& p) { return f(i, p.size(), alpha.value()); }, false, true);
}

double bonferroni_tau(std::size_t, std::size_t m, double a)
{
    return a / static_cast<double>(m);
}

double sidak_tau(std::size_t i, std::size_t m, double a)
{
    // 1 - (1 - a)^(1/n), written to stay accurate for small a.
    const double n = static_cast<double>(m - i + 1);
    return -std::expm1(std::log1p(-a) / n);
}

double holm_tau(std::size_t i, std::size_t m, double a)
{
    return a / static_cast<double>(m - i + 1);
}

double bh_tau(std::size_t i, std::size_t m, double a)
{
    return a * static_cast<double>(i) / static_cast<double>(m);
}

} // namespace

std::string_view to_string(BuiltinName name)
{
    switch (name) {
    case BuiltinName::Bonferroni: return "bonferroni";
    case BuiltinName::SidakSD: return "sidak_sd";
    case BuiltinName::SidakSU: return "sidak_su";
    case BuiltinName::Holm: return "holm";
    case BuiltinName::Hochberg: return "hochberg";
    case BuiltinName::BH: return "bh";
    case BuiltinName::BHSD: return "bh_sd";
    case BuiltinName::TopK: return "topk";
    }
    return "?";
}

std::optional<BuiltinName> builtin_from_name(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto b : all_builtins) {
        if (to_string(b) == lower) return b;
    }
    return std::nullopt;
}

StepKind builtin_kind(BuiltinName name)
{
    switch (name) {
    case BuiltinName::SidakSD:
    case BuiltinName::Holm:
    case BuiltinName::BHSD:
        return StepKind::StepDown;
    default:
        return StepKind::StepUp;
    }
}

StepwiseProcedure builtin(BuiltinName name, const BuiltinParams& params)
{
    if (params.alpha && !(*params.alpha >= 0.0 && *params.alpha <= 1.0)) {
        throw std::invalid_argument(std::string(to_string(name)) + ": level outside [0,1]");
    }
    const StepKind kind = builtin_kind(name);
    switch (name) {
    case BuiltinName::Bonferroni:
        return {kind, level_threshold(name, params.alpha, bonferroni_tau)};
    case BuiltinName::SidakSD:
    case BuiltinName::SidakSU:
        return {kind, level_threshold(name, params.alpha, sidak_tau)};
    case BuiltinName::Holm:
    case BuiltinName::Hochberg:
        return {kind, level_threshold(name, params.alpha, holm_tau)};
    case BuiltinName::BH:
    case BuiltinName::BHSD:
        return {kind, level_threshold(name, params.alpha, bh_tau)};
    case BuiltinName::TopK: {
        const std::size_t k = params.k;
        if (k == 0) {
            throw std::invalid_argument("topk: k must be at least 1");
        }
        ThresholdFunction tau(
            "topk(" + std::to_string(k) + ")",
            [k](std::size_t, Level, const SortedView& p) {
                if (k > p.size()) {
                    throw std::invalid_argument("topk: k=" + std::to_string(k) + " exceeds m=" +
                                                std::to_string(p.size()));
                }
                return p.value(k);
            },
            true, false);
        return {kind, std::move(tau)};
    }
    }
    throw std::invalid_argument("unknown builtin");
}

StepwiseProcedure builtin(std::string_view name, const BuiltinParams& params)
{
    auto b = builtin_from_name(name);
    if (!b) {
        throw std::invalid_argument("unknown builtin '" + std::string(name) + "'");
    }
    return builtin(*b, params);
}

} // namespace stepwise
