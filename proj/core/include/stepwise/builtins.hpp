#pragma once

#include "stepwise/procedure.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace stepwise {

enum class BuiltinName { Bonferroni, SidakSD, SidakSU, Holm, Hochberg, BH, BHSD, TopK };

inline constexpr std::array<BuiltinName, 8> all_builtins{
    BuiltinName::Bonferroni, BuiltinName::SidakSD, BuiltinName::SidakSU, BuiltinName::Holm,
    BuiltinName::Hochberg,   BuiltinName::BH,      BuiltinName::BHSD,    BuiltinName::TopK,
};

/// Lowercase catalogue name, e.g. "sidak_sd".
std::string_view to_string(BuiltinName name);

/// Case-insensitive lookup.
std::optional<BuiltinName> builtin_from_name(std::string_view name);

StepKind builtin_kind(BuiltinName name);

/// Parameters of a catalogue entry. An empty `alpha` means the level is
/// taken from the evaluation call; a literal pins it.
struct BuiltinParams {
    std::optional<double> alpha;
    std::size_t k = 0;  // topk only
};

/// Catalogue:
///   bonferroni  step-up    alpha / m
///   sidak_sd    step-down  1 - (1 - alpha)^(1 / (m - i + 1))
///   sidak_su    step-up    same threshold as sidak_sd
///   holm        step-down  alpha / (m - i + 1)
///   hochberg    step-up    alpha / (m - i + 1)
///   bh          step-up    alpha * i / m
///   bh_sd       step-down  same threshold as bh
///   topk        step-up    p_(k), constant in i and alpha
///
/// Throws std::invalid_argument for a literal alpha outside [0,1] or k == 0.
/// topk with k > m fails at evaluation time.
StepwiseProcedure builtin(BuiltinName name, const BuiltinParams& params = {});

/// Throws std::invalid_argument for an unknown name.
StepwiseProcedure builtin(std::string_view name, const BuiltinParams& params = {});

} // namespace stepwise
