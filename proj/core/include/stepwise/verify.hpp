#pragma once

#include "stepwise/algebra.hpp"
#include "stepwise/expr.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stepwise {

/// Settings shared by the randomized checkers.
///
/// p-values are drawn uniformly on [0,1], levels uniformly on
/// [alpha_min, alpha_max] and m uniformly on [m_min, m_max]. Every trial
/// draws from its own generator seeded from (seed, trial index), so a
/// report depends only on the configuration.
struct CheckConfig {
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    std::size_t m_min = 1;
    std::size_t m_max = 8;
    double alpha_min = 0.01;
    double alpha_max = 0.5;
    /// Neighbourhood radius for local constancy.
    double delta = 1e-7;
    /// Minimum distance between a compared value and its threshold (or a
    /// neighbouring value) for a sample to count as boundary-free.
    double boundary_margin = 1e-4;
    double alpha_grid_step = 0.01;
    double continuity_step = 1e-6;
    double continuity_tolerance = 1e-4;
    /// Resampling budget per trial when looking for boundary-free samples.
    std::size_t max_resample = 1000;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

/// One counterexample. For the set-valued properties `p`/`alpha` and
/// `q`/`alpha_prime` are the two inputs compared; threshold checks only
/// fill `p` and `alpha` and describe the failure in `detail`.
struct Witness {
    std::vector<double> p;
    std::vector<double> q;
    double alpha = 0.0;
    double alpha_prime = 0.0;
    RejectionSet at_p;
    RejectionSet at_q;
    std::string detail;
};

struct PropertyReport {
    std::string property;
    std::size_t trials_run = 0;
    std::vector<Witness> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// A fixed input pair checked before the random trials.
struct SeedCase {
    std::vector<double> p;
    std::vector<double> q;
    double alpha = 0.0;
    double alpha_prime = 0.0;
};

/// h(p, alpha) ⊆ h(q, alpha') whenever p >= q componentwise and alpha <= alpha'.
/// For a seed, `p` and `q` are used as given (the caller orders them).
PropertyReport check_monotonicity(const CompiledProcedure& h, const CheckConfig& cfg,
                                  std::span<const SeedCase> seeds = {});

/// Lowering rejected and raising non-rejected p-values leaves h(p, alpha)
/// unchanged. Seeds are checked as (p, q) at level `alpha`.
PropertyReport check_condition1_part1(const CompiledProcedure& h, const CheckConfig& cfg,
                                      std::span<const SeedCase> seeds = {});

/// h is constant on a delta-neighbourhood of boundary-free (p*, alpha*).
PropertyReport check_condition1_part2(const CompiledProcedure& h, const CheckConfig& cfg);

/// Threshold regularity on the alpha grid: non-decreasing in rank (all rank
/// pairs), non-decreasing in alpha, and no jump: a change above
/// continuity_tolerance over continuity_step on either side is a violation
/// unless it shrinks by 10% or more when the step is cut a millionfold. p-dependent thresholds are checked on
/// min(trials, 200) sampled vectors.
PropertyReport check_condition2(const ThresholdFunction& tau, std::size_t m, const CheckConfig& cfg);

/// Compares compile(expr) against the output-level evaluation of the same
/// tree. Throws std::invalid_argument when compile(expr) is not a closed form.
/// Trees containing a complement are sampled away from threshold equality.
PropertyReport oracle_equivalence(const ProcedureExpr& expr, const CheckConfig& cfg,
                                  const CompileOptions& options = {});

/// Smallest distance between a compared sorted value and its threshold, or
/// between neighbouring sorted values, over every stepwise leaf of h.
/// With `exempt_tracking`, an exact zero against a p-dependent threshold is
/// ignored because that comparison cannot change under perturbation.
double boundary_distance(const CompiledProcedure& h, const PValueVector& p, Level alpha, bool exempt_tracking);

/// The fifteen ordered p-values of the classic FDR worked example.
std::vector<double> fdr_example_pvalues();

/// Fixed-vector cases with known rejection sets and known counterexamples,
/// one report per case.
std::vector<PropertyReport> regression_suite();

} // namespace stepwise
