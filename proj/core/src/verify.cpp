#include "stepwise/verify.hpp"

#include "stepwise/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace stepwise {
namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
        : gen_(splitmix64(splitmix64(seed ^ splitmix64(stream)) + trial))
    {
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_); }

    std::vector<double> pvalues(std::size_t m)
    {
        std::vector<double> p(m);
        for (auto& v : p) v = uniform();
        return p;
    }

private:
    std::mt19937_64 gen_;
};

constexpr double kRefine = 1e-6;
constexpr double kJumpRatio = 0.9;

// Stream identifiers keep the checkers' random sequences independent.
enum Stream : std::uint64_t { kMonotone = 1, kCond1a, kCond1b, kCond2, kOracle };

std::size_t draw_m(const CompiledProcedure& h, const CheckConfig& cfg, TrialRng& rng)
{
    if (h.info().m) return *h.info().m;
    const std::size_t lo = std::max(cfg.m_min, h.info().min_m);
    const std::size_t hi = std::max(cfg.m_max, lo);
    return rng.index(lo, hi);
}

double draw_alpha(const CompiledProcedure& h, const CheckConfig& cfg, TrialRng& rng)
{
    if (h.info().frozen_alpha) return *h.info().frozen_alpha;
    return rng.uniform(cfg.alpha_min, cfg.alpha_max);
}

RejectionSet eval(const CompiledProcedure& h, const std::vector<double>& p, double alpha)
{
    return h.evaluate(PValueVector(p), Level(alpha));
}

bool componentwise_geq(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
    }
    return true;
}

bool condition1_premise(const std::vector<double>& p, const std::vector<double>& q, const RejectionSet& rejected)
{
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool in = rejected.contains(i + 1);
        if (in && q[i] > p[i]) return false;
        if (!in && q[i] < p[i]) return false;
    }
    return true;
}

double leaf_distance(const StepwiseProcedure& h, const PValueVector& p, Level alpha, bool exempt_tracking)
{
    const SortedView original(p);
    const auto tau = h.threshold().values(alpha, original);
    const PValueVector compared = h.transform() == InputTransform::Identity ? p : p.one_minus();
    const SortedView x(compared);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r <= x.size(); ++r) {
        const double d = std::fabs(x.value(r) - tau[r - 1]);
        if (d == 0.0 && exempt_tracking && h.threshold().depends_on_p()) continue;
        best = std::min(best, d);
        if (r > 1) best = std::min(best, x.value(r) - x.value(r - 1));
    }
    return best;
}

bool contains_complement(const ProcedureExpr& e)
{
    if (std::holds_alternative<ComplementExpr>(e.node)) return true;
    if (auto* b = std::get_if<BinaryExpr>(&e.node)) {
        return contains_complement(*b->left) || contains_complement(*b->right);
    }
    return false;
}

std::vector<double> perturb(const std::vector<double>& p, double radius, TrialRng& rng)
{
    std::vector<double> dir(p.size());
    double norm = 0.0;
    for (auto& d : dir) {
        d = rng.uniform(-1.0, 1.0);
        norm += d * d;
    }
    norm = std::sqrt(norm);
    const double scale = norm > 0.0 ? radius * rng.uniform() / norm : 0.0;
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = std::clamp(p[i] + scale * dir[i], 0.0, 1.0);
    }
    return out;
}

} // namespace

void CheckConfig::validate() const
{
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (m_min == 0 || m_min > m_max) throw std::invalid_argument("m range must satisfy 1 <= min <= max");
    if (!(alpha_min >= 0.0 && alpha_min <= alpha_max && alpha_max <= 1.0)) {
        throw std::invalid_argument("alpha range must lie within [0,1]");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(boundary_margin > delta)) throw std::invalid_argument("boundary_margin must exceed delta");
    if (!(alpha_grid_step > 0.0) || !(continuity_step > 0.0) || !(continuity_tolerance > 0.0)) {
        throw std::invalid_argument("grid and continuity steps must be positive");
    }
    if (max_resample == 0) throw std::invalid_argument("max_resample must be positive");
}

PropertyReport check_monotonicity(const CompiledProcedure& h, const CheckConfig& cfg, std::span<const SeedCase> seeds)
{
    cfg.validate();
    PropertyReport report{"monotonicity", 0, {}};

    auto check = [&](const std::vector<double>& p, double a, const std::vector<double>& q, double a2) {
        ++report.trials_run;
        RejectionSet hp = eval(h, p, a);
        RejectionSet hq = eval(h, q, a2);
        if (!hp.is_subset_of(hq)) {
            report.violations.push_back({p, q, a, a2, hp, hq, "h(p, alpha) not a subset of h(q, alpha')"});
        }
    };

    for (const auto& s : seeds) {
        if (!componentwise_geq(s.p, s.q) || s.alpha > s.alpha_prime) {
            throw std::invalid_argument("monotonicity seed must satisfy p >= q and alpha <= alpha'");
        }
        check(s.p, s.alpha, s.q, s.alpha_prime);
    }

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        TrialRng rng(cfg.seed, kMonotone, t);
        const std::size_t m = draw_m(h, cfg, rng);
        const std::vector<double> q = rng.pvalues(m);
        const double a2 = draw_alpha(h, cfg, rng);
        std::vector<double> p(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double u = rng.uniform();
            if (u < 0.25) p[i] = q[i];
            else if (u < 0.375) p[i] = 1.0;
            else p[i] = q[i] + rng.uniform() * (1.0 - q[i]);
        }
        const double a = h.info().frozen_alpha ? a2 : a2 - rng.uniform() * (a2 - cfg.alpha_min);
        check(p, a, q, a2);
    }
    return report;
}

PropertyReport check_condition1_part1(const CompiledProcedure& h, const CheckConfig& cfg,
                                      std::span<const SeedCase> seeds)
{
    cfg.validate();
    PropertyReport report{"condition1_part1", 0, {}};

    auto check = [&](const std::vector<double>& p, const std::vector<double>& q, double a, const RejectionSet& hp) {
        ++report.trials_run;
        RejectionSet hq = eval(h, q, a);
        if (!(hq == hp)) {
            report.violations.push_back({p, q, a, a, hp, hq, "h(q, alpha) differs from h(p, alpha)"});
        }
    };

    for (const auto& s : seeds) {
        RejectionSet hp = eval(h, s.p, s.alpha);
        if (!condition1_premise(s.p, s.q, hp)) {
            throw std::invalid_argument("seed q must lower only rejected and raise only non-rejected p-values");
        }
        check(s.p, s.q, s.alpha, hp);
    }

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        TrialRng rng(cfg.seed, kCond1a, t);
        const std::size_t m = draw_m(h, cfg, rng);
        const std::vector<double> p = rng.pvalues(m);
        const double a = draw_alpha(h, cfg, rng);
        RejectionSet hp = eval(h, p, a);
        std::vector<double> q(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double u = rng.uniform();
            if (hp.contains(i + 1)) {
                q[i] = u < 1.0 / 6 ? 0.0 : u < 2.0 / 6 ? p[i] : p[i] * rng.uniform();
            }
            else {
                q[i] = u < 1.0 / 6 ? 1.0 : u < 2.0 / 6 ? p[i] : p[i] + rng.uniform() * (1.0 - p[i]);
            }
        }
        check(p, q, a, hp);
    }
    return report;
}

double boundary_distance(const CompiledProcedure& h, const PValueVector& p, Level alpha, bool exempt_tracking)
{
    if (const auto* leaf = h.closed_form()) {
        return leaf_distance(*leaf, p, alpha, exempt_tracking);
    }
    const auto& node = *h.output_node();
    if (node.op == SetOp::Complement) {
        return boundary_distance(*node.left, p, Level(*node.level), exempt_tracking);
    }
    return std::min(boundary_distance(*node.left, p, alpha, exempt_tracking),
                    boundary_distance(*node.right, p, alpha, exempt_tracking));
}

PropertyReport check_condition1_part2(const CompiledProcedure& h, const CheckConfig& cfg)
{
    cfg.validate();
    PropertyReport report{"condition1_part2", 0, {}};
    const bool vary_alpha = h.info().uses_alpha && !h.info().frozen_alpha;

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        TrialRng rng(cfg.seed, kCond1b, t);
        const std::size_t m = draw_m(h, cfg, rng);
        std::vector<double> centre;
        double a = 0.0;
        bool found = false;
        for (std::size_t attempt = 0; attempt < cfg.max_resample && !found; ++attempt) {
            centre = rng.pvalues(m);
            a = draw_alpha(h, cfg, rng);
            found = boundary_distance(h, PValueVector(centre), Level(a), true) > cfg.boundary_margin;
        }
        if (!found) continue;

        ++report.trials_run;
        const std::vector<double> p = perturb(centre, cfg.delta, rng);
        const double a2 = vary_alpha ? std::clamp(a + cfg.delta * rng.uniform(-1.0, 1.0), 0.0, 1.0) : a;
        RejectionSet at_centre = eval(h, centre, a);
        RejectionSet nearby = eval(h, p, a2);
        if (!(at_centre == nearby)) {
            report.violations.push_back({centre, p, a, a2, at_centre, nearby, "rejections change within delta"});
        }
    }
    return report;
}

PropertyReport check_condition2(const ThresholdFunction& tau, std::size_t m, const CheckConfig& cfg)
{
    cfg.validate();
    if (m == 0) throw std::invalid_argument("m must be positive");
    PropertyReport report{"condition2", 0, {}};

    std::vector<std::vector<double>> inputs;
    if (tau.depends_on_p()) {
        const std::size_t n = std::min<std::size_t>(cfg.trials, 200);
        for (std::size_t t = 0; t < n; ++t) {
            TrialRng rng(cfg.seed, kCond2, t);
            inputs.push_back(rng.pvalues(m));
        }
    }
    else {
        inputs.emplace_back(m, 0.5);
    }

    const auto steps = static_cast<std::size_t>(std::llround(1.0 / cfg.alpha_grid_step));
    auto grid = [&](std::size_t k) { return std::min(1.0, static_cast<double>(k) * cfg.alpha_grid_step); };

    for (const auto& raw : inputs) {
        const SortedView view(raw);
        std::vector<double> previous;
        for (std::size_t k = 0; k <= steps; ++k) {
            const double a = grid(k);
            ++report.trials_run;
            const auto values = tau.values(Level(a), view);
            auto witness = [&](double a2, std::string detail) {
                report.violations.push_back(
                    {std::vector<double>(view.sorted_values().begin(), view.sorted_values().end()), {}, a, a2, {}, {},
                     std::move(detail)});
            };

            for (std::size_t i = 0; i < m; ++i) {
                if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
                    witness(a, "range: tau(" + std::to_string(i + 1) + ") = " + std::to_string(values[i]));
                }
            }
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j) {
                    if (values[i] > values[j]) {
                        witness(a, "part1: tau(" + std::to_string(i + 1) + ") = " + std::to_string(values[i]) +
                                       " > tau(" + std::to_string(j + 1) + ") = " + std::to_string(values[j]));
                    }
                }
            }
            if (!previous.empty()) {
                for (std::size_t i = 0; i < m; ++i) {
                    if (previous[i] > values[i]) {
                        witness(grid(k - 1), "part2: tau(" + std::to_string(i + 1) + ") decreases in alpha");
                    }
                }
            }
            // A change above tolerance counts as a jump only if it does not
            // shrink under a much smaller step; root-type cusps (Sidak at
            // alpha = 1) are continuous but steep.
            for (const double side : {-1.0, 1.0}) {
                const double a2 = a + side * cfg.continuity_step;
                const double a3 = a + side * cfg.continuity_step * kRefine;
                if (a2 < 0.0 || a2 > 1.0) continue;
                const auto near = tau.values(Level(a2), view);
                const auto nearer = tau.values(Level(a3), view);
                for (std::size_t i = 0; i < m; ++i) {
                    const double d = std::fabs(near[i] - values[i]);
                    const double d_small = std::fabs(nearer[i] - values[i]);
                    if (d > cfg.continuity_tolerance && d_small > kJumpRatio * d) {
                        witness(a2, "continuity: tau(" + std::to_string(i + 1) + ") jumps by " + std::to_string(d));
                    }
                }
            }
            previous = values;
        }
    }
    return report;
}

PropertyReport oracle_equivalence(const ProcedureExpr& expr, const CheckConfig& cfg, const CompileOptions& options)
{
    cfg.validate();
    const CompiledProcedure closed = compile(expr, options);
    if (!closed.is_closed_form()) {
        throw std::invalid_argument("oracle_equivalence: expression does not compile to a closed form");
    }
    const CompiledProcedure oracle = compile_output_level(expr, options);
    const bool avoid_boundary = contains_complement(expr);
    PropertyReport report{"oracle_equivalence", 0, {}};

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        TrialRng rng(cfg.seed, kOracle, t);
        const std::size_t m = draw_m(closed, cfg, rng);
        std::vector<double> p;
        double a = 0.0;
        bool found = false;
        for (std::size_t attempt = 0; attempt < cfg.max_resample && !found; ++attempt) {
            p = rng.pvalues(m);
            a = draw_alpha(closed, cfg, rng);
            if (!avoid_boundary) {
                found = true;
                break;
            }
            const PValueVector pv(p);
            found = boundary_distance(oracle, pv, Level(a), false) > cfg.boundary_margin &&
                    boundary_distance(closed, pv, Level(a), false) > cfg.boundary_margin;
        }
        if (!found) {
            report.violations.push_back({p, {}, a, a, {}, {},
                                         "no boundary-free sample within " + std::to_string(cfg.max_resample) +
                                             " draws"});
            break;
        }
        ++report.trials_run;
        RejectionSet fast = eval(closed, p, a);
        RejectionSet slow = eval(oracle, p, a);
        if (!(fast == slow)) {
            report.violations.push_back({p, p, a, a, fast, slow, "closed form differs from output-level evaluation"});
        }
    }
    return report;
}

std::vector<double> fdr_example_pvalues()
{
    return {0.0001, 0.0004, 0.0019, 0.0095, 0.0201, 0.0278, 0.0298, 0.0344,
            0.0459, 0.3240, 0.4262, 0.5719, 0.6528, 0.7590, 1.0000};
}

std::vector<PropertyReport> regression_suite()
{
    std::vector<PropertyReport> out;

    auto expect_set = [&](std::string name, const CompiledProcedure& h, std::vector<double> p, double alpha,
                          std::vector<std::size_t> expected) {
        PropertyReport r{std::move(name), 1, {}};
        const auto want = RejectionSet::from_indices(std::move(expected), p.size());
        const auto got = eval(h, p, alpha);
        if (!(got == want)) {
            r.violations.push_back({p, {}, alpha, alpha, got, want, "expected " + want.to_string() + ", got " +
                                                                        got.to_string()});
        }
        out.push_back(std::move(r));
    };
    auto expect_violation = [&](std::string name, PropertyReport found) {
        PropertyReport r{std::move(name), found.trials_run, {}};
        if (found.passed()) {
            r.violations.push_back({{}, {}, 0.0, 0.0, {}, {}, "expected a " + found.property + " violation, none found"});
        }
        out.push_back(std::move(r));
    };
    auto compiled = [](std::string_view text_free_name, auto&& e, CompileOptions o = {}) {
        (void)text_free_name;
        return compile(*e, o);
    };

    const std::vector<double> p_star{0.034, 0.06, 1.0};
    const double a_star = 0.1;
    CheckConfig seeds_only;
    seeds_only.trials = 1;

    // Step-up BH crossed with step-down Sidak.
    {
        const auto bh = expr::builtin(BuiltinName::BH, a_star);
        const auto sidak = expr::builtin(BuiltinName::SidakSD, a_star);
        const auto both = compiled("mixed-intersection", expr::intersect(bh, sidak));
        const std::vector<double> q{0.034, 1.0, 1.0};
        expect_set("mixed_intersection/bh_step_up", compile(*bh), p_star, a_star, {1, 2});
        expect_set("mixed_intersection/sidak_step_down", compile(*sidak), p_star, a_star, {1});
        expect_set("mixed_intersection/at_p", both, p_star, a_star, {1});
        expect_set("mixed_intersection/at_q", both, q, a_star, {});
        const SeedCase seed{p_star, q, a_star, a_star};
        expect_violation("mixed_intersection/condition1_part1_witness",
                         check_condition1_part1(both, seeds_only, std::span(&seed, 1)));
    }

    // Step-up with the Sidak threshold united with step-down with the BH threshold.
    {
        const auto sidak_su = expr::builtin(BuiltinName::SidakSU, a_star);
        const auto bh_sd = expr::builtin(BuiltinName::BHSD, a_star);
        const auto either = compiled("mixed-union", expr::union_of(sidak_su, bh_sd));
        const std::vector<double> q{0.0, 0.06, 1.0};
        expect_set("mixed_union/sidak_step_up", compile(*sidak_su), p_star, a_star, {1});
        expect_set("mixed_union/bh_step_down", compile(*bh_sd), p_star, a_star, {});
        expect_set("mixed_union/bh_step_down_at_q", compile(*bh_sd), q, a_star, {1, 2});
        expect_set("mixed_union/at_p", either, p_star, a_star, {1});
        expect_set("mixed_union/at_q", either, q, a_star, {1, 2});
        const SeedCase seed{p_star, q, a_star, a_star};
        expect_violation("mixed_union/condition1_part1_witness",
                         check_condition1_part1(either, seeds_only, std::span(&seed, 1)));
    }

    // FDR control combined with a top-3 selection on fifteen p-values.
    {
        const auto p = fdr_example_pvalues();
        const auto bh = expr::builtin(BuiltinName::BH, 0.05);
        const auto top3 = expr::topk(3);
        const auto both = expr::intersect(bh, top3);
        CompileOptions fused;
        fused.fuse_inexact = true;
        expect_set("fdr_top3/bh", compile(*bh), p, 0.05, {1, 2, 3, 4});
        expect_set("fdr_top3/top3", compile(*top3), p, 0.05, {1, 2, 3});
        expect_set("fdr_top3/intersection", compile(*both), p, 0.05, {1, 2, 3});
        expect_set("fdr_top3/min_threshold", compile(*both, fused), p, 0.05, {1, 2, 3});
    }

    // Threshold decreasing in rank: tau(1) = 1, tau(2) = 0.
    {
        const auto h = as_compiled(StepwiseProcedure(StepKind::StepUp, ThresholdFunction::table("decreasing", {1.0, 0.0})), 2);
        expect_set("decreasing_rank/at_(1,0.5)", h, {1.0, 0.5}, a_star, {2});
        expect_set("decreasing_rank/at_(0.5,0.5)", h, {0.5, 0.5}, a_star, {1});
        CheckConfig cfg;
        cfg.trials = 1000;
        expect_violation("decreasing_rank/monotonicity", check_monotonicity(h, cfg));
    }

    // Threshold decreasing in alpha with m = 1, tested at p = tau_alpha(1).
    {
        ThresholdFunction tau(
            "decreasing_in_alpha", [](std::size_t, Level a, const SortedView&) { return 0.5 - 0.4 * a.value(); },
            false, true);
        const auto h = as_compiled(StepwiseProcedure(StepKind::StepUp, tau), 1);
        const double a = 0.1;
        const double a2 = 0.2;
        const std::vector<double> p{0.5 - 0.4 * a};
        const SeedCase seed{p, p, a, a2};
        CheckConfig cfg = seeds_only;
        expect_violation("decreasing_alpha/monotonicity", check_monotonicity(h, cfg, std::span(&seed, 1)));
    }

    return out;
}

} // namespace stepwise
