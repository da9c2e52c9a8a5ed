// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <stepwise/builtins.hpp>
#include <stepwise/dsl.hpp>
#include <stepwise/verify.hpp>

#include "random_expr.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace stepwise;

namespace {

constexpr std::size_t kTrials = 10000;
constexpr double kFuzzSeconds = 10.0;

struct Outcome {
    bool pass = true;
    std::ostringstream notes;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes << "\n      - " << what;
        }
    }
};

using V = std::vector<std::size_t>;

V eval_at(const CompiledProcedure& c, std::vector<double> p, double alpha)
{
    return c.evaluate(PValueVector(std::move(p)), Level(alpha)).indices();
}

std::string set_text(const V& v)
{
    std::string out = "{";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out + "}";
}

void expect_set(Outcome& o, const std::string& label, const V& got, const V& want)
{
    o.expect(got == want, label + ": got " + set_text(got) + ", expected " + set_text(want));
}

CompiledProcedure compiled(const std::string& text, CompileOptions options = {})
{
    return compile(*parse(text), options);
}

CheckConfig trials(std::size_t n)
{
    CheckConfig cfg;
    cfg.trials = n;
    return cfg;
}

const std::vector<double> p_star{0.034, 0.06, 1.0};
constexpr double a_star = 0.1;

std::string leaf_text(BuiltinName name)
{
    return name == BuiltinName::TopK ? "topk(1)" : std::string(to_string(name)) + "(alpha)";
}

std::vector<BuiltinName> of_kind(StepKind kind)
{
    std::vector<BuiltinName> out;
    for (auto n : all_builtins) {
        if (builtin_kind(n) == kind) out.push_back(n);
    }
    return out;
}

// Same-kind pairs, unordered, including a procedure with itself.
std::vector<std::pair<BuiltinName, BuiltinName>> same_kind_pairs()
{
    std::vector<std::pair<BuiltinName, BuiltinName>> out;
    for (auto kind : {StepKind::StepUp, StepKind::StepDown}) {
        const auto names = of_kind(kind);
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i; j < names.size(); ++j) out.emplace_back(names[i], names[j]);
        }
    }
    return out;
}

Outcome criterion1()
{
    Outcome o;
    expect_set(o, "bh step-up at p*", eval_at(compiled("bh(0.1)"), p_star, a_star), {1, 2});
    expect_set(o, "sidak step-down at p*", eval_at(compiled("sidak_sd(0.1)"), p_star, a_star), {1});
    const auto both = compiled("intersect(bh(0.1), sidak_sd(0.1))");
    o.expect(!both.is_closed_form(), "mixed intersection should be evaluated at output level");
    expect_set(o, "intersection at p*", eval_at(both, p_star, a_star), {1});
    expect_set(o, "intersection at q", eval_at(both, {0.034, 1.0, 1.0}, a_star), {});
    return o;
}

Outcome criterion2()
{
    Outcome o;
    expect_set(o, "sidak step-up at p*", eval_at(compiled("sidak_su(0.1)"), p_star, a_star), {1});
    expect_set(o, "bh step-down at p*", eval_at(compiled("bh_sd(0.1)"), p_star, a_star), {});
    const auto either = compiled("union(sidak_su(0.1), bh_sd(0.1))");
    o.expect(!either.is_closed_form(), "mixed union should be evaluated at output level");
    expect_set(o, "union at p*", eval_at(either, p_star, a_star), {1});
    expect_set(o, "union at q", eval_at(either, {0.0, 0.06, 1.0}, a_star), {1, 2});
    return o;
}

Outcome criterion3()
{
    Outcome o;
    const auto p = fdr_example_pvalues();
    o.expect(p.size() == 15, "vector length");
    expect_set(o, "bh(0.05) transcription check", eval_at(compiled("bh(0.05)"), p, 0.05), {1, 2, 3, 4});
    expect_set(o, "intersect(bh(0.05), topk(3))", eval_at(compiled("intersect(bh(0.05), topk(3))"), p, 0.05),
               {1, 2, 3});
    CompileOptions fused;
    fused.fuse_inexact = true;
    expect_set(o, "min-threshold closed form",
               eval_at(compiled("intersect(bh(0.05), topk(3))", fused), p, 0.05), {1, 2, 3});
    return o;
}

Outcome criterion4()
{
    Outcome o;
    const auto h = as_compiled(StepwiseProcedure(StepKind::StepUp, ThresholdFunction::table("tau", {1.0, 0.0})), 2);
    expect_set(o, "h((0.5,0.5))", eval_at(h, {0.5, 0.5}, a_star), {1});
    expect_set(o, "h((1,0.5))", eval_at(h, {1.0, 0.5}, a_star), {2});
    const auto r = check_monotonicity(h, trials(1000));
    o.expect(!r.passed(), "check_monotonicity did not flag the decreasing threshold");
    return o;
}

Outcome criterion5()
{
    Outcome o;
    CheckConfig cfg = trials(kTrials);
    CompileOptions fused;
    fused.fuse_inexact = true;
    for (const auto& [a, b] : same_kind_pairs()) {
        for (const char* op : {"union", "intersect"}) {
            const std::string text = std::string(op) + "(" + leaf_text(a) + ", " + leaf_text(b) + ")";
            const auto r = oracle_equivalence(*parse(text), cfg, fused);
            o.expect(r.passed(), text + ": " + std::to_string(r.violations.size()) + " mismatches in " +
                                     std::to_string(r.trials_run) + " trials");
        }
    }

    // Complement at a fixed level, compared with the set complement on
    // samples at least boundary_margin away from every threshold.
    const double alpha0 = 0.1;
    for (auto name : all_builtins) {
        const auto h = builtin(name, {alpha0, 1});
        const auto c = complement(h, alpha0);
        std::size_t mismatches = 0;
        std::size_t run = 0;
        bool starved = false;
        for (std::size_t t = 0; t < kTrials && !starved; ++t) {
            std::mt19937_64 rng(t * 7919 + static_cast<std::size_t>(name));
            const std::size_t m = 1 + t % 8;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            bool found = false;
            std::vector<double> p(m);
            for (std::size_t attempt = 0; attempt < cfg.max_resample && !found; ++attempt) {
                for (auto& x : p) x = u(rng);
                const SortedView s(p);
                const auto tau = h.threshold().values(Level(alpha0), s);
                double dist = 1.0;
                for (std::size_t r = 1; r <= m; ++r) {
                    dist = std::min(dist, std::abs(s.value(r) - tau[r - 1]));
                    if (r > 1) dist = std::min(dist, s.value(r) - s.value(r - 1));
                }
                found = dist > cfg.boundary_margin;
            }
            if (!found) {
                starved = true;
                break;
            }
            ++run;
            const PValueVector pv(p);
            if (!(c.evaluate(pv, Level(alpha0)) == h.evaluate(pv, Level(alpha0)).complemented())) ++mismatches;
        }
        const std::string label = "complement(" + std::string(to_string(name)) + ")";
        o.expect(!starved, label + ": no boundary-free sample within " + std::to_string(cfg.max_resample) + " draws");
        o.expect(mismatches == 0, label + ": " + std::to_string(mismatches) + " mismatches in " + std::to_string(run) +
                                      " trials");
    }
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const CheckConfig cfg = trials(kTrials);
    std::vector<std::string> subjects;
    for (auto name : all_builtins) subjects.push_back(leaf_text(name));
    for (const auto& [a, b] : same_kind_pairs()) {
        const char* op = builtin_kind(a) == StepKind::StepUp ? "union" : "intersect";
        subjects.push_back(std::string(op) + "(" + leaf_text(a) + ", " + leaf_text(b) + ")");
    }
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        const auto& text = subjects[s];
        const auto c = compiled(text);
        const bool leaf = s < all_builtins.size();
        // Compositions count only when compile() guarantees them; built-ins always count.
        if (!leaf && (!c.is_closed_form() || c.monotonic_claim() != Claim::Guaranteed ||
                      c.well_behaved_claim() != Claim::Guaranteed)) {
            continue;
        }
        for (const auto& r : {check_monotonicity(c, cfg), check_condition1_part1(c, cfg), check_condition1_part2(c, cfg)}) {
            o.expect(r.passed() && r.trials_run >= kTrials,
                     text + " " + r.property + ": " + std::to_string(r.violations.size()) + " violations in " +
                         std::to_string(r.trials_run) + " trials");
        }
    }

    const CheckConfig grid = trials(50);
    std::vector<std::pair<std::string, ThresholdFunction>> thresholds;
    for (auto a : all_builtins) {
        const auto ta = builtin(a, {std::nullopt, 1}).threshold();
        thresholds.emplace_back(std::string(to_string(a)), ta);
        for (auto b : all_builtins) {
            if (b < a) continue;
            const auto tb = builtin(b, {std::nullopt, 1}).threshold();
            thresholds.emplace_back("max(" + std::string(to_string(a)) + "," + std::string(to_string(b)) + ")",
                                    pointwise_max(ta, tb));
            thresholds.emplace_back("min(" + std::string(to_string(a)) + "," + std::string(to_string(b)) + ")",
                                    pointwise_min(ta, tb));
        }
    }
    for (const auto& [name, tau] : thresholds) {
        for (std::size_t m = 1; m <= 8; ++m) {
            const auto r = check_condition2(tau, m, grid);
            o.expect(r.passed(), name + " m=" + std::to_string(m) + " condition2: " +
                                     (r.passed() ? "" : r.violations.front().detail));
        }
    }
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const CheckConfig one = trials(1);
    {
        const auto both = compiled("intersect(bh(0.1), sidak_sd(0.1))");
        const SeedCase seed{p_star, {0.034, 1.0, 1.0}, a_star, a_star};
        o.expect(!check_condition1_part1(both, one, std::span(&seed, 1)).passed(),
                 "mixed intersection: no condition1_part1 violation");
    }
    {
        const auto either = compiled("union(sidak_su(0.1), bh_sd(0.1))");
        const SeedCase seed{p_star, {0.0, 0.06, 1.0}, a_star, a_star};
        o.expect(!check_condition1_part1(either, one, std::span(&seed, 1)).passed(),
                 "mixed union: no condition1_part1 violation");
    }
    const CheckConfig cfg = trials(1000);
    o.expect(!check_monotonicity(compiled("complement(bh(0.1), 0.1)"), cfg).passed(),
             "complement: no monotonicity violation in 1000 trials");
    o.expect(!check_monotonicity(compiled("diff(bh(alpha), hochberg(alpha))"), cfg).passed(),
             "step-up difference: no monotonicity violation in 1000 trials");
    o.expect(!check_monotonicity(compiled("diff(sidak_sd(alpha), holm(alpha))"), cfg).passed(),
             "step-down difference: no monotonicity violation in 1000 trials");
    return o;
}

Outcome criterion8()
{
    Outcome o;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i) {
        const auto e = oracle::random_expr(rng, 4);
        const std::string text = format(*e);
        try {
            if (!structurally_equal(*e, *parse(text))) {
                o.expect(false, "round trip changed " + text);
                break;
            }
        }
        catch (const std::exception& err) {
            o.expect(false, "round trip failed to parse " + text + ": " + err.what());
            break;
        }
    }

    const std::string alphabet = "bhtopkunionintersectdiffcomplementalpha(),=.0123456789eE+- \t";
    const auto start = std::chrono::steady_clock::now();
    std::size_t inputs = 0;
    while (std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < kFuzzSeconds) {
        std::string text(rng() % 64, '\0');
        for (auto& ch : text) {
            ch = (inputs % 2) ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
        }
        ++inputs;
        try {
            parse(text);
        }
        catch (const ParseError& err) {
            if (err.span().end > text.size() || err.span().start > err.span().end) {
                o.expect(false, "span outside input");
                break;
            }
        }
        catch (const std::exception& err) {
            o.expect(false, std::string("unexpected exception: ") + err.what());
            break;
        }
    }
    if (inputs == 0) o.expect(false, "fuzzer ran no inputs");
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "mixed step-up/step-down intersection sets (exact)", criterion1},
        {2, "mixed step-up/step-down union sets (exact)", criterion2},
        {3, "fifteen-hypothesis FDR with top-3 selection (exact)", criterion3},
        {4, "decreasing-threshold witnesses and monotonicity flag (exact)", criterion4},
        {5, "closed form vs output level, 10000 trials, m 1..8 (0 mismatches)", criterion5},
        {6, "property suites, 10000 trials; condition 2 on the alpha grid (0 violations)", criterion6},
        {7, "negative suites on fixed vectors and within 1000 trials (violation found)", criterion7},
        {8, "DSL round trip on 1000 trees and 10 s parser fuzz (no failure)", criterion8},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        }
        catch (const std::exception& e) {
            o.pass = false;
            o.notes << "\n      - exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s  %s  [%.1fs]%s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs,
                    o.pass ? "" : o.notes.str().c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
