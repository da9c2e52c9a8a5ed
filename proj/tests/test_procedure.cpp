#include <stepwise/builtins.hpp>
#include <stepwise/procedure.hpp>
#include <stepwise/verify.hpp>

#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace stepwise;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::size_t> run(const StepwiseProcedure& h, std::vector<double> p, double alpha)
{
    return h.evaluate(PValueVector(std::move(p)), Level(alpha)).indices();
}

const std::vector<double> p_star{0.034, 0.06, 1.0};

} // namespace

TEST_CASE("step-up and step-down on the three-hypothesis vectors", "[procedure]")
{
    using V = std::vector<std::size_t>;
    CHECK(run(builtin(BuiltinName::BH, {0.1}), p_star, 0.1) == V{1, 2});
    CHECK(run(builtin(BuiltinName::SidakSU, {0.1}), p_star, 0.1) == V{1});
    CHECK(run(builtin(BuiltinName::SidakSD, {0.1}), p_star, 0.1) == V{1});
    CHECK(run(builtin(BuiltinName::BHSD, {0.1}), {0.0, 0.06, 1.0}, 0.1) == V{1, 2});
    CHECK(run(builtin(BuiltinName::BHSD, {0.1}), p_star, 0.1).empty());
}

TEST_CASE("free evaluators match the procedure object", "[procedure]")
{
    const auto h = builtin(BuiltinName::BH);
    CHECK(eval_step_up(h.threshold(), PValueVector(p_star), Level(0.1)).indices() ==
          std::vector<std::size_t>{1, 2});
    const auto d = builtin(BuiltinName::BHSD);
    CHECK(eval_step_down(d.threshold(), PValueVector(p_star), Level(0.1)).empty());
}

TEST_CASE("empty maxima and minima", "[procedure]")
{
    // tau < 1 everywhere and p = 1: step-up rejects nothing.
    for (auto name : all_builtins) {
        if (name == BuiltinName::TopK) continue;
        const auto h = builtin(name, {0.5});
        if (h.kind() == StepKind::StepUp) CHECK(run(h, {1.0, 1.0, 1.0}, 0.5).empty());
    }
    // Every p_(j) <= tau(j): step-down rejects all.
    CHECK(run(builtin(BuiltinName::Holm, {0.5}), {0.0, 0.0}, 0.5) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("catalogue thresholds", "[procedure]")
{
    const SortedView v(PValueVector{0.5, 0.5, 0.5, 0.5});
    const auto holm = builtin(BuiltinName::Holm).threshold().values(Level(0.05), v);
    REQUIRE(holm.size() == 4);
    CHECK_THAT(holm[0], WithinRel(0.0125, 1e-15));
    CHECK_THAT(holm[1], WithinRel(0.05 / 3, 1e-15));
    CHECK_THAT(holm[2], WithinRel(0.025, 1e-15));
    CHECK_THAT(holm[3], WithinRel(0.05, 1e-15));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 1 + trial % 10;
        const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto p = oracle::random_pvalues(rng, m);
        const auto sorted = oracle::ascending(p);
        const SortedView view(p);
        for (auto name : all_builtins) {
            const std::size_t k = 1 + trial % m;
            const auto tau = builtin(name, {std::nullopt, k}).threshold().values(Level(alpha), view);
            for (std::size_t i = 1; i <= m; ++i) {
                REQUIRE_THAT(tau[i - 1], WithinAbs(oracle::threshold(name, alpha, k, i, m, sorted), 1e-14));
            }
        }
    }
}

TEST_CASE("catalogue kinds and names", "[procedure]")
{
    CHECK(builtin_kind(BuiltinName::SidakSD) == StepKind::StepDown);
    CHECK(builtin_kind(BuiltinName::Holm) == StepKind::StepDown);
    CHECK(builtin_kind(BuiltinName::BHSD) == StepKind::StepDown);
    CHECK(builtin_kind(BuiltinName::Hochberg) == StepKind::StepUp);
    CHECK(builtin_kind(BuiltinName::TopK) == StepKind::StepUp);
    for (auto name : all_builtins) CHECK(builtin_from_name(to_string(name)) == name);
    CHECK(builtin_from_name("BH") == BuiltinName::BH);
    CHECK_FALSE(builtin_from_name("storey").has_value());
    CHECK(builtin("holm", {0.05}).kind() == StepKind::StepDown);
    CHECK_THROWS_AS(builtin("storey"), std::invalid_argument);
}

TEST_CASE("catalogue parameter errors", "[procedure]")
{
    CHECK_THROWS_AS(builtin(BuiltinName::BH, {1.5}), std::invalid_argument);
    CHECK_THROWS_AS(builtin(BuiltinName::BH, {-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(builtin(BuiltinName::TopK, {std::nullopt, 0}), std::invalid_argument);
    const auto top5 = builtin(BuiltinName::TopK, {std::nullopt, 5});
    CHECK_THROWS_AS(top5.evaluate(PValueVector{0.1, 0.2}, Level(0.05)), std::invalid_argument);
}

TEST_CASE("literal levels ignore the runtime level", "[procedure]")
{
    const auto h = builtin(BuiltinName::BH, {0.1});
    CHECK_FALSE(h.threshold().depends_on_alpha());
    CHECK(run(h, p_star, 0.0) == run(h, p_star, 1.0));
    CHECK(builtin(BuiltinName::BH).threshold().depends_on_alpha());
    CHECK(builtin(BuiltinName::TopK, {std::nullopt, 2}).threshold().depends_on_p());
}

TEST_CASE("fifteen-hypothesis FDR example", "[procedure]")
{
    const auto p = fdr_example_pvalues();
    REQUIRE(p.size() == 15);
    CHECK(run(builtin(BuiltinName::BH, {0.05}), p, 0.05) == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(run(builtin(BuiltinName::TopK, {std::nullopt, 3}), p, 0.05) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("evaluators agree with the brute-force definition", "[procedure]")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t m = 1 + trial % 9;
        // Every third vector sits on a coarse grid so that ties are common.
        const auto p = oracle::random_pvalues(rng, m, trial % 3 == 0 ? 10 : 0);
        const double alpha = u(rng);
        for (auto name : all_builtins) {
            const std::size_t k = 1 + trial % m;
            const auto h = builtin(name, {std::nullopt, k});
            const auto got = h.evaluate(PValueVector(p), Level(alpha)).indices();
            INFO(to_string(name) << " m=" << m << " alpha=" << alpha);
            REQUIRE(got == oracle::to_vector(oracle::builtin(name, alpha, k, p)));
        }
    }
}

TEST_CASE("tied p-values receive identical decisions", "[procedure]")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t m = 2 + trial % 7;
        const auto p = oracle::random_pvalues(rng, m, 4);
        const double alpha = u(rng);
        for (auto name : all_builtins) {
            const auto h = builtin(name, {std::nullopt, 1 + trial % m});
            const auto r = h.evaluate(PValueVector(p), Level(alpha));
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    if (p[i] == p[j]) REQUIRE(r.contains(i + 1) == r.contains(j + 1));
                }
            }
        }
    }
}

TEST_CASE("table thresholds and combinators", "[procedure]")
{
    const auto t = ThresholdFunction::table("t", {0.2, 0.4});
    const SortedView v(PValueVector{0.3, 0.1});
    CHECK(t.values(Level(0.0), v) == std::vector<double>{0.2, 0.4});
    CHECK_THROWS_AS(t.values(Level(0.0), SortedView(PValueVector{0.1})), std::invalid_argument);

    const auto s = ThresholdFunction::table("s", {0.3, 0.1});
    CHECK(pointwise_max(t, s).values(Level(0.0), v) == std::vector<double>{0.3, 0.4});
    CHECK(pointwise_min(t, s).values(Level(0.0), v) == std::vector<double>{0.2, 0.1});
    // 1 - t(m + 1 - i)
    const auto r = reflected(t, Level(0.5)).values(Level(0.9), v);
    CHECK_THAT(r[0], WithinAbs(0.6, 1e-15));
    CHECK_THAT(r[1], WithinAbs(0.8, 1e-15));
}

TEST_CASE("p-scale thresholds undo the reflection", "[procedure]")
{
    const auto bonf = builtin(BuiltinName::Bonferroni, {0.3});
    const StepwiseProcedure comp(StepKind::StepDown, reflected(bonf.threshold(), Level(0.3)),
                                 InputTransform::OneMinus);
    const PValueVector p{0.5, 0.05, 0.9};
    for (double t : comp.p_scale_thresholds(p, Level(0.3))) CHECK_THAT(t, WithinAbs(0.1, 1e-15));
    CHECK(to_string(StepKind::StepUp) == "step-up");
    CHECK(to_string(InputTransform::OneMinus) == "one-minus");
}
