#include <set>

#include "support.hpp"

using namespace zspace;
using namespace zspace::testing;

namespace {

const VerifyContext& context() {
    static const VerifyContext ctx = make_context(corpus_manifest(), default_grid());
    return ctx;
}

EquivalenceReport report_of(std::vector<double> ratios) {
    EquivalenceReport rep;
    for (std::size_t i = 0; i < ratios.size(); ++i) rep.add("f" + std::to_string(i), ratios[i], 1.0);
    return rep;
}

}  // namespace

TEST_CASE("metrics and suite results") {
    Metric less{"a", 1.0, Metric::Rel::Less, 1.0};
    Metric le{"b", 1.0, Metric::Rel::LessEq, 1.0};
    Metric ge{"c", 0.5, Metric::Rel::GreaterEq, 1.0};
    CHECK_FALSE(less.ok());
    CHECK(le.ok());
    CHECK_FALSE(ge.ok());
    CHECK(less.relation() == "<");
    CHECK(ge.relation() == ">=");
    SuiteResult res;
    CHECK_FALSE(res.passed());
    res.metrics = {le};
    CHECK(res.passed());
    res.metrics.push_back(less);
    CHECK_FALSE(res.passed());
    CHECK(res.metric("b").value == 1.0);
    CHECK_THROWS_AS(res.metric("zz"), ValidationError);
    Metric nan{"n", std::nan(""), Metric::Rel::Less, 1.0};
    CHECK_FALSE(nan.ok());
}

TEST_CASE("registry") {
    const auto& reg = suite_registry();
    REQUIRE(reg.size() == 14);
    CHECK(reg.front().name == "whitney-invariance");
    CHECK(reg.back().name == "gw-char");
    std::set<std::string> names;
    for (const auto& e : reg) names.insert(e.name);
    CHECK(names.size() == 14);
    CHECK_THROWS_AS(run_suite("nope", context()), ValidationError);
    CHECK(equivalence_sweep().size() == 54);
}

TEST_CASE("envelope helpers") {
    auto a = report_of({1.0, 2.0}), b = report_of({4.0});
    CHECK(detail::global_width({a, b}) == 4.0);
    CHECK(detail::max_width({a, b}) == 2.0);
    CHECK(detail::global_width({}) == 1.0);
    // Identical normalised ratios across r give no drift.
    CHECK(r_drift({report_of({1.0, 2.0, 4.0}), report_of({3.0, 6.0, 12.0})}) == Catch::Approx(0.0).margin(1e-15));
    // Field 0 moves by a factor 2 relative to the medians.
    CHECK(r_drift({report_of({1.0, 2.0, 2.0}), report_of({2.0, 2.0, 2.0})}) == Catch::Approx(1.0));
    CHECK(r_drift({report_of({1.0, 2.0}), report_of({1.0})}) == kInf);
}

TEST_CASE("context") {
    const auto& ctx = context();
    CHECK(ctx.fields.size() == 20);
    REQUIRE(ctx.boundary_fields.size() == kBoundarySetSize);
    const std::vector<std::string> want{"g0", "g1", "mg0", "mg1", "b0", "b1", "mb0", "mb1", "lp0", "lp1"};
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(ctx.boundary_fields[i].id == want[i]);
    CHECK(ctx.family.k_min <= -4);
    CHECK(ctx.family.k_max >= 6);
}

TEST_CASE("dyadic box measure") {
    TorusGrid g = default_grid();
    double mu = (std::log(2.0) / 8) / (1 - std::exp2(-1.0 / 8));
    CHECK(dyadic_box_measure(g) == Catch::Approx(mu).epsilon(1e-13));
    for (const auto& [s0, s1] : embedding_quadruples()) CHECK(embedding_admissible(s0, s1, 1));
}

TEST_CASE("cheap suites pass on the corpus") {
    for (std::string name : {"dyadic", "localization", "vv"}) {
        SuiteResult res = run_suite(name, context());
        INFO(name);
        CHECK(res.name == name);
        CHECK_FALSE(res.metrics.empty());
        for (const auto& m : res.metrics) {
            INFO(m.name << " = " << m.value);
            CHECK(m.ok());
        }
        for (const auto& rep : res.reports) CHECK(rep.manifest_version == "1");
    }
}

TEST_CASE("oracle check on a small grid") {
    VerifyContext ctx = make_context(corpus_manifest(), make_grid(1, 64.0, 256, 0.0625, 8.0, 8), 2);
    OracleResult o = oracle_check(ctx);
    CHECK(o.evaluations == 20 * oracle_settings().size());
    CHECK(o.max_rel < limits::kOracleRel);
}
