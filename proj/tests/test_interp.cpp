#include "support.hpp"

using namespace zspace;
using namespace zspace::testing;

namespace {

const TorusGrid& grid() {
    static const TorusGrid g = default_grid();
    return g;
}

const NamedField& field(const std::string& id) {
    static std::map<std::string, NamedField> cache;
    auto it = cache.find(id);
    if (it == cache.end()) it = cache.emplace(id, generate_named(corpus_manifest().find(id), grid())).first;
    return it->second;
}

const SpaceSpec kS0{2.0, 2.0, 2.0, 0.0};
const SpaceSpec kS1{2.0, 2.0, 2.0, -1.0};

}  // namespace

TEST_CASE("time cuts split a field exactly") {
    const auto& F = field("mb0").F;
    for (int k : {-3, 0, 2}) {
        HalfSpaceField up = time_cut(F, k, true), down = time_cut(F, k, false);
        int jc = cut_index(grid(), k);
        CHECK(grid().t(jc) == Catch::Approx(std::ldexp(1.0, k)).epsilon(1e-14));
        for (std::size_t n = 0; n < F.values.size(); ++n) REQUIRE(up.values[n] + down.values[n] == F.values[n]);
        for (int j = 0; j <= grid().J; ++j) {
            bool upper = grid().t(j) >= std::ldexp(1.0, k) * (1 - 1e-12);
            for (double v : (upper ? down : up).row(j)) REQUIRE(v == 0.0);
        }
    }
    CHECK(cut_index(grid(), -10) == 0);
    CHECK(cut_index(grid(), 10) == grid().J + 1);
}

TEST_CASE("K functional bounds") {
    CHECK(k_functional_upper(zero_field(grid()), kS0, kS1, 0) == 0.0);
    const auto& F = field("g1").F;
    HalfSpaceField high = time_cut(F, 0, true);
    CHECK(k_functional_upper(high, kS0, kS1, 0) == z_norm(high, kS0));
    CHECK_THROWS_AS(k_functional_upper(F, kS0, {3.0, 2.0, 2.0, -1.0}, 0), ValidationError);
    CHECK_THROWS_AS(k_functional_upper(F, kS0, kS0, 0), ValidationError);
    CHECK(k_window(grid()) == std::vector<int>{-3, -2, -1, 0, 1, 2});
}

TEST_CASE("K profile shape on the corpus") {
    for (const auto& e : corpus_manifest().entries) {
        const auto& F = field(e.id).F;
        for (EndpointKind kind : {EndpointKind::Z, EndpointKind::T}) {
            KProfile P = build_k_profile(F, kS0, kS1, kind);
            KShape s = k_profile_shape(P);
            INFO(e.id);
            CHECK(s.monotone_violation <= 1e-10);
            CHECK(s.ratio_violation <= 1e-10);
            CHECK(s.bound_violation <= 1e-10);
            for (std::size_t n = 0; n < P.ks.size(); ++n) CHECK(P.khat[n] <= P.single_split[n]);
        }
    }
}

TEST_CASE("real interpolation norm") {
    const auto& F = field("lp0").F;
    CHECK_THROWS_AS(real_interp_norm(F, 0.0, 2.0, kS0, kS1), ValidationError);
    CHECK_THROWS_AS(real_interp_norm(F, 1.0, 2.0, kS0, kS1), ValidationError);
    CHECK(real_interp_norm(zero_field(grid()), 0.5, 2.0, kS0, kS1) == 0.0);
    // Swapping the endpoints maps theta to 1 - theta.
    CHECK(real_interp_norm(F, 0.3, 2.0, kS1, kS0) == Catch::Approx(real_interp_norm(F, 0.7, 2.0, kS0, kS1)).epsilon(1e-14));
    SpaceSpec target = real_target_spec(kS0, kS1, 0.3, 2.0);
    CHECK(target.beta == Catch::Approx(-0.3));
    std::vector<NamedField> fs{field("g0"), field("mb1"), field("pt0")};
    auto rep = real_interp_check(fs, 0.5, kInf, kS0, kS1);
    CHECK(rep.width() < 100.0);
    auto tent = tent_real_interp_check(fs, 0.5, 1.0, kS0, kS1);
    CHECK(tent.width() < 100.0);
    CHECK_THROWS_AS(tent_real_interp_check(fs, 0.5, 1.0, {kInf, 2.0, 2.0, 0.0}, {kInf, 2.0, 2.0, -1.0}), ValidationError);
}

TEST_CASE("nesting") {
    std::vector<NamedField> fs{field("g0"), field("b0"), field("wi1")};
    auto same = nesting_check(fs, 2.0, 2.0, 2.0, 0.0);
    for (const auto& row : same.lower.rows) CHECK(row.ratio == Catch::Approx(1.0).epsilon(1e-12));
    for (const auto& row : same.upper.rows) CHECK(row.ratio == Catch::Approx(1.0).epsilon(1e-12));
    for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 2}, {2, 1}, {2, 4}}) {
        auto rep = nesting_check(fs, p, q, 2.0, 0.0);
        CHECK(rep.lower.max_ratio() < 50.0);
        CHECK(rep.upper.max_ratio() < 50.0);
    }
    auto zero = nesting_check({NamedField{"zero", zero_field(grid()), std::nullopt}}, 1.0, 2.0, 2.0, 0.0);
    CHECK(zero.lower.degenerate == 1);
}

TEST_CASE("embeddings") {
    CHECK(embedding_admissible({1.0, 1.0, 2.0, 0.0}, {2.0, 2.0, 1.0, -0.5}, 1));
    CHECK_FALSE(embedding_admissible({1.0, 1.0, 2.0, 0.0}, {2.0, 2.0, 1.0, 0.0}, 1));
    CHECK_FALSE(embedding_admissible({2.0, 1.0, 2.0, 0.0}, {1.0, 1.0, 2.0, -1.0}, 1));
    std::vector<NamedField> fs{field("g0"), field("mg1"), field("pt1")};
    auto id = embedding_check(fs, kS0, kS0);
    for (const auto& row : id.rows) CHECK(row.ratio == 1.0);
    auto rep = embedding_check(fs, {1.0, 1.0, 2.0, 0.0}, {2.0, 2.0, 1.0, -0.5});
    CHECK(rep.max_ratio() < 50.0);
    CHECK_THROWS_AS(embedding_check(fs, {2.0, 2.0, 2.0, 0.0}, {1.0, 2.0, 2.0, 0.0}), ValidationError);
    auto zero = embedding_check({NamedField{"zero", zero_field(grid()), std::nullopt}}, kS0, kS0);
    CHECK(zero.degenerate == 1);
}

TEST_CASE("convexity") {
    SpaceSpec s{2.0, 3.0, 2.0, 0.3};
    auto one = convexity_check({field("g0").F}, 1.0, s);
    CHECK(std::abs(one.relative_slack) < 1e-12);
    CHECK(one.identity_max_rel_err < 1e-12);
    std::vector<HalfSpaceField> five{field("g0").F, field("mg0").F, field("b1").F, field("lp1").F, field("pt0").F};
    auto strict = convexity_check(five, 1.0, s);
    CHECK(strict.relative_slack > 0.0);
    CHECK(strict.identity_max_rel_err < 1e-12);
    for (double a : {2.0, 3.0}) {
        auto eq = convexity_check({field("wi0").F, field("wi1").F}, a, {a, a, a, 0.0});
        CHECK(std::abs(eq.relative_slack) < 1e-10);
    }
    CHECK_THROWS_AS(convexity_check(five, 2.5, s), ValidationError);
    CHECK_THROWS_AS(convexity_check({}, 1.0, s), ValidationError);
    SpaceSpec c = convexified({2.0, kInf, 4.0, 0.5}, 2.0);
    CHECK(c.p.value() == 1.0);
    CHECK(c.q.is_infinite());
    CHECK(c.r.value() == 2.0);
    CHECK(c.beta == 1.0);
}

TEST_CASE("log convexity") {
    SpaceSpec a0{1.0, 1.0, 2.0, 0.0}, a1{3.0, 3.0, 2.0, 1.0};
    SpaceSpec mid = interpolate_spec(a0, a1, 0.5);
    CHECK(mid.p.value() == Catch::Approx(1.5));
    CHECK(mid.q.value() == Catch::Approx(1.5));
    CHECK(mid.r.value() == Catch::Approx(2.0));
    CHECK(mid.beta == Catch::Approx(0.5));
    CHECK(interpolate_spec({kInf, 2.0, 2.0, 0.0}, {kInf, 2.0, 2.0, 1.0}, 0.5).p.is_infinite());
    std::vector<NamedField> fs{field("g0"), field("mb0"), field("wi0"), field("lp2")};
    auto rep = log_convexity_check(fs, 0.5, a0, a1);
    CHECK(rep.max_ratio() < 20.0);
    auto deg = log_convexity_check(fs, 0.5, kS0, kS0);
    for (const auto& row : deg.rows) CHECK(row.ratio == Catch::Approx(1.0).epsilon(1e-14));
    auto edge = log_convexity_check(fs, 0.0, a0, a1);
    for (const auto& row : edge.rows) CHECK(row.ratio == Catch::Approx(1.0).epsilon(1e-14));
}
