#include <set>

#include "support.hpp"

using namespace zspace;
using namespace zspace::testing;
using Catch::Matchers::ContainsSubstring;

namespace {

const TorusGrid& grid() {
    static const TorusGrid g = default_grid();
    return g;
}

// Quadrature measure of one box at generation k = 0: (ln2/8) * sum_{jj<8} 2^{1 - jj/8} * 16 nodes * h.
double unit_box_measure() { return std::log(2.0) / 8.0 / (1.0 - std::exp2(-1.0 / 8.0)); }

// Every cube in generations k-1, k near Q whose closure lies within distance < 2^k of Q.
std::set<std::pair<int, std::array<long, 2>>> neighbor_oracle(const DyadicCube& q, int d) {
    std::set<std::pair<int, std::array<long, 2>>> out;
    const double side = std::ldexp(1.0, q.k);
    for (int gen = q.k - 3; gen <= q.k + 3; ++gen) {
        const double s = std::ldexp(1.0, gen);
        // s-slabs [2^{gen-1}, 2^gen) meeting (t/2, t) for t in [2^{k-1}, 2^k).
        bool slab = std::ldexp(1.0, gen - 1) < side && s > side / 4;
        if (!slab) continue;
        long reach = static_cast<long>(std::ceil(4 * side / s)) + 2;
        for (long a = -reach; a <= reach; ++a)
            for (long b = (d == 2 ? -reach : 0); b <= (d == 2 ? reach : 0); ++b) {
                std::array<long, 2> r{static_cast<long>(std::floor(q.idx[0] * side / s)) + a, d == 2 ? static_cast<long>(std::floor(q.idx[1] * side / s)) + b : 0};
                double dist2 = 0.0;
                for (int ax = 0; ax < d; ++ax) {
                    double lo = r[ax] * s, hi = lo + s, qlo = q.idx[ax] * side, qhi = qlo + side;
                    double gap = std::max({0.0, lo - qhi, qlo - hi});
                    dist2 += gap * gap;
                }
                if (dist2 < side * side) out.insert({gen, r});
            }
    }
    return out;
}

}  // namespace

TEST_CASE("retained generations on the default grid") {
    auto gens = retained_generations(grid());
    REQUIRE(gens.size() == 7);
    CHECK(gens.front().k == -3);
    CHECK(gens.back().k == 3);
    CHECK(gens.front().j_first == 0);
    for (const auto& G : gens) {
        CHECK(grid().t(G.j_first) == Catch::Approx(std::ldexp(1.0, G.k - 1)).epsilon(1e-14));
        CHECK(G.nodes_per_axis * G.cubes_per_axis == grid().n_x);
    }
    CHECK_THROWS_WITH(dyadic_norm(zero_field(make_grid(1, 64.0, 1024, 0.0625, 0.1, 8)), {2.0, 2.0, 2.0, 0.0}),
                      ContainsSubstring("no complete generation"));
}

TEST_CASE("neighbour sets match a geometric oracle") {
    for (int d : {1, 2})
        for (int k : {-2, 0, 1, 4})
            for (long i0 : {-2L, 0L, 3L})
                for (long i1 : {0L, 1L, -5L}) {
                    DyadicCube q{k, {i0, d == 2 ? i1 : 0}};
                    auto got = neighbors_G(q, d);
                    std::set<std::pair<int, std::array<long, 2>>> mine;
                    for (const auto& r : got) mine.insert({r.k, r.idx});
                    REQUIRE(mine.size() == got.size());
                    REQUIRE(mine == neighbor_oracle(q, d));
                    REQUIRE(got.size() <= neighbors_bound(d));
                }
    auto nb = neighbors_G({0, {0, 0}}, 1);
    for (const auto& r : nb) CHECK((r.k == -1 || r.k == 0));
    CHECK(neighbors_bound(1) == 9);
    CHECK(neighbors_bound(2) == 45);
}

TEST_CASE("dyadic norm of a box indicator") {
    HalfSpaceField F = generate_halfspace(corpus_manifest().find("wi0"), grid());  // k = 0, cube 32
    const double mu = unit_box_measure();
    for (double p : {1.0, 2.0, kInf})
        for (double r : {1.0, 2.0, 4.0})
            for (double beta : {-1.0, 0.0, 0.5}) {
                double expect = std::pow(mu, 1.0 / r);  // 2^{-0 beta} * 1^{d/p}
                CHECK(dyadic_norm(F, {p, 2.0, r, beta}) == Catch::Approx(expect).epsilon(1e-13));
            }
    HalfSpaceField G = generate_halfspace(corpus_manifest().find("wi1"), grid());  // k = 1
    double mu1 = mu;  // the slab measure does not depend on k
    CHECK(dyadic_norm(G, {2.0, 2.0, 2.0, 0.5}) == Catch::Approx(std::exp2(-0.5) * std::sqrt(2.0) * std::sqrt(mu1)).epsilon(1e-13));
    CHECK(dyadic_norm(zero_field(grid()), {2.0, 2.0, 2.0, 0.0}) == 0.0);
}

TEST_CASE("sequence map of a box indicator has one block") {
    HalfSpaceField F = generate_halfspace(corpus_manifest().find("wi0"), grid());
    SequenceField S = to_sequence(F, {2.0, 2.0, 2.0, 0.0});
    int nonzero = 0;
    for (std::size_t gi = 0; gi < S.generations.size(); ++gi) {
        const auto& sg = S.generations[gi];
        std::size_t bs = S.block_size(sg);
        for (std::size_t c = 0; c < sg.gen.cube_count(1); ++c) {
            bool any = false;
            for (std::size_t a = 0; a < bs; ++a) any = any || sg.samples[c * bs + a] != 0.0;
            if (any) {
                ++nonzero;
                CHECK(sg.gen.k == 0);
                CHECK(c == 32);
            }
        }
    }
    CHECK(nonzero == 1);
}

TEST_CASE("sequence round trip is exact") {
    HalfSpaceField F = generate_halfspace(corpus_manifest().find("lp1"), grid());
    for (const SpaceSpec& s : {SpaceSpec{2.0, 2.0, 2.0, 0.0}, SpaceSpec{0.7, 1.0, 3.0, -1.0}, SpaceSpec{kInf, 1.0, 1.0, 1.0}}) {
        SequenceField S = to_sequence(F, s);
        HalfSpaceField back = from_sequence(S);
        for (const auto& sg : S.generations)
            for (int jj = 0; jj < grid().s_oct; ++jj) {
                auto a = F.row(sg.gen.j_first + jj), b = back.row(sg.gen.j_first + jj);
                REQUIRE(std::equal(a.begin(), a.end(), b.begin()));
            }
        SequenceField again = to_sequence(back, s);
        for (std::size_t gi = 0; gi < S.generations.size(); ++gi) REQUIRE(again.generations[gi].samples == S.generations[gi].samples);
        CHECK(relative_difference(sequence_norm(S, s.p, s.q, s.beta), dyadic_norm(F, s)) < 1e-12);
    }
    SequenceField zero = zero_sequence(grid(), {2.0, 2.0, 2.0, 0.0});
    for (double v : from_sequence(zero).values) REQUIRE(v == 0.0);
    SequenceField broken = zero;
    broken.generations.pop_back();
    CHECK_THROWS_AS(from_sequence(broken), ValidationError);
}

TEST_CASE("one unit block") {
    SpaceSpec s{2.0, 2.0, 2.0, 0.0};
    SequenceField S = zero_sequence(grid(), s);
    std::size_t g0 = 0;
    while (S.generations[g0].gen.k != 0) ++g0;
    std::size_t bs = S.block_size(S.generations[g0]);
    for (std::size_t a = 0; a < bs; ++a) S.set_value(g0, 0, a, 1.0);
    CHECK(S.value(g0, 0, 3) == 1.0);
    CHECK(sequence_norm(S, s.p, s.q, s.beta) == Catch::Approx(std::sqrt(unit_box_measure())).epsilon(1e-13));
    HalfSpaceField F = from_sequence(S);
    CHECK(dyadic_norm(F, s) == Catch::Approx(sequence_norm(S, s.p, s.q, s.beta)).epsilon(1e-13));
    // The block scale 2^{kd/p} is stored separately from the samples.
    SpaceSpec s1{1.0, 1.0, 1.0, 0.0};
    SequenceField T = zero_sequence(grid(), s1);
    std::size_t g1 = 0;
    while (T.generations[g1].gen.k != 2) ++g1;
    CHECK(T.generations[g1].scale == 4.0);
    T.set_value(g1, 1, 0, 3.0);
    CHECK(T.generations[g1].samples[T.block_size(T.generations[g1])] == 0.75);
}
