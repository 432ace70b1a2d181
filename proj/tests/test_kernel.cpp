#include <numbers>

#include "support.hpp"

using namespace zspace;
using namespace zspace::testing;

namespace {

// Grid whose angular frequencies are the multiples of 1/16.
TorusGrid unit_frequency_grid() { return make_grid(1, 32.0 * std::numbers::pi, 1024, 0.0625, 8.0, 8); }

BoundaryFunction mode(const TorusGrid& g, double m) {
    BoundaryFunction f = zero_boundary(g);
    for (std::size_t i = 0; i < f.samples.size(); ++i) f.samples[i] = std::cos(2 * std::numbers::pi * m * static_cast<double>(i) / g.n_x);
    return f;
}

BoundaryFunction gaussian(const TorusGrid& g, double c, double w) {
    BoundaryFunction f = zero_boundary(g);
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        double y = static_cast<double>(i) * g.h() - c;
        y -= g.L * std::round(y / g.L);
        f.samples[i] = std::exp(-y * y / (2 * w * w));
    }
    return f;
}

}  // namespace

TEST_CASE("kernel admissibility examples") {
    TorusGrid g = default_grid();
    auto heat_ok = verify_kernel_admissible(KernelSpec::heat(), -1.0, g);
    CHECK(heat_ok.passed());
    CHECK(heat_ok.vanishing_order == Catch::Approx(0.0).margin(0.25));
    auto heat_bad = verify_kernel_admissible(KernelSpec::heat(), 0.5, g);
    CHECK_FALSE(heat_bad.order_vs_beta_ok);
    CHECK_FALSE(heat_bad.passed());
    auto gm2 = verify_kernel_admissible(KernelSpec::gauss_moment(2), 0.5, g);
    CHECK(gm2.passed());
    CHECK(gm2.vanishing_order == Catch::Approx(2.0).margin(0.25));
    auto lp = verify_kernel_admissible(KernelSpec::lp_block(), 3.0, g);
    CHECK(lp.passed());
    CHECK(std::isinf(lp.vanishing_order));
    CHECK(heat_ok.annulus_min > 0.0);
}

TEST_CASE("heat extension fixes constants") {
    TorusGrid g = default_grid();
    BoundaryFunction one{g, std::vector<double>(g.n_x, 1.0)};
    HalfSpaceField F = heat_extension(one);
    for (double v : F.values) REQUIRE(v == Catch::Approx(1.0).epsilon(1e-13));
    HalfSpaceField G = kernel_extension(one, KernelSpec::gauss_moment(2));
    for (double v : G.values) REQUIRE(std::abs(v) < 1e-13);
}

TEST_CASE("heat extension of a cosine") {
    TorusGrid g = default_grid();
    BoundaryFunction f = mode(g, 1.0);
    HalfSpaceField F = heat_extension(f);
    const double xi = 2 * std::numbers::pi / g.L;
    for (int j = 0; j <= g.J; j += 7) {
        double decay = std::exp(-g.t(j) * g.t(j) * xi * xi);
        for (std::size_t i = 0; i < g.n_x; i += 37) REQUIRE(F.at(j, i) == Catch::Approx(decay * f.samples[i]).margin(1e-13));
    }
}

TEST_CASE("gauss_moment(2) multiplies a mode by |t xi|^2 exp(-|t xi|^2)") {
    TorusGrid g = default_grid();
    BoundaryFunction f = mode(g, 5.0);
    HalfSpaceField F = kernel_extension(f, KernelSpec::gauss_moment(2));
    const double xi = 2 * std::numbers::pi * 5 / g.L;
    for (int j = 0; j <= g.J; j += 5) {
        double x = g.t(j) * xi;
        double amp = x * x * std::exp(-x * x);
        for (std::size_t i = 0; i < g.n_x; i += 101) REQUIRE(F.at(j, i) == Catch::Approx(amp * f.samples[i]).margin(1e-13));
    }
}

TEST_CASE("heat extension of a Gaussian against the closed form") {
    TorusGrid g = default_grid();
    const double c = 32.0, w = 4.0;
    HalfSpaceField F = heat_extension(gaussian(g, c, w));
    SplitMix64 rng(99);
    for (int n = 0; n < 10; ++n) {
        int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(g.J + 1));
        std::size_t i = static_cast<std::size_t>(rng.next() % g.n_x);
        double t = g.t(j), v = w * w + 2 * t * t, exact = 0.0;
        for (int image = -4; image <= 4; ++image) {
            double y = static_cast<double>(i) * g.h() - c - image * g.L;
            exact += w / std::sqrt(v) * std::exp(-y * y / (2 * v));
        }
        INFO("j=" << j << " i=" << i << " got=" << F.at(j, i) << " exact=" << exact);
        CHECK(std::abs(F.at(j, i) - exact) <= 1e-8 * exact + 1e-14);
    }
}

TEST_CASE("heat semigroup property") {
    TorusGrid g = default_grid();
    BoundaryFunction f = generate_boundary(corpus_manifest().find("mb0"), g);
    const std::vector<std::pair<double, double>> pairs{{0.01, 0.02}, {0.1, 0.3}, {1.0, 1.0}, {0.25, 4.0}, {2.0, 7.5}};
    for (auto [a, b] : pairs) {
        auto lhs = heat_semigroup(heat_semigroup(f, a), b).samples;
        auto rhs = heat_semigroup(f, a + b).samples;
        CHECK(max_abs(lhs, rhs) < 1e-13);
    }
    HalfSpaceField F = heat_extension(f);
    auto slice = heat_semigroup(f, g.t(20) * g.t(20)).samples;
    CHECK(max_abs(std::vector<double>(F.row(20).begin(), F.row(20).end()), slice) < 1e-14);
}

TEST_CASE("kernel extension is linear") {
    TorusGrid g = default_grid();
    BoundaryFunction f = generate_boundary(corpus_manifest().find("g1"), g);
    BoundaryFunction h = generate_boundary(corpus_manifest().find("lp0"), g);
    BoundaryFunction mix = zero_boundary(g);
    for (std::size_t i = 0; i < g.n_x; ++i) mix.samples[i] = 2.5 * f.samples[i] - 0.75 * h.samples[i];
    for (const auto& k : {KernelSpec::heat(), KernelSpec::gauss_moment(1), KernelSpec::lp_block()}) {
        HalfSpaceField F = kernel_extension(f, k), H = kernel_extension(h, k), M = kernel_extension(mix, k);
        double err = 0.0;
        for (std::size_t n = 0; n < M.values.size(); ++n) err = std::max(err, std::abs(M.values[n] - (2.5 * F.values[n] - 0.75 * H.values[n])));
        CHECK(err < 1e-13);
    }
}

TEST_CASE("cutoff and partition of unity") {
    CHECK(cutoff_chi(0.0) == 1.0);
    CHECK(cutoff_chi(1.0) == 1.0);
    CHECK(cutoff_chi(2.0) == 0.0);
    CHECK(cutoff_chi(1.5) == Catch::Approx(0.5).epsilon(1e-15));
    for (double x = 0.0; x < 3.0; x += 0.01) REQUIRE(cutoff_chi(x + 0.01) <= cutoff_chi(x));
    LPFamily fam = default_lp_family(default_grid());
    CHECK(fam.k_min == -4);
    CHECK(fam.k_max == 6);
    for (double x = std::ldexp(1.0, fam.k_min); x <= std::ldexp(1.0, fam.k_max); x *= 1.013) {
        double s = 0.0;
        for (int k = fam.k_min; k <= fam.k_max; ++k) s += fam.phi(k, x);
        REQUIRE(s == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("Littlewood-Paley block of a single mode") {
    TorusGrid g = unit_frequency_grid();
    LPFamily fam = default_lp_family(g);
    BoundaryFunction f = mode(g, 32.0);  // |xi| = 2
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        auto b = lp_block(f, fam, k).samples;
        double factor = fam.phi(k, 2.0);
        if (std::abs(k - 1) >= 2) CHECK(factor == 0.0);
        std::vector<double> expect(f.samples.size());
        for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = factor * f.samples[i];
        CHECK(max_abs(b, expect) < 1e-13);
    }
    CHECK_THROWS_AS(lp_block(f, fam, fam.k_max + 1), ValidationError);
    auto zero = lp_blocks(zero_boundary(g), fam);
    for (const auto& b : zero)
        for (double v : b.samples) REQUIRE(v == 0.0);
}

TEST_CASE("blocks sum back to a mean-free field") {
    TorusGrid g = default_grid();
    BoundaryFunction f = generate_boundary(corpus_manifest().find("b0"), g);
    LPFamily fam = default_lp_family(g);
    std::vector<double> sum(g.n_x, 0.0);
    for (const auto& b : lp_blocks(f, fam))
        for (std::size_t i = 0; i < g.n_x; ++i) sum[i] += b.samples[i];
    CHECK(max_abs(sum, f.samples) < 1e-12);
    CHECK(lp_tail_mass(f, fam) < 1e-8);
}

TEST_CASE("Peetre maximal function") {
    TorusGrid g = make_grid(1, 64.0, 512, 0.125, 8.0, 8);
    BoundaryFunction f = gaussian(g, 20.0, 1.0);
    const double t = 1.0;
    std::vector<double> conv = heat_semigroup(f, t * t).samples;
    auto pm = peetre_maximal(f, KernelSpec::heat(), t, 2.0).samples;
    std::size_t peak = static_cast<std::size_t>(std::max_element(f.samples.begin(), f.samples.end()) - f.samples.begin());
    CHECK(pm[peak] >= std::abs(conv[peak]));
    for (std::size_t i = 0; i < pm.size(); ++i) REQUIRE(pm[i] >= std::abs(conv[i]) * (1 - 1e-15));

    auto sharp = peetre_maximal(f, KernelSpec::heat(), t, 64.0).samples;
    double top = *std::max_element(conv.begin(), conv.end());
    for (std::size_t i = 0; i < sharp.size(); ++i) REQUIRE(std::abs(sharp[i] - std::abs(conv[i])) <= 0.01 * top);

    auto zero = peetre_maximal(zero_boundary(g), KernelSpec::heat(), t, 2.0).samples;
    for (double v : zero) REQUIRE(v == 0.0);
    CHECK_THROWS_AS(peetre_maximal(f, KernelSpec::heat(), t, 0.0), ValidationError);
}
