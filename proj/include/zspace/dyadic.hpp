#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "grid.hpp"
#include "norms.hpp"

namespace zspace {

// Cube 2^k idx + [0, 2^k)^d with its box Qbar = [2^{k-1}, 2^k) x Q.
struct DyadicCube {
    int k = 0;
    std::array<long, 2> idx{0, 0};

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

// A generation whose slab and cubes are fully represented on the grid.
struct Generation {
    int k = 0;
    int j_first = 0;                 // first t index of [2^{k-1}, 2^k)
    std::size_t nodes_per_axis = 0;  // 2^k / h
    std::size_t cubes_per_axis = 0;  // L / 2^k

    std::size_t cube_count(int d) const { return d == 1 ? cubes_per_axis : cubes_per_axis * cubes_per_axis; }
    std::size_t local_nodes(int d) const { return d == 1 ? nodes_per_axis : nodes_per_axis * nodes_per_axis; }
};

inline std::vector<Generation> retained_generations(const TorusGrid& g) {
    std::vector<Generation> out;
    const long e0 = g.log2_tmin_steps();
    const int kmin = static_cast<int>(std::floor(std::log2(g.t_min))) - 1;
    const int kmax = static_cast<int>(std::ceil(std::log2(g.t(g.J)))) + 1;
    for (int k = kmin; k <= kmax; ++k) {
        long j0 = static_cast<long>(g.s_oct) * (k - 1) - e0;
        long j1 = static_cast<long>(g.s_oct) * k - e0 - 1;
        if (j0 < 0 || j1 > g.J) continue;
        double side = std::ldexp(1.0, k);
        double per_axis = side / g.h();
        double cubes = g.L / side;
        if (per_axis < 1.0 || std::abs(per_axis - std::round(per_axis)) > 1e-9) continue;
        if (cubes < 1.0 || std::abs(cubes - std::round(cubes)) > 1e-9) continue;
        out.push_back({k, static_cast<int>(j0), static_cast<std::size_t>(std::lround(per_axis)),
                       static_cast<std::size_t>(std::lround(cubes))});
    }
    return out;
}

namespace detail {

inline std::vector<Generation> require_generations(const TorusGrid& g) {
    auto gens = retained_generations(g);
    if (gens.empty()) throw ValidationError("no complete generation in range");
    return gens;
}

// Grid node of local offset (a0, a1) inside cube c of generation G.
inline std::size_t cube_node(const TorusGrid& g, const Generation& G, std::size_t c, std::size_t local) {
    std::size_t m = G.nodes_per_axis;
    if (g.d == 1) return c * m + local;
    std::size_t c0 = c / G.cubes_per_axis, c1 = c % G.cubes_per_axis;
    std::size_t a0 = local / m, a1 = local % m;
    return flatten(g, static_cast<long>(c0 * m + a0), static_cast<long>(c1 * m + a1));
}

inline double block_lr(const HalfSpaceField& F, const Generation& G, std::size_t c, const ExtendedExponent& r) {
    const TorusGrid& g = F.grid;
    LpReducer acc(r);
    for (int jj = 0; jj < g.s_oct; ++jj) {
        int j = G.j_first + jj;
        double wgt = g.log_weight() * g.cell_volume() * std::pow(g.t(j), -g.d);
        for (std::size_t a = 0; a < G.local_nodes(g.d); ++a) acc.add(std::abs(F.at(j, cube_node(g, G, c, a))), wgt);
    }
    return acc.value();
}

}  // namespace detail

inline double dyadic_norm(const HalfSpaceField& F, const SpaceSpec& spec) {
    validate(F);
    const TorusGrid& g = F.grid;
    LpReducer outer(spec.q);
    for (const auto& G : detail::require_generations(g)) {
        double side_d = std::pow(std::ldexp(1.0, G.k), g.d);
        LpReducer mid(spec.p);
        for (std::size_t c = 0; c < G.cube_count(g.d); ++c) mid.add(detail::block_lr(F, G, c, spec.r), side_d);
        outer.add(std::exp2(-G.k * spec.beta) * mid.value(), 1.0);
    }
    return outer.value();
}

// Cubes R in generations k-1, k whose box meets some W(t,x) with (t,x) in Qbar.
inline std::vector<DyadicCube> neighbors_G(const DyadicCube& q, int d) {
    if (d != 1 && d != 2) throw ValidationError("d must be 1 or 2");
    // Work in units of 2^{k-1}: Q spans [2 q_i, 2 q_i + 2) per axis; the condition is dist(R, Q) < 2^k = 2 units.
    auto gap = [](long a0, long a1, long b0, long b1) { return std::max({0L, a0 - b1, b0 - a1}); };
    std::vector<DyadicCube> out;
    for (int gen = q.k - 1; gen <= q.k; ++gen) {
        long span = gen == q.k ? 2 : 1;
        long lo0 = (2 * q.idx[0] - 4) / span - 1, hi0 = (2 * q.idx[0] + 6) / span + 1;
        long lo1 = d == 2 ? (2 * q.idx[1] - 4) / span - 1 : 0, hi1 = d == 2 ? (2 * q.idx[1] + 6) / span + 1 : 0;
        for (long r0 = lo0; r0 <= hi0; ++r0)
            for (long r1 = lo1; r1 <= hi1; ++r1) {
                long g0 = gap(r0 * span, r0 * span + span, 2 * q.idx[0], 2 * q.idx[0] + 2);
                long g1 = d == 2 ? gap(r1 * span, r1 * span + span, 2 * q.idx[1], 2 * q.idx[1] + 2) : 0;
                if (g0 * g0 + g1 * g1 < 4) out.push_back({gen, {r0, r1}});
            }
    }
    return out;
}

inline std::size_t neighbors_bound(int d) { return d == 1 ? 3 + 6 : 9 + 36; }

struct SequenceGeneration {
    Generation gen;
    double scale = 1.0;           // 2^{k d / p}
    std::vector<double> samples;  // unscaled; cube-major, then local t, then local space
};

// Image of a field under f -> 2^{kd/p} f(2^k s, 2^k y + 2^k x); block values are scale * sample.
struct SequenceField {
    TorusGrid grid;
    SpaceSpec spec;
    std::vector<SequenceGeneration> generations;

    std::size_t block_size(const SequenceGeneration& G) const {
        return static_cast<std::size_t>(grid.s_oct) * G.gen.local_nodes(grid.d);
    }
    double value(std::size_t gi, std::size_t cube, std::size_t local) const {
        const auto& G = generations[gi];
        return G.scale * G.samples[cube * block_size(G) + local];
    }
    void set_value(std::size_t gi, std::size_t cube, std::size_t local, double v) {
        auto& G = generations[gi];
        G.samples[cube * block_size(G) + local] = v / G.scale;
    }
};

inline double sequence_scale(int k, int d, const ExtendedExponent& p) { return std::exp2(k * d * p.inverse()); }

inline SequenceField zero_sequence(const TorusGrid& g, const SpaceSpec& spec) {
    SequenceField S{g, spec, {}};
    for (const auto& G : detail::require_generations(g)) {
        SequenceGeneration sg{G, sequence_scale(G.k, g.d, spec.p), {}};
        sg.samples.assign(G.cube_count(g.d) * static_cast<std::size_t>(g.s_oct) * G.local_nodes(g.d), 0.0);
        S.generations.push_back(std::move(sg));
    }
    return S;
}

inline SequenceField to_sequence(const HalfSpaceField& F, const SpaceSpec& spec) {
    validate(F);
    const TorusGrid& g = F.grid;
    SequenceField S = zero_sequence(g, spec);
    for (auto& sg : S.generations) {
        const auto& G = sg.gen;
        std::size_t bs = S.block_size(sg), ln = G.local_nodes(g.d);
        for (std::size_t c = 0; c < G.cube_count(g.d); ++c)
            for (int jj = 0; jj < g.s_oct; ++jj)
                for (std::size_t a = 0; a < ln; ++a)
                    sg.samples[c * bs + static_cast<std::size_t>(jj) * ln + a] = F.at(G.j_first + jj, detail::cube_node(g, G, c, a));
    }
    return S;
}

inline HalfSpaceField from_sequence(const SequenceField& S) {
    const TorusGrid& g = S.grid;
    auto gens = detail::require_generations(g);
    if (gens.size() != S.generations.size()) throw ValidationError("sequence shape does not match grid");
    HalfSpaceField F = zero_field(g);
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        const auto& sg = S.generations[gi];
        const auto& G = sg.gen;
        if (G.k != gens[gi].k || G.nodes_per_axis != gens[gi].nodes_per_axis || G.cubes_per_axis != gens[gi].cubes_per_axis ||
            sg.samples.size() != G.cube_count(g.d) * S.block_size(sg))
            throw ValidationError("sequence shape does not match grid");
        std::size_t bs = S.block_size(sg), ln = G.local_nodes(g.d);
        for (std::size_t c = 0; c < G.cube_count(g.d); ++c)
            for (int jj = 0; jj < g.s_oct; ++jj)
                for (std::size_t a = 0; a < ln; ++a)
                    F.values[static_cast<std::size_t>(G.j_first + jj) * g.spatial_size() + detail::cube_node(g, G, c, a)] =
                        sg.samples[c * bs + static_cast<std::size_t>(jj) * ln + a];
    }
    return F;
}

// l^q_beta over k of l^p over cubes of L^r(Qbar_0, dy ds/s^{d+1}), quadrature in rescaled coordinates.
inline double sequence_norm(const SequenceField& S, ExtendedExponent p, ExtendedExponent q, double beta) {
    const TorusGrid& g = S.grid;
    LpReducer outer(q);
    for (std::size_t gi = 0; gi < S.generations.size(); ++gi) {
        const auto& sg = S.generations[gi];
        const auto& G = sg.gen;
        double side = std::ldexp(1.0, G.k);
        double dy = std::pow(g.h() / side, g.d);
        std::size_t bs = S.block_size(sg), ln = G.local_nodes(g.d);
        LpReducer mid(p);
        for (std::size_t c = 0; c < G.cube_count(g.d); ++c) {
            LpReducer blk(S.spec.r);
            for (int jj = 0; jj < g.s_oct; ++jj) {
                double s0 = g.t(G.j_first + jj) / side;
                double wgt = g.log_weight() * dy * std::pow(s0, -g.d);
                for (std::size_t a = 0; a < ln; ++a)
                    blk.add(std::abs(sg.scale * sg.samples[c * bs + static_cast<std::size_t>(jj) * ln + a]), wgt);
            }
            mid.add(blk.value(), 1.0);
        }
        outer.add(std::exp2(-G.k * beta) * mid.value(), 1.0);
    }
    return outer.value();
}

}  // namespace zspace
