#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"
#include "report.hpp"
#include "whitney.hpp"

namespace zspace {

struct NamedField {
    std::string id;
    HalfSpaceField F;
    std::optional<BoundaryFunction> boundary;
};

inline double z_norm(const HalfSpaceField& F, const SpaceSpec& spec, const WhitneyParams& w = {},
                     std::optional<IndexRange> rows = std::nullopt) {
    AvgField A = box_average_fast(F, spec.r, spec.beta, w);
    return reduce_z(A, spec.p, spec.q, resolve_rows(A.rows, rows));
}

inline void require_finite_tent_p(const ExtendedExponent& p) {
    if (p.is_infinite()) throw ValidationError("tent spaces not defined for p=inf in this artifact");
}

inline double t_norm(const HalfSpaceField& F, const SpaceSpec& spec, const WhitneyParams& w = {},
                     std::optional<IndexRange> rows = std::nullopt) {
    require_finite_tent_p(spec.p);
    AvgField A = box_average_fast(F, spec.r, spec.beta, w);
    return reduce_t(A, spec.p, spec.q, resolve_rows(A.rows, rows));
}

// (sum_{j,i} w h^d A^p)^(1/p) with A from the direct box average.
inline double z_amenta_norm(const HalfSpaceField& F, ExtendedExponent p, ExtendedExponent r, double beta,
                            const WhitneyParams& w = {}, std::optional<IndexRange> rows = std::nullopt) {
    AvgField A = box_average(F, r, beta, w);
    IndexRange rr = resolve_rows(A.rows, rows);
    const TorusGrid& g = F.grid;
    LpReducer acc(p);
    for (int j = rr.first; j <= rr.last; ++j)
        for (double v : A.row(j)) acc.add(v, g.log_weight() * g.cell_volume());
    return acc.value();
}

// ||(sum_j w mean_{B(x,t_j)} |t_j^-beta F(t_j,y)|^q)^(1/q)||_{L^p_x}, no s-average.
inline double classical_tent_norm(const HalfSpaceField& F, ExtendedExponent p, ExtendedExponent q, double beta,
                                  std::optional<IndexRange> rows = std::nullopt) {
    require_finite_tent_p(p);
    validate(F);
    const TorusGrid& g = F.grid;
    IndexRange rr = resolve_rows(all_rows(g), rows);
    const std::size_t N = g.spatial_size();
    std::vector<std::vector<double>> cone(N);
    for (auto& c : cone) c.reserve(static_cast<std::size_t>(rr.size()));
    for (int j = rr.first; j <= rr.last; ++j) {
        double radius = g.t(j);
        BallPredicate in(g, radius);
        BallStencil st = ball_stencil(g, radius);
        double wj = std::pow(g.t(j), -beta);
        long M1 = g.d == 2 ? st.M : 0;
        for (std::size_t i = 0; i < N; ++i) {
            auto xi = unflatten(g, i);
            double acc = 0.0;
            for (long o0 = -st.M; o0 <= st.M; ++o0)
                for (long o1 = -M1; o1 <= M1; ++o1) {
                    if (!in(o0, o1)) continue;
                    double v = detail::power_term(wj, F.at(j, flatten(g, xi[0] + o0, xi[1] + o1)), q);
                    acc = q.is_infinite() ? std::max(acc, v) : acc + v;
                }
            cone[i].push_back(q.is_infinite() ? acc : acc / static_cast<double>(st.count));
        }
    }
    LpReducer outer(p);
    for (std::size_t i = 0; i < N; ++i) {
        double inner;
        if (q.is_infinite()) {
            inner = 0.0;
            for (double v : cone[i]) inner = std::max(inner, v);
        } else {
            CompensatedSum s;
            for (double v : cone[i]) s.add(g.log_weight() * v);
            inner = std::pow(s.value(), 1.0 / q.value());
        }
        outer.add(inner, g.cell_volume());
    }
    return outer.value();
}

inline constexpr WhitneyParams kHuangInnerBox{0.5, 2.0, 1.0};

// Triple average: L^p_x of (sum_t w mean_{B(x,t)} A'(t,y)^q)^(1/q), A' over (t/2, 2t) x B(y,t).
inline double huang_norm(const HalfSpaceField& F, const SpaceSpec& spec, std::optional<IndexRange> rows = std::nullopt) {
    require_finite_tent_p(spec.p);
    const TorusGrid& g = F.grid;
    AvgField A = box_average_fast(F, spec.r, spec.beta, kHuangInnerBox);
    IndexRange rr = resolve_rows(A.rows, rows);
    const std::size_t N = g.spatial_size();
    const bool qinf = spec.q.is_infinite();
    std::vector<CompensatedSum> sums(N);
    std::vector<double> maxes(N, 0.0);
    for (int j = rr.first; j <= rr.last; ++j) {
        BallStencil st = ball_stencil(g, g.t(j));
        std::vector<double> vals(A.row(j).begin(), A.row(j).end());
        if (qinf) {
            auto m = detail::ball_reduce(g, vals, st, detail::MaxOp{});
            for (std::size_t i = 0; i < N; ++i) maxes[i] = std::max(maxes[i], m[i]);
        } else {
            for (double& v : vals) v = std::pow(v, spec.q.value());
            auto s = detail::ball_reduce(g, vals, st, detail::SumOp{});
            for (std::size_t i = 0; i < N; ++i) sums[i].add(g.log_weight() * s[i] / static_cast<double>(st.count));
        }
    }
    LpReducer outer(spec.p);
    for (std::size_t i = 0; i < N; ++i) {
        double inner = qinf ? maxes[i] : std::pow(std::max(0.0, sums[i].value()), 1.0 / spec.q.value());
        outer.add(inner, g.cell_volume());
    }
    return outer.value();
}

inline double besov_norm(const BoundaryFunction& f, ExtendedExponent p, ExtendedExponent q, double beta, const LPFamily& fam) {
    auto blocks = lp_blocks(f, fam);
    LpReducer outer(q);
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        LpReducer inner(p);
        for (double v : blocks[static_cast<std::size_t>(k - fam.k_min)].samples) inner.add(std::abs(v), f.grid.cell_volume());
        outer.add(std::exp2(k * beta) * inner.value(), 1.0);
    }
    return outer.value();
}

inline double triebel_norm(const BoundaryFunction& f, ExtendedExponent p, ExtendedExponent q, double beta, const LPFamily& fam) {
    if (p.is_infinite()) throw ValidationError("Triebel-Lizorkin norm requires finite p");
    auto blocks = lp_blocks(f, fam);
    LpReducer outer(p);
    for (std::size_t i = 0; i < f.grid.spatial_size(); ++i) {
        LpReducer inner(q);
        for (int k = fam.k_min; k <= fam.k_max; ++k)
            inner.add(std::exp2(k * beta) * std::abs(blocks[static_cast<std::size_t>(k - fam.k_min)].samples[i]), 1.0);
        outer.add(inner.value(), f.grid.cell_volume());
    }
    return outer.value();
}

// Norm of 1_{W(t,x)}(s,y) F(s,y) in L^q(dt/t^{1+beta q}; L^p_x; L^r(dy ds/s^{d+1})).
inline double vv_norm(const HalfSpaceField& F, const SpaceSpec& spec, const WhitneyParams& w = {},
                      std::optional<IndexRange> rows = std::nullopt) {
    validate(F);
    const TorusGrid& g = F.grid;
    WindowSpec ws = whitney_window(g, w);
    IndexRange rr = resolve_rows(ws.rows, rows);
    const bool rinf = spec.r.is_infinite();
    // s^{-d/r} inside |.|^r turns the box mean into the ds/s^{d+1} integral up to the node count.
    AvgField A = detail::box_reduce_fast(F, spec.r, rinf ? 0.0 : g.d / spec.r.value(), ws, w);
    LpReducer outer(spec.q);
    for (int j = rr.first; j <= rr.last; ++j) {
        double scale = 1.0;
        if (!rinf) {
            double nodes = static_cast<double>(ws.s_count()) * static_cast<double>(ball_stencil(g, ws.radius_factor * g.t(j)).count);
            scale = std::pow(g.log_weight() * g.cell_volume() * nodes, 1.0 / spec.r.value());
        }
        LpReducer inner(spec.p);
        for (double v : A.row(j)) inner.add(scale * v, g.cell_volume());
        outer.add(std::pow(g.t(j), -spec.beta) * inner.value(), g.log_weight());
    }
    return outer.value();
}

inline IndexRange default_pairing_rows(const TorusGrid& g) { return covered_s_range(whitney_window(g, {})); }

// sum over nodes of F G with ds/s log weights and dy cell volume.
inline double pairing(const HalfSpaceField& F, const HalfSpaceField& G, std::optional<IndexRange> s_rows = std::nullopt) {
    require_same_grid(F.grid, G.grid);
    const TorusGrid& g = F.grid;
    IndexRange rr = s_rows ? s_rows->intersect(all_rows(g)) : default_pairing_rows(g);
    CompensatedSum s;
    const double wgt = g.log_weight() * g.cell_volume();
    for (int k = rr.first; k <= rr.last; ++k) {
        auto a = F.row(k), b = G.row(k);
        for (std::size_t i = 0; i < a.size(); ++i) s.add(wgt * a[i] * b[i]);
    }
    return s.value();
}

inline double dual_beta(double beta, const ExtendedExponent& p, int d) { return -beta + std::max(0.0, d * (p.inverse() - 1.0)); }

inline SpaceSpec dual_spec(const SpaceSpec& s, int d) { return {s.p.conjugate(), s.q.conjugate(), s.r.conjugate(), dual_beta(s.beta, s.p, d)}; }

// |pairing(|F|,|G|)| against z(G, spec) z(F, dual spec) for every ordered pair of distinct fields.
inline EquivalenceReport holder_quasi_check(const std::vector<NamedField>& fields, const SpaceSpec& spec, const WhitneyParams& w = {}) {
    if (spec.r.is_infinite() || spec.r.value() < 1.0) throw ValidationError("holder check needs 1 <= r < inf");
    if (spec.p.is_infinite() || spec.q.is_infinite()) throw ValidationError("holder check needs finite p and q");
    EquivalenceReport rep;
    rep.check = "holder";
    rep.params = format_spec(spec);
    if (fields.empty()) return rep;
    SpaceSpec ds = dual_spec(spec, fields.front().F.grid.d);
    std::vector<double> zg, zf;
    std::vector<HalfSpaceField> absf;
    for (const auto& nf : fields) {
        zg.push_back(z_norm(nf.F, spec, w));
        zf.push_back(z_norm(nf.F, ds, w));
        absf.push_back(absolute(nf.F));
    }
    for (std::size_t a = 0; a < fields.size(); ++a)
        for (std::size_t b = 0; b < fields.size(); ++b) {
            if (a == b) continue;
            double lhs = std::abs(pairing(absf[b], absf[a]));
            rep.add(fields[b].id + "|" + fields[a].id, lhs, zg[a] * zf[b]);
        }
    return rep;
}

// K = (s_lo, s_hi) x B(center, radius).
struct LocalizationBox {
    double s_lo = 0.5;
    double s_hi = 2.0;
    std::array<double, 2> center{32.0, 32.0};
    double radius = 4.0;
};

inline std::vector<char> localization_mask(const TorusGrid& g, const LocalizationBox& K) {
    if (!(K.s_lo < K.s_hi) || K.s_lo < g.t_min || K.s_hi > g.t(g.J) || K.radius > g.L / 2 || !(K.radius > 0))
        throw ValidationError("localization box exits grid");
    std::vector<char> mask(g.size(), 0);
    const double h = g.h();
    for (int k = 0; k <= g.J; ++k) {
        double s = g.t(k);
        if (!(s > K.s_lo && s < K.s_hi)) continue;
        for (std::size_t i = 0; i < g.spatial_size(); ++i) {
            auto xi = unflatten(g, i);
            auto wrap = [&](double x) { return x - g.L * std::round(x / g.L); };
            double y0 = wrap(xi[0] * h - K.center[0]);
            double y1 = g.d == 2 ? wrap(xi[1] * h - K.center[1]) : 0.0;
            if (std::hypot(y0, y1) < K.radius) mask[static_cast<std::size_t>(k) * g.spatial_size() + i] = 1;
        }
    }
    return mask;
}

inline EquivalenceReport localization_check(const std::vector<NamedField>& fields, const SpaceSpec& spec, const LocalizationBox& K,
                                            const WhitneyParams& w = {}) {
    EquivalenceReport rep;
    rep.check = "localization";
    rep.params = format_spec(spec);
    if (fields.empty()) return rep;
    const TorusGrid& g = fields.front().F.grid;
    std::vector<char> mask = localization_mask(g, K);
    for (const auto& nf : fields) {
        HalfSpaceField cut = nf.F;
        LpReducer rhs(spec.r);
        for (std::size_t n = 0; n < cut.values.size(); ++n) {
            if (!mask[n]) {
                cut.values[n] = 0.0;
                continue;
            }
            rhs.add(std::abs(cut.values[n]), g.log_weight() * g.cell_volume());
        }
        rep.add(nf.id, z_norm(cut, spec, w), rhs.value());
    }
    return rep;
}

}  // namespace zspace
