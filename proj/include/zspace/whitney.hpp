#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "grid.hpp"

namespace zspace {

// W_{a,b,c}(t,x) = (a t, b t) x B(x, c t).
struct WhitneyParams {
    double a = 0.5;
    double b = 1.0;
    double c = 1.0;

    friend bool operator==(const WhitneyParams&, const WhitneyParams&) = default;
};

inline std::string format_whitney(const WhitneyParams& w) {
    return format_real(w.a) + "," + format_real(w.b) + "," + format_real(w.c);
}

struct IndexRange {
    int first = 0;
    int last = -1;

    bool empty() const { return last < first; }
    int size() const { return empty() ? 0 : last - first + 1; }
    bool contains(int j) const { return j >= first && j <= last; }
    IndexRange intersect(const IndexRange& o) const { return {std::max(first, o.first), std::min(last, o.last)}; }

    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

inline IndexRange all_rows(const TorusGrid& g) { return {0, g.J}; }

// Ball membership on integer offsets: |o| h < radius, ties snapped to "outside".
class BallPredicate {
public:
    BallPredicate(const TorusGrid& g, double radius) {
        double x = radius / g.h();
        x2_ = x * x;
        double r = std::round(x2_);
        if (std::abs(x2_ - r) <= 1e-9 * std::max(1.0, x2_)) x2_ = r;
    }
    bool operator()(long o0, long o1) const { return static_cast<double>(o0 * o0 + o1 * o1) < x2_; }

private:
    double x2_ = 0.0;
};

// Row decomposition of a ball: offsets o0 in [-M, M], o1 in [-hw[o0+M], hw[o0+M]].
struct BallStencil {
    long M = 0;
    std::vector<long> half_width;
    std::size_t count = 0;
};

inline BallStencil ball_stencil(const TorusGrid& g, double radius) {
    BallPredicate in(g, radius);
    BallStencil s;
    while (in(s.M + 1, 0)) ++s.M;
    for (long o0 = -s.M; o0 <= s.M; ++o0) {
        long w = 0;
        if (g.d == 2)
            while (in(o0, w + 1)) ++w;
        s.half_width.push_back(w);
        s.count += static_cast<std::size_t>(2 * w + 1);
    }
    return s;
}

// Index-space description of a family of Whitney windows on a grid.
struct WindowSpec {
    int m_lo = 0;                   // s-node offsets relative to the outer index j
    int m_hi = 0;
    IndexRange rows;                // retained outer indices
    double radius_factor = 1.0;     // ball radius = radius_factor * t_j
    double normalizer_factor = 1.0; // y-mean divides by the node count of radius normalizer_factor * t_j
    int dropped_low = 0;
    int dropped_high = 0;

    int s_count() const { return m_hi - m_lo + 1; }
};

namespace detail {

inline int s_offset_lo(double a, int s_oct) {
    double x = s_oct * std::log2(a);
    return static_cast<int>(-strict_floor_below(-x));
}

inline int s_offset_hi(double b, int s_oct) { return static_cast<int>(strict_floor_below(s_oct * std::log2(b))); }

inline int smallest_valid_s_oct(double a, double b) {
    for (int s = 4; s < (1 << 24); ++s)
        if (s_offset_lo(a, s) <= s_offset_hi(b, s)) return s;
    return -1;
}

}  // namespace detail

inline void validate_whitney(const WhitneyParams& w) {
    if (!(w.a > 0.0) || !(w.a < w.b) || !std::isfinite(w.b)) throw ValidationError("Whitney parameters need 0 < a < b");
    if (!(w.c > 0.0) || !std::isfinite(w.c)) throw ValidationError("Whitney parameter c must be positive");
}

inline WindowSpec whitney_window(const TorusGrid& g, const WhitneyParams& w, double radius_scale = 1.0) {
    validate_whitney(w);
    WindowSpec ws;
    ws.m_lo = detail::s_offset_lo(w.a, g.s_oct);
    ws.m_hi = detail::s_offset_hi(w.b, g.s_oct);
    if (ws.m_lo > ws.m_hi)
        throw ValidationError("empty Whitney box: s_oct must be at least " +
                              std::to_string(detail::smallest_valid_s_oct(w.a, w.b)));
    ws.rows = {std::max(0, -ws.m_lo), std::min(g.J, g.J - ws.m_hi)};
    if (ws.rows.empty()) throw ValidationError("empty retained t-set");
    ws.dropped_low = ws.rows.first;
    ws.dropped_high = g.J - ws.rows.last;
    ws.radius_factor = w.c * radius_scale;
    ws.normalizer_factor = w.c;
    if (ws.radius_factor * g.t(ws.rows.last) > g.L / 2 * (1 + 1e-12))
        throw ValidationError("Whitney ball exceeds grid margin (radius > L/2)");
    return ws;
}

// Indices s of nodes covered by at least one retained window.
inline IndexRange covered_s_range(const WindowSpec& ws) { return {ws.rows.first + ws.m_lo, ws.rows.last + ws.m_hi}; }

struct AvgField {
    TorusGrid grid;
    IndexRange rows;
    std::vector<double> values;  // rows.size() x spatial_size
    ExtendedExponent r;
    double beta = 0.0;
    WhitneyParams params;
    int dropped_low = 0;
    int dropped_high = 0;

    std::span<const double> row(int j) const {
        std::size_t N = grid.spatial_size();
        return {values.data() + static_cast<std::size_t>(j - rows.first) * N, N};
    }
};

namespace detail {

struct SumOp {
    double operator()(double x, double y) const { return x + y; }
};
struct MaxOp {
    double operator()(double x, double y) const { return std::max(x, y); }
};

// van Herk / Gil-Werman block scheme: out[s] = op(x[s..s+w-1]) for s = 0..len-w.
// Sums use only additions of the inputs, so nonnegative data keep full relative accuracy.
template <class Op>
void window_reduce(const double* x, std::size_t len, std::size_t w, Op op, double* out, std::vector<double>& scratch) {
    if (w == 1) {
        std::copy(x, x + len, out);
        return;
    }
    scratch.resize(2 * len);
    double* P = scratch.data();
    double* S = scratch.data() + len;
    for (std::size_t i = 0; i < len; ++i) P[i] = (i % w == 0) ? x[i] : op(P[i - 1], x[i]);
    for (std::size_t i = len; i-- > 0;) S[i] = (i == len - 1 || (i + 1) % w == 0) ? x[i] : op(x[i], S[i + 1]);
    for (std::size_t s = 0; s + w <= len; ++s) out[s] = (s % w == 0) ? P[s + w - 1] : op(S[s], P[s + w - 1]);
}

// Same scheme applied lane-wise to a sequence of rows of width N.
template <class Op>
std::vector<double> window_reduce_rows(const std::vector<double>& x, std::size_t nrows, std::size_t N, std::size_t w, Op op) {
    std::size_t nout = nrows - w + 1;
    std::vector<double> out(nout * N);
    if (w == 1) {
        std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nout * N), out.begin());
        return out;
    }
    std::vector<double> P(nrows * N), S(nrows * N);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t c = 0; c < N; ++c)
            P[i * N + c] = (i % w == 0) ? x[i * N + c] : op(P[(i - 1) * N + c], x[i * N + c]);
    for (std::size_t i = nrows; i-- > 0;)
        for (std::size_t c = 0; c < N; ++c)
            S[i * N + c] = (i == nrows - 1 || (i + 1) % w == 0) ? x[i * N + c] : op(x[i * N + c], S[(i + 1) * N + c]);
    for (std::size_t s = 0; s < nout; ++s)
        for (std::size_t c = 0; c < N; ++c)
            out[s * N + c] = (s % w == 0) ? P[(s + w - 1) * N + c] : op(S[s * N + c], P[(s + w - 1) * N + c]);
    return out;
}

// Periodic centered window of half-width M along one axis of length n (stride between samples).
template <class Op>
void periodic_window(const double* x, std::size_t n, std::size_t stride, long M, Op op, double* out, std::size_t out_stride,
                     std::vector<double>& ext, std::vector<double>& res, std::vector<double>& scratch) {
    std::size_t w = static_cast<std::size_t>(2 * M + 1);
    std::size_t len = n + w - 1;
    ext.resize(len);
    res.resize(n);
    long nn = static_cast<long>(n);
    for (std::size_t u = 0; u < len; ++u) {
        long src = ((static_cast<long>(u) - M) % nn + nn) % nn;
        ext[u] = x[static_cast<std::size_t>(src) * stride];
    }
    window_reduce(ext.data(), len, w, op, res.data(), scratch);
    for (std::size_t i = 0; i < n; ++i) out[i * out_stride] = res[i];
}

// Reduce values over the ball stencil around every node of one spatial slice.
template <class Op>
std::vector<double> ball_reduce(const TorusGrid& g, std::span<const double> x, const BallStencil& st, Op op) {
    const std::size_t n = g.n_x;
    std::vector<double> out(g.spatial_size(), 0.0);
    std::vector<double> ext, res, scratch;
    if (g.d == 1) {
        periodic_window(x.data(), n, 1, st.M, op, out.data(), 1, ext, res, scratch);
        return out;
    }
    // One row-window pass per distinct half-width, then combine rows o0 = -M..M.
    long maxw = *std::max_element(st.half_width.begin(), st.half_width.end());
    std::vector<std::vector<double>> by_width(static_cast<std::size_t>(maxw) + 1);
    for (long hw : st.half_width) {
        auto& rw = by_width[static_cast<std::size_t>(hw)];
        if (!rw.empty()) continue;
        rw.assign(g.spatial_size(), 0.0);
        for (std::size_t i0 = 0; i0 < n; ++i0)
            periodic_window(x.data() + i0 * n, n, 1, hw, op, rw.data() + i0 * n, 1, ext, res, scratch);
    }
    bool first = true;
    for (long o0 = -st.M; o0 <= st.M; ++o0) {
        const auto& rw = by_width[static_cast<std::size_t>(st.half_width[static_cast<std::size_t>(o0 + st.M)])];
        for (std::size_t i0 = 0; i0 < n; ++i0) {
            std::size_t src = flatten(g, static_cast<long>(i0) + o0, 0);
            for (std::size_t i1 = 0; i1 < n; ++i1) {
                double v = rw[src + i1];
                double& o = out[i0 * n + i1];
                o = first ? v : op(o, v);
            }
        }
        first = false;
    }
    return out;
}

inline double power_term(double weight, double value, const ExtendedExponent& r) {
    double v = std::abs(weight * value);
    return r.is_infinite() ? v : std::pow(v, r.value());
}

inline AvgField make_avg_shell(const HalfSpaceField& F, const WindowSpec& ws, ExtendedExponent r, double beta,
                               const WhitneyParams& w) {
    AvgField A;
    A.grid = F.grid;
    A.rows = ws.rows;
    A.values.assign(static_cast<std::size_t>(ws.rows.size()) * F.grid.spatial_size(), 0.0);
    A.r = r;
    A.beta = beta;
    A.params = w;
    A.dropped_low = ws.dropped_low;
    A.dropped_high = ws.dropped_high;
    return A;
}

inline double finish_mean(double acc, double count, const ExtendedExponent& r) {
    if (r.is_infinite()) return acc;
    return std::pow(acc / count, 1.0 / r.value());
}

inline std::vector<double> weighted_powers(const HalfSpaceField& F, ExtendedExponent r, double beta, int k0, int k1) {
    const std::size_t N = F.grid.spatial_size();
    std::vector<double> G(static_cast<std::size_t>(k1 - k0 + 1) * N);
    for (int k = k0; k <= k1; ++k) {
        double wk = std::pow(F.grid.t(k), -beta);
        auto src = F.row(k);
        double* dst = G.data() + static_cast<std::size_t>(k - k0) * N;
        for (std::size_t i = 0; i < N; ++i) dst[i] = power_term(wk, src[i], r);
    }
    return G;
}

inline AvgField box_reduce_naive(const HalfSpaceField& F, ExtendedExponent r, double beta, const WindowSpec& ws,
                                 const WhitneyParams& w) {
    const TorusGrid& g = F.grid;
    AvgField A = make_avg_shell(F, ws, r, beta, w);
    const std::size_t N = g.spatial_size();
    const int k0 = ws.rows.first + ws.m_lo;
    std::vector<double> G = weighted_powers(F, r, beta, k0, ws.rows.last + ws.m_hi);
    for (int j = ws.rows.first; j <= ws.rows.last; ++j) {
        double radius = ws.radius_factor * g.t(j);
        BallPredicate in(g, radius);
        BallStencil bound = ball_stencil(g, radius);
        double count = static_cast<double>(ws.s_count()) *
                       static_cast<double>(ball_stencil(g, ws.normalizer_factor * g.t(j)).count);
        const long M = bound.M;
        const long M1 = g.d == 2 ? M : 0;
        for (std::size_t i = 0; i < N; ++i) {
            auto xi = unflatten(g, i);
            double acc = 0.0;
            for (long o0 = -M; o0 <= M; ++o0)
                for (long o1 = -M1; o1 <= M1; ++o1) {
                    if (!in(o0, o1)) continue;
                    std::size_t n = flatten(g, xi[0] + o0, xi[1] + o1);
                    for (int k = j + ws.m_lo; k <= j + ws.m_hi; ++k) {
                        double v = G[static_cast<std::size_t>(k - k0) * N + n];
                        acc = r.is_infinite() ? std::max(acc, v) : acc + v;
                    }
                }
            A.values[static_cast<std::size_t>(j - ws.rows.first) * N + i] = finish_mean(acc, count, r);
        }
    }
    return A;
}

inline AvgField box_reduce_fast(const HalfSpaceField& F, ExtendedExponent r, double beta, const WindowSpec& ws,
                                const WhitneyParams& w) {
    const TorusGrid& g = F.grid;
    AvgField A = make_avg_shell(F, ws, r, beta, w);
    const std::size_t N = g.spatial_size();
    const int k0 = ws.rows.first + ws.m_lo;
    const int k1 = ws.rows.last + ws.m_hi;
    const std::size_t nk = static_cast<std::size_t>(k1 - k0 + 1);
    std::vector<double> G = weighted_powers(F, r, beta, k0, k1);
    std::size_t ns = static_cast<std::size_t>(ws.s_count());
    std::vector<double> H = r.is_infinite() ? window_reduce_rows(G, nk, N, ns, MaxOp{}) : window_reduce_rows(G, nk, N, ns, SumOp{});
    for (int j = ws.rows.first; j <= ws.rows.last; ++j) {
        std::span<const double> hrow(H.data() + static_cast<std::size_t>(j - ws.rows.first) * N, N);
        BallStencil st = ball_stencil(g, ws.radius_factor * g.t(j));
        std::vector<double> acc = r.is_infinite() ? ball_reduce(g, hrow, st, MaxOp{}) : ball_reduce(g, hrow, st, SumOp{});
        double count = static_cast<double>(ns) * static_cast<double>(ball_stencil(g, ws.normalizer_factor * g.t(j)).count);
        double* out = A.values.data() + static_cast<std::size_t>(j - ws.rows.first) * N;
        for (std::size_t i = 0; i < N; ++i) out[i] = finish_mean(acc[i], count, r);
    }
    return A;
}

}  // namespace detail

// Direct evaluation of the Whitney average; serves as the oracle for box_average_fast.
inline AvgField box_average(const HalfSpaceField& F, ExtendedExponent r, double beta, const WhitneyParams& w = {}) {
    validate(F);
    return detail::box_reduce_naive(F, r, beta, whitney_window(F.grid, w), w);
}

inline AvgField box_average_fast(const HalfSpaceField& F, ExtendedExponent r, double beta, const WhitneyParams& w = {}) {
    validate(F);
    return detail::box_reduce_fast(F, r, beta, whitney_window(F.grid, w), w);
}

// (sum_j w ||A(t_j,.)||_p^q)^(1/q) over the given rows.
inline double reduce_z(const AvgField& A, ExtendedExponent p, ExtendedExponent q, const IndexRange& rows) {
    if (rows.empty()) throw ValidationError("empty retained t-set");
    const TorusGrid& g = A.grid;
    LpReducer outer(q);
    for (int j = rows.first; j <= rows.last; ++j) {
        LpReducer inner(p);
        for (double v : A.row(j)) inner.add(v, g.cell_volume());
        outer.add(inner.value(), g.log_weight());
    }
    return outer.value();
}

// ||(sum_j w A(t_j,x)^q)^(1/q)||_{L^p_x} over the given rows.
inline double reduce_t(const AvgField& A, ExtendedExponent p, ExtendedExponent q, const IndexRange& rows) {
    if (rows.empty()) throw ValidationError("empty retained t-set");
    const TorusGrid& g = A.grid;
    const std::size_t N = g.spatial_size();
    LpReducer outer(p);
    for (std::size_t i = 0; i < N; ++i) {
        LpReducer inner(q);
        for (int j = rows.first; j <= rows.last; ++j) inner.add(A.row(j)[i], g.log_weight());
        outer.add(inner.value(), g.cell_volume());
    }
    return outer.value();
}

inline IndexRange resolve_rows(const IndexRange& own, const std::optional<IndexRange>& restrict_to) {
    IndexRange r = restrict_to ? own.intersect(*restrict_to) : own;
    if (r.empty()) throw ValidationError("empty retained t-set");
    return r;
}

// N(lambda)/||F||: the Z-norm with ball radius lambda*c*t, normalised by the radius-c*t ball.
inline double change_angle_ratio(const HalfSpaceField& F, const SpaceSpec& spec, double lambda, const WhitneyParams& w = {}) {
    if (!(lambda >= 1.0)) throw ValidationError("change of angle needs lambda >= 1");
    validate(F);
    WindowSpec base = whitney_window(F.grid, w);
    WindowSpec wide = base;
    wide.radius_factor = base.radius_factor * lambda;
    if (wide.radius_factor * F.grid.t(wide.rows.last) > F.grid.L / 2 * (1 + 1e-12))
        throw ValidationError("change of angle radius exceeds grid margin");
    double denom = reduce_z(detail::box_reduce_fast(F, spec.r, spec.beta, base, w), spec.p, spec.q, base.rows);
    if (denom == 0.0) throw ValidationError("zero norm");
    double num = reduce_z(detail::box_reduce_fast(F, spec.r, spec.beta, wide, w), spec.p, spec.q, wide.rows);
    return num / denom;
}

}  // namespace zspace
