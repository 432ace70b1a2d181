#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "norms.hpp"

namespace zspace {

enum class EndpointKind { Z, T };

inline double endpoint_norm(EndpointKind kind, const HalfSpaceField& F, const SpaceSpec& s, const WhitneyParams& w = {}) {
    return kind == EndpointKind::Z ? z_norm(F, s, w) : t_norm(F, s, w);
}

// Index of the first node with t_j >= 2^k (J+1 if none).
inline int cut_index(const TorusGrid& g, int k) {
    long j = static_cast<long>(g.s_oct) * k - g.log2_tmin_steps();
    return static_cast<int>(std::clamp<long>(j, 0, g.J + 1));
}

// upper = true keeps s >= 2^k, otherwise s < 2^k.
inline HalfSpaceField time_cut(const HalfSpaceField& F, int k, bool upper) {
    HalfSpaceField out = F;
    int jc = cut_index(F.grid, k);
    const std::size_t N = F.grid.spatial_size();
    for (int j = 0; j <= F.grid.J; ++j) {
        bool keep = upper ? j >= jc : j < jc;
        if (!keep) std::fill_n(out.values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(j) * N), N, 0.0);
    }
    return out;
}

namespace detail {

inline void check_couple(const SpaceSpec& s0, const SpaceSpec& s1) {
    if (!(s0.p == s1.p) || !(s0.r == s1.r)) throw ValidationError("endpoint specs must share p and r");
    if (s0.beta == s1.beta) throw ValidationError("endpoint weights must differ (beta0 = beta1)");
}

}  // namespace detail

inline double k_functional_upper(const HalfSpaceField& F, const SpaceSpec& spec0, const SpaceSpec& spec1, int k,
                                 EndpointKind kind = EndpointKind::Z, const WhitneyParams& w = {}) {
    detail::check_couple(spec0, spec1);
    double alpha = spec0.beta - spec1.beta;
    double n0 = endpoint_norm(kind, time_cut(F, k, true), spec0, w);
    double n1 = endpoint_norm(kind, time_cut(F, k, false), spec1, w);
    return n0 + std::exp2(-k * alpha) * n1;
}

// Window of k with 2^k in [2 t_min, t_max / 2].
inline std::vector<int> k_window(const TorusGrid& g) {
    std::vector<int> ks;
    for (int k = static_cast<int>(std::ceil(std::log2(2 * g.t_min) - 1e-12)); std::ldexp(1.0, k) <= g.t_max / 2 * (1 + 1e-12); ++k)
        ks.push_back(k);
    return ks;
}

// K-hat at t_k = 2^{-k alpha}: the least of a + t b over the time-cut splits of the window and the two trivial splits.
struct KProfile {
    double alpha = 0.0;
    SpaceSpec spec0, spec1;
    EndpointKind kind = EndpointKind::Z;
    std::vector<int> ks;
    std::vector<double> t;
    std::vector<double> khat;
    std::vector<double> single_split;  // k_functional_upper at the same k
    double norm0 = 0.0;                // ||F||_0
    double norm1 = 0.0;                // ||F||_1
};

inline KProfile build_k_profile(const HalfSpaceField& F, const SpaceSpec& spec0, const SpaceSpec& spec1,
                                EndpointKind kind = EndpointKind::Z, const WhitneyParams& w = {}) {
    detail::check_couple(spec0, spec1);
    KProfile P;
    P.alpha = spec0.beta - spec1.beta;
    if (P.alpha <= 0.0) throw ValidationError("k profile needs beta0 > beta1");
    P.spec0 = spec0;
    P.spec1 = spec1;
    P.kind = kind;
    P.ks = k_window(F.grid);
    if (P.ks.empty()) throw ValidationError("empty k window");
    P.norm0 = endpoint_norm(kind, F, spec0, w);
    P.norm1 = endpoint_norm(kind, F, spec1, w);
    std::vector<double> a{P.norm0, 0.0}, b{0.0, P.norm1};
    for (int k : P.ks) {
        a.push_back(endpoint_norm(kind, time_cut(F, k, true), spec0, w));
        b.push_back(endpoint_norm(kind, time_cut(F, k, false), spec1, w));
    }
    for (std::size_t n = 0; n < P.ks.size(); ++n) {
        double t = std::exp2(-P.ks[n] * P.alpha);
        double best = kInf;
        for (std::size_t m = 0; m < a.size(); ++m) best = std::min(best, a[m] + t * b[m]);
        P.t.push_back(t);
        P.khat.push_back(best);
        P.single_split.push_back(a[n + 2] + t * b[n + 2]);
    }
    return P;
}

struct KShape {
    double monotone_violation = 0.0;  // largest relative drop of K-hat as t grows
    double ratio_violation = 0.0;     // largest relative rise of K-hat/t as t grows
    double bound_violation = 0.0;     // largest relative excess over min(||F||_0, t ||F||_1)
};

inline KShape k_profile_shape(const KProfile& P) {
    KShape s;
    // ks ascend, so t descends along the profile.
    for (std::size_t n = 0; n + 1 < P.ks.size(); ++n) {
        double big = P.khat[n], small = P.khat[n + 1];
        if (big > 0) s.monotone_violation = std::max(s.monotone_violation, (small - big) / big);
        double rb = P.khat[n] / P.t[n], rs = P.khat[n + 1] / P.t[n + 1];
        if (rs > 0) s.ratio_violation = std::max(s.ratio_violation, (rb - rs) / rs);
    }
    for (std::size_t n = 0; n < P.ks.size(); ++n) {
        double cap = std::min(P.norm0, P.t[n] * P.norm1);
        if (cap > 0) s.bound_violation = std::max(s.bound_violation, (P.khat[n] - cap) / cap);
        else if (P.khat[n] > 0) s.bound_violation = kInf;
    }
    return s;
}

inline double interpolated_beta(const SpaceSpec& s0, const SpaceSpec& s1, double theta) {
    return (1 - theta) * s0.beta + theta * s1.beta;
}

// (sum_k (2^{k alpha theta} K-hat(2^{-k alpha}))^q)^(1/q).
inline double real_interp_from_profile(const KProfile& P, double theta, ExtendedExponent q) {
    LpReducer acc(q);
    for (std::size_t n = 0; n < P.ks.size(); ++n) acc.add(std::exp2(P.ks[n] * P.alpha * theta) * P.khat[n], 1.0);
    return acc.value();
}

inline double real_interp_norm(const HalfSpaceField& F, double theta, ExtendedExponent q, const SpaceSpec& spec0,
                               const SpaceSpec& spec1, EndpointKind kind = EndpointKind::Z, const WhitneyParams& w = {}) {
    if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0,1)");
    detail::check_couple(spec0, spec1);
    if (spec0.beta < spec1.beta) return real_interp_norm(F, 1 - theta, q, spec1, spec0, kind, w);
    return real_interp_from_profile(build_k_profile(F, spec0, spec1, kind, w), theta, q);
}

inline SpaceSpec real_target_spec(const SpaceSpec& s0, const SpaceSpec& s1, double theta, ExtendedExponent q) {
    return {s0.p, q, s0.r, interpolated_beta(s0, s1, theta)};
}

inline EquivalenceReport real_interp_check(const std::vector<NamedField>& fields, double theta, ExtendedExponent q,
                                           const SpaceSpec& spec0, const SpaceSpec& spec1, EndpointKind kind = EndpointKind::Z) {
    EquivalenceReport rep;
    rep.check = kind == EndpointKind::Z ? "real-interp" : "tent-interp";
    rep.params = format_spec(spec0) + "|" + format_spec(spec1) + "|theta=" + format_real(theta) + "|q=" + format_exponent(q);
    SpaceSpec target = real_target_spec(spec0, spec1, theta, q);
    for (const auto& nf : fields) rep.add(nf.id, real_interp_norm(nf.F, theta, q, spec0, spec1, kind), z_norm(nf.F, target));
    return rep;
}

inline EquivalenceReport tent_real_interp_check(const std::vector<NamedField>& fields, double theta, ExtendedExponent q,
                                                const SpaceSpec& spec0, const SpaceSpec& spec1) {
    if (spec0.p.is_infinite()) throw ValidationError("tent spaces not defined for p=inf in this artifact");
    return real_interp_check(fields, theta, q, spec0, spec1, EndpointKind::T);
}

struct NestingReport {
    EquivalenceReport lower;  // t_norm(p,q) / z_norm(p, min(p,q))
    EquivalenceReport upper;  // z_norm(p, max(p,q)) / t_norm(p,q)
};

inline NestingReport nesting_check(const std::vector<NamedField>& fields, ExtendedExponent p, ExtendedExponent q,
                                   ExtendedExponent r, double beta) {
    if (p.is_infinite()) throw ValidationError("tent spaces not defined for p=inf in this artifact");
    ExtendedExponent lo = q.value() < p.value() ? q : p;
    ExtendedExponent hi = q.value() < p.value() ? p : q;
    NestingReport rep;
    SpaceSpec mid{p, q, r, beta};
    rep.lower.check = "nesting-lower";
    rep.upper.check = "nesting-upper";
    rep.lower.params = rep.upper.params = format_spec(mid);
    for (const auto& nf : fields) {
        double t = t_norm(nf.F, mid);
        rep.lower.add(nf.id, t, z_norm(nf.F, {p, lo, r, beta}));
        rep.upper.add(nf.id, z_norm(nf.F, {p, hi, r, beta}), t);
    }
    return rep;
}

inline bool embedding_admissible(const SpaceSpec& s0, const SpaceSpec& s1, int d) {
    auto le = [](const ExtendedExponent& a, const ExtendedExponent& b) { return b.is_infinite() || (!a.is_infinite() && a.value() <= b.value()); };
    double shift = d * (s0.p.inverse() - s1.p.inverse());
    return le(s0.p, s1.p) && le(s0.q, s1.q) && le(s1.r, s0.r) && std::abs((s0.beta - s1.beta) - shift) <= 1e-12;
}

// Ratios z(F, spec1) / z(F, spec0).
inline EquivalenceReport embedding_check(const std::vector<NamedField>& fields, const SpaceSpec& spec0, const SpaceSpec& spec1) {
    EquivalenceReport rep;
    rep.check = "embedding";
    rep.params = format_spec(spec0) + "->" + format_spec(spec1);
    if (fields.empty()) return rep;
    if (!embedding_admissible(spec0, spec1, fields.front().F.grid.d)) throw ValidationError("embedding parameter relation violated");
    for (const auto& nf : fields) rep.add(nf.id, z_norm(nf.F, spec1), z_norm(nf.F, spec0));
    return rep;
}

inline SpaceSpec convexified(const SpaceSpec& s, double alpha) {
    auto div = [alpha](const ExtendedExponent& e) { return e.is_infinite() ? e : ExtendedExponent(e.value() / alpha); };
    return {div(s.p), div(s.q), div(s.r), alpha * s.beta};
}

struct ConvexityReport {
    double lhs = 0.0;                 // ||(sum |F_i|^alpha)^(1/alpha)||
    double rhs = 0.0;                 // (sum ||F_i||^alpha)^(1/alpha)
    double relative_slack = 0.0;      // (rhs - lhs) / rhs
    double identity_max_rel_err = 0.0;
};

inline ConvexityReport convexity_check(const std::vector<HalfSpaceField>& fields, double alpha, const SpaceSpec& spec) {
    double m = std::min({spec.p.value(), spec.q.value(), spec.r.value()});
    if (!(alpha > 0.0) || alpha > m) throw ValidationError("convexity exponent must satisfy 0 < alpha <= min(p,q,r)");
    if (fields.empty()) throw ValidationError("convexity check needs at least one field");
    ConvexityReport rep;
    HalfSpaceField combo = zero_field(fields.front().grid);
    CompensatedSum rhs;
    SpaceSpec cs = convexified(spec, alpha);
    for (const auto& F : fields) {
        require_same_grid(F.grid, combo.grid);
        for (std::size_t n = 0; n < F.values.size(); ++n) combo.values[n] += std::pow(std::abs(F.values[n]), alpha);
        double z = z_norm(F, spec);
        rhs.add(std::pow(z, alpha));
        HalfSpaceField powered = F;
        for (double& v : powered.values) v = std::pow(std::abs(v), alpha);
        double via = std::pow(z_norm(powered, cs), 1.0 / alpha);
        rep.identity_max_rel_err = std::max(rep.identity_max_rel_err, relative_difference(z, via));
    }
    for (double& v : combo.values) v = std::pow(v, 1.0 / alpha);
    rep.lhs = z_norm(combo, spec);
    rep.rhs = std::pow(rhs.value(), 1.0 / alpha);
    rep.relative_slack = rep.rhs > 0 ? (rep.rhs - rep.lhs) / rep.rhs : 0.0;
    return rep;
}

// Harmonic means for p, q, r and the affine rule for beta.
inline SpaceSpec interpolate_spec(const SpaceSpec& s0, const SpaceSpec& s1, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in [0,1]");
    auto harm = [theta](const ExtendedExponent& a, const ExtendedExponent& b) {
        double inv = (1 - theta) * a.inverse() + theta * b.inverse();
        return inv == 0.0 ? ExtendedExponent::infinity() : ExtendedExponent(1.0 / inv);
    };
    return {harm(s0.p, s1.p), harm(s0.q, s1.q), harm(s0.r, s1.r), interpolated_beta(s0, s1, theta)};
}

// Ratios z(F, spec_theta) / (z(F, spec0)^{1-theta} z(F, spec1)^theta).
inline EquivalenceReport log_convexity_check(const std::vector<NamedField>& fields, double theta, const SpaceSpec& spec0,
                                             const SpaceSpec& spec1) {
    SpaceSpec st = interpolate_spec(spec0, spec1, theta);
    EquivalenceReport rep;
    rep.check = "log-convexity";
    rep.params = format_spec(spec0) + "|" + format_spec(spec1) + "|theta=" + format_real(theta);
    for (const auto& nf : fields) {
        double z0 = z_norm(nf.F, spec0), z1 = z_norm(nf.F, spec1);
        rep.add(nf.id, z_norm(nf.F, st), std::pow(z0, 1 - theta) * std::pow(z1, theta));
    }
    return rep;
}

}  // namespace zspace
