#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

namespace zspace {

// Torus [0,L)^d times the geometric scale grid t_j = t_min * 2^(j/s_oct), j = 0..J.
struct TorusGrid {
    int d = 1;
    double L = 64.0;
    std::size_t n_x = 1024;
    double t_min = 0.0625;
    double t_max = 8.0;
    int s_oct = 8;
    int J = 56;

    std::size_t spatial_size() const { return d == 1 ? n_x : n_x * n_x; }
    std::size_t t_count() const { return static_cast<std::size_t>(J) + 1; }
    std::size_t size() const { return t_count() * spatial_size(); }

    double h() const { return L / static_cast<double>(n_x); }
    double cell_volume() const { return d == 1 ? h() : h() * h(); }
    double t(int j) const { return t_min * std::exp2(static_cast<double>(j) / s_oct); }
    // Quadrature weight of dt/t per node.
    double log_weight() const { return std::log(2.0) / s_oct; }
    // Integer e with t_min = 2^(e/s_oct); alignment is checked in make_grid.
    long log2_tmin_steps() const { return std::lround(s_oct * std::log2(t_min)); }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

inline TorusGrid make_grid(int d, double L, std::size_t n_x, double t_min, double t_max, int s_oct) {
    if (d != 1 && d != 2) throw ValidationError("d must be 1 or 2");
    if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L must be positive");
    if (n_x < 2 || (n_x & (n_x - 1)) != 0) throw ValidationError("n_x not power of two");
    if (!(t_min > 0.0) || !(t_min < t_max) || !std::isfinite(t_max)) throw ValidationError("need 0 < t_min < t_max");
    if (s_oct < 4) throw ValidationError("s_oct must be at least 4");
    if (2.0 * t_max > L / 4.0) throw ValidationError("2·t_max ≥ L/4");
    double e = s_oct * std::log2(t_min);
    if (std::abs(e - std::round(e)) > 1e-9)
        throw ValidationError("t grid not dyadically aligned: s_oct·log2(t_min) must be an integer");
    double span = s_oct * std::log2(t_max / t_min);
    TorusGrid g;
    g.d = d;
    g.L = L;
    g.n_x = n_x;
    g.t_min = t_min;
    g.t_max = t_max;
    g.s_oct = s_oct;
    g.J = static_cast<int>(std::ceil(span - 1e-9));
    return g;
}

inline TorusGrid default_grid() { return make_grid(1, 64.0, 1024, 0.0625, 8.0, 8); }

// Spatial multi-index helpers; the last axis varies fastest.
inline std::array<long, 2> unflatten(const TorusGrid& g, std::size_t i) {
    if (g.d == 1) return {static_cast<long>(i), 0};
    return {static_cast<long>(i / g.n_x), static_cast<long>(i % g.n_x)};
}

inline std::size_t flatten(const TorusGrid& g, long i0, long i1) {
    long n = static_cast<long>(g.n_x);
    long a = ((i0 % n) + n) % n;
    if (g.d == 1) return static_cast<std::size_t>(a);
    long b = ((i1 % n) + n) % n;
    return static_cast<std::size_t>(a * n + b);
}

// Minimal wrapped offset between two indices on one axis.
inline long torus_offset(long a, long b, long n) {
    long o = ((a - b) % n + n) % n;
    return o > n / 2 ? o - n : o;
}

struct BoundaryFunction {
    TorusGrid grid;
    std::vector<double> samples;
};

struct HalfSpaceField {
    TorusGrid grid;
    std::vector<double> values;

    std::span<const double> row(int j) const {
        return {values.data() + static_cast<std::size_t>(j) * grid.spatial_size(), grid.spatial_size()};
    }
    std::span<double> row(int j) {
        return {values.data() + static_cast<std::size_t>(j) * grid.spatial_size(), grid.spatial_size()};
    }
    double at(int j, std::size_t i) const { return values[static_cast<std::size_t>(j) * grid.spatial_size() + i]; }
};

inline BoundaryFunction zero_boundary(const TorusGrid& g) { return {g, std::vector<double>(g.spatial_size(), 0.0)}; }
inline HalfSpaceField zero_field(const TorusGrid& g) { return {g, std::vector<double>(g.size(), 0.0)}; }

inline void validate(const BoundaryFunction& f) {
    if (f.samples.size() != f.grid.spatial_size()) throw ValidationError("boundary sample count does not match grid");
    for (double v : f.samples)
        if (!std::isfinite(v)) throw ValidationError("boundary function has non-finite samples");
}

inline void validate(const HalfSpaceField& F) {
    if (F.values.size() != F.grid.size()) throw ValidationError("field value count does not match grid");
    for (double v : F.values)
        if (!std::isfinite(v)) throw ValidationError("field has non-finite values");
}

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
    if (!(a == b)) throw ValidationError("grid mismatch");
}

// Pointwise helpers used by checks and tests.
inline HalfSpaceField scaled(const HalfSpaceField& F, double k) {
    HalfSpaceField out = F;
    for (double& v : out.values) v *= k;
    return out;
}

inline HalfSpaceField absolute(const HalfSpaceField& F) {
    HalfSpaceField out = F;
    for (double& v : out.values) v = std::abs(v);
    return out;
}

}  // namespace zspace
