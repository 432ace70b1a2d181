#pragma once

#include <fftw3.h>

#include <climits>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace zspace {

namespace detail {

// r2c/c2r plan pair for one (d, n); FFTW_ESTIMATE keeps plans deterministic.
class FftPlans {
public:
    FftPlans(int d, std::size_t n) : d_(d), n_(n) {
        std::size_t real_n = d == 1 ? n : n * n;
        double* in = fftw_alloc_real(real_n);
        fftw_complex* out = fftw_alloc_complex(spectral_size());
        int ni = static_cast<int>(n);
        if (d == 1) {
            r2c_ = fftw_plan_dft_r2c_1d(ni, in, out, FFTW_ESTIMATE);
            c2r_ = fftw_plan_dft_c2r_1d(ni, out, in, FFTW_ESTIMATE);
        } else {
            r2c_ = fftw_plan_dft_r2c_2d(ni, ni, in, out, FFTW_ESTIMATE);
            c2r_ = fftw_plan_dft_c2r_2d(ni, ni, out, in, FFTW_ESTIMATE);
        }
        fftw_free(in);
        fftw_free(out);
    }
    ~FftPlans() {
        fftw_destroy_plan(r2c_);
        fftw_destroy_plan(c2r_);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    std::size_t spectral_size() const { return d_ == 1 ? n_ / 2 + 1 : n_ * (n_ / 2 + 1); }
    std::size_t real_size() const { return d_ == 1 ? n_ : n_ * n_; }
    fftw_plan r2c() const { return r2c_; }
    fftw_plan c2r() const { return c2r_; }

private:
    int d_;
    std::size_t n_;
    fftw_plan r2c_ = nullptr;
    fftw_plan c2r_ = nullptr;
};

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline const FftPlans& plans_for(int d, std::size_t n) {
    static std::map<std::pair<int, std::size_t>, std::unique_ptr<FftPlans>> cache;
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto& slot = cache[{d, n}];
    if (!slot) slot = std::make_unique<FftPlans>(d, n);
    return *slot;
}

template <class T>
struct FftwDeleter {
    void operator()(T* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter<double>>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter<fftw_complex>>;

}  // namespace detail

// Angular frequency |xi| per entry of the half-spectrum layout, xi in (2*pi/L) Z^d.
inline std::vector<double> frequency_magnitudes(const TorusGrid& g) {
    const std::size_t n = g.n_x;
    const double k0 = 2.0 * std::numbers::pi / g.L;
    auto signed_index = [n](std::size_t m) { return m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n); };
    std::vector<double> out;
    if (g.d == 1) {
        for (std::size_t m = 0; m <= n / 2; ++m) out.push_back(k0 * static_cast<double>(m));
    } else {
        for (std::size_t m1 = 0; m1 < n; ++m1)
            for (std::size_t m2 = 0; m2 <= n / 2; ++m2) out.push_back(k0 * std::hypot(signed_index(m1), static_cast<double>(m2)));
    }
    return out;
}

// Number of full-spectrum modes each half-spectrum entry stands for (Parseval weights).
inline std::vector<double> spectral_multiplicity(const TorusGrid& g) {
    const std::size_t n = g.n_x;
    std::vector<double> out;
    auto w = [n](std::size_t m) { return (m == 0 || m == n / 2) ? 1.0 : 2.0; };
    if (g.d == 1) {
        for (std::size_t m = 0; m <= n / 2; ++m) out.push_back(w(m));
    } else {
        for (std::size_t m1 = 0; m1 < n; ++m1)
            for (std::size_t m2 = 0; m2 <= n / 2; ++m2) out.push_back(w(m2));
    }
    return out;
}

// Forward transform of a boundary function, reusable for many real multipliers.
class Spectrum {
public:
    explicit Spectrum(const BoundaryFunction& f) : grid_(f.grid), plans_(&detail::plans_for(f.grid.d, f.grid.n_x)) {
        validate(f);
        detail::RealBuffer in(fftw_alloc_real(plans_->real_size()));
        std::copy(f.samples.begin(), f.samples.end(), in.get());
        coeffs_.reset(fftw_alloc_complex(plans_->spectral_size()));
        fftw_execute_dft_r2c(plans_->r2c(), in.get(), coeffs_.get());
    }

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return plans_->spectral_size(); }
    std::complex<double> coeff(std::size_t m) const { return {coeffs_[m][0], coeffs_[m][1]}; }

    // Inverse transform of (multiplier[m] * fhat[m]); multiplier follows the half-spectrum layout.
    std::vector<double> synthesize(const std::vector<double>& multiplier) const {
        detail::ComplexBuffer work(fftw_alloc_complex(size()));
        for (std::size_t m = 0; m < size(); ++m) {
            work[m][0] = coeffs_[m][0] * multiplier[m];
            work[m][1] = coeffs_[m][1] * multiplier[m];
        }
        detail::RealBuffer out(fftw_alloc_real(plans_->real_size()));
        fftw_execute_dft_c2r(plans_->c2r(), work.get(), out.get());
        const double inv = 1.0 / static_cast<double>(plans_->real_size());
        std::vector<double> res(plans_->real_size());
        for (std::size_t i = 0; i < res.size(); ++i) res[i] = out[i] * inv;
        return res;
    }

private:
    TorusGrid grid_;
    const detail::FftPlans* plans_;
    detail::ComplexBuffer coeffs_;
};

// Smooth cutoff: 1 on |xi| <= 1, 0 on |xi| >= 2, transition from exp(-1/x).
inline double cutoff_chi(double xi) {
    double a = std::abs(xi);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    auto psi = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    double u = a - 1.0;
    double up = psi(1.0 - u), dn = psi(u);
    return up / (up + dn);
}

inline double lp_symbol0(double xi) { return cutoff_chi(xi) - cutoff_chi(2.0 * xi); }

enum class KernelVariant { heat, lp_block, gauss_moment };

inline constexpr int kInfiniteOrder = INT_MAX / 4;

struct KernelSpec {
    KernelVariant variant = KernelVariant::heat;
    int N = 0;
    int R = -1;
    double epsilon = 1.0;

    static KernelSpec heat() { return {KernelVariant::heat, 0, -1, 1.0}; }
    static KernelSpec gauss_moment(int N) {
        if (N < 0) throw ValidationError("gauss_moment order must be nonnegative");
        return {KernelVariant::gauss_moment, N, N - 1, 1.0};
    }
    // The block symbol is supported in (1/2, 2); its annulus sits strictly inside.
    static KernelSpec lp_block() { return {KernelVariant::lp_block, 0, kInfiniteOrder, 1.5}; }

    // Radial symbol F(Phi)(xi) as a function of |xi|.
    double symbol(double x) const {
        switch (variant) {
            case KernelVariant::heat: return std::exp(-x * x);
            case KernelVariant::gauss_moment: return std::pow(x, N) * std::exp(-x * x);
            case KernelVariant::lp_block: return lp_symbol0(x);
        }
        return 0.0;
    }

    std::string name() const {
        switch (variant) {
            case KernelVariant::heat: return "heat";
            case KernelVariant::gauss_moment: return "gauss_moment(" + std::to_string(N) + ")";
            case KernelVariant::lp_block: return "lp_block";
        }
        return "?";
    }
};

inline std::vector<double> scaled_symbol(const KernelSpec& k, const std::vector<double>& xi, double t) {
    std::vector<double> m(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) m[i] = k.symbol(t * xi[i]);
    return m;
}

inline HalfSpaceField kernel_extension(const BoundaryFunction& f, const KernelSpec& k) {
    const TorusGrid& g = f.grid;
    Spectrum spec(f);
    std::vector<double> xi = frequency_magnitudes(g);
    HalfSpaceField F = zero_field(g);
    for (int j = 0; j <= g.J; ++j) {
        std::vector<double> slice = spec.synthesize(scaled_symbol(k, xi, g.t(j)));
        std::copy(slice.begin(), slice.end(), F.row(j).begin());
    }
    return F;
}

inline HalfSpaceField heat_extension(const BoundaryFunction& f) { return kernel_extension(f, KernelSpec::heat()); }

// e^{tau Delta} f for a single time tau >= 0 (tau = t^2 for the scale-t slice).
inline BoundaryFunction heat_semigroup(const BoundaryFunction& f, double tau) {
    Spectrum spec(f);
    std::vector<double> xi = frequency_magnitudes(f.grid);
    std::vector<double> m(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) m[i] = std::exp(-tau * xi[i] * xi[i]);
    return {f.grid, spec.synthesize(m)};
}

struct LPFamily {
    int k_min = -4;
    int k_max = 6;

    double phi(int k, double xi) const { return lp_symbol0(std::ldexp(xi, -k)); }
    int count() const { return k_max - k_min + 1; }
};

// Blocks cover every nonzero frequency of the grid: 2^k_min <= 2*pi/L and 2^k_max >= Nyquist.
inline LPFamily default_lp_family(const TorusGrid& g) {
    double lowest = 2.0 * std::numbers::pi / g.L;
    double nyquist = std::numbers::pi * static_cast<double>(g.n_x) / g.L;
    return {static_cast<int>(std::floor(std::log2(lowest))), static_cast<int>(std::ceil(std::log2(nyquist)))};
}

inline std::vector<BoundaryFunction> lp_blocks(const BoundaryFunction& f, const LPFamily& fam) {
    if (fam.k_min > fam.k_max) throw ValidationError("empty LP family");
    Spectrum spec(f);
    std::vector<double> xi = frequency_magnitudes(f.grid);
    std::vector<BoundaryFunction> out;
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        std::vector<double> m(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) m[i] = fam.phi(k, xi[i]);
        out.push_back({f.grid, spec.synthesize(m)});
    }
    return out;
}

inline BoundaryFunction lp_block(const BoundaryFunction& f, const LPFamily& fam, int k) {
    if (k < fam.k_min || k > fam.k_max) throw ValidationError("LP block index out of family range");
    Spectrum spec(f);
    std::vector<double> xi = frequency_magnitudes(f.grid);
    std::vector<double> m(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) m[i] = fam.phi(k, xi[i]);
    return {f.grid, spec.synthesize(m)};
}

// Energy fraction of f at frequencies outside [2^k_min, 2^k_max] (zero mode included).
inline double lp_tail_mass(const BoundaryFunction& f, const LPFamily& fam) {
    Spectrum spec(f);
    std::vector<double> xi = frequency_magnitudes(f.grid);
    std::vector<double> mult = spectral_multiplicity(f.grid);
    CompensatedSum total, tail;
    const double lo = std::ldexp(1.0, fam.k_min), hi = std::ldexp(1.0, fam.k_max);
    for (std::size_t m = 0; m < xi.size(); ++m) {
        double e = mult[m] * std::norm(spec.coeff(m));
        total.add(e);
        if (xi[m] < lo || xi[m] > hi) tail.add(e);
    }
    return total.value() > 0.0 ? tail.value() / total.value() : 0.0;
}

// sup over grid offsets y of |(Phi_t * f)(x+y)| / (1+|y|/t)^a, torus distance.
inline BoundaryFunction peetre_maximal(const BoundaryFunction& f, const KernelSpec& k, double t, double a) {
    if (!(a > 0.0)) throw ValidationError("Peetre parameter a must be positive");
    if (!(t > 0.0)) throw ValidationError("Peetre scale t must be positive");
    const TorusGrid& g = f.grid;
    Spectrum spec(f);
    std::vector<double> conv = spec.synthesize(scaled_symbol(k, frequency_magnitudes(g), t));
    const long n = static_cast<long>(g.n_x);
    const double h = g.h();
    const std::size_t N = g.spatial_size();
    // Damping depends only on the wrapped offset, so tabulate it once.
    std::vector<double> damp(N);
    for (std::size_t o = 0; o < N; ++o) {
        auto idx = unflatten(g, o);
        double y0 = static_cast<double>(torus_offset(idx[0], 0, n)) * h;
        double y1 = g.d == 2 ? static_cast<double>(torus_offset(idx[1], 0, n)) * h : 0.0;
        damp[o] = std::pow(1.0 + std::hypot(y0, y1) / t, -a);
    }
    BoundaryFunction out = zero_boundary(g);
    for (std::size_t i = 0; i < N; ++i) {
        auto xi = unflatten(g, i);
        double best = 0.0;
        for (std::size_t o = 0; o < N; ++o) {
            auto yo = unflatten(g, o);
            double v = std::abs(conv[flatten(g, xi[0] + yo[0], xi[1] + yo[1])]) * damp[o];
            best = std::max(best, v);
        }
        out.samples[i] = best;
    }
    return out;
}

struct AdmissibilityReport {
    KernelSpec kernel;
    double beta = 0.0;
    double annulus_min = 0.0;
    bool annulus_ok = false;
    double vanishing_order = 0.0;
    bool vanishing_ok = false;
    bool order_vs_beta_ok = false;

    bool passed() const { return annulus_ok && vanishing_ok && order_vs_beta_ok; }
};

// Tolerance on the fitted log-log slope when comparing with R+1.
inline constexpr double kVanishingSlopeTolerance = 0.25;

inline AdmissibilityReport verify_kernel_admissible(const KernelSpec& k, double beta, const TorusGrid& g) {
    AdmissibilityReport rep;
    rep.kernel = k;
    rep.beta = beta;
    // The extension samples the symbol at t_j * xi_m; those arguments form the frequency grid here.
    std::vector<double> xi = frequency_magnitudes(g);
    std::vector<double> distinct;
    for (double x : xi)
        if (x > 0.0) distinct.push_back(x);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                   distinct.end());

    double amin = kInf;
    for (int j = 0; j <= g.J; ++j)
        for (double x : distinct) {
            double arg = g.t(j) * x;
            if (arg > k.epsilon / 2 && arg < k.epsilon) amin = std::min(amin, std::abs(k.symbol(arg)));
        }
    if (std::isinf(amin))
        for (int i = 1; i < 64; ++i) amin = std::min(amin, std::abs(k.symbol(k.epsilon * (0.5 + i / 128.0))));
    rep.annulus_min = amin;
    rep.annulus_ok = amin > 0.0;

    std::size_t npts = std::min<std::size_t>(4, distinct.size());
    bool vanishes_identically = false;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < npts; ++i) {
        double v = std::abs(k.symbol(g.t_min * distinct[i]));
        if (v == 0.0) {
            vanishes_identically = true;
            break;
        }
        double lx = std::log(g.t_min * distinct[i]), ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    if (vanishes_identically) {
        rep.vanishing_order = kInf;
    } else {
        double m = static_cast<double>(npts);
        rep.vanishing_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    rep.vanishing_ok = rep.vanishing_order >= static_cast<double>(k.R) + 1.0 - kVanishingSlopeTolerance;
    rep.order_vs_beta_ok = static_cast<double>(k.R) + 1.0 > beta;
    return rep;
}

}  // namespace zspace
