#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "norms.hpp"

namespace zspace {

// SplitMix64 (Steele, Lea, Flood): golden-gamma increment and the two Stafford mix constants.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

enum class CorpusKind { gaussian, modulated_gaussian, bump, multi_bump, lp_random_band, whitney_indicator, power_tail };

inline CorpusKind parse_kind(const std::string& s) {
    static const std::map<std::string, CorpusKind> kinds{{"gaussian", CorpusKind::gaussian},
                                                         {"modulated_gaussian", CorpusKind::modulated_gaussian},
                                                         {"bump", CorpusKind::bump},
                                                         {"multi_bump", CorpusKind::multi_bump},
                                                         {"lp_random_band", CorpusKind::lp_random_band},
                                                         {"whitney_indicator", CorpusKind::whitney_indicator},
                                                         {"power_tail", CorpusKind::power_tail}};
    auto it = kinds.find(s);
    if (it == kinds.end()) throw FormatError("unknown corpus kind '" + s + "'");
    return it->second;
}

struct CorpusEntry {
    std::string id;
    CorpusKind kind = CorpusKind::gaussian;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;
    std::string extension = "heat";  // heat | gmN

    double param(const std::string& key) const {
        auto it = params.find(key);
        if (it == params.end()) throw ValidationError("corpus entry " + id + " lacks parameter " + key);
        return it->second;
    }
    double param(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    bool has_boundary() const { return kind != CorpusKind::whitney_indicator; }
};

struct Manifest {
    std::string version;
    std::vector<CorpusEntry> entries;

    const CorpusEntry& find(const std::string& id) const {
        for (const auto& e : entries)
            if (e.id == id) return e;
        throw ValidationError("no corpus entry '" + id + "'");
    }
};

// Lines: "version V", "id kind seed key=value ...", '#' comments.
inline Manifest parse_manifest(std::istream& in) {
    Manifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        auto where = [&] { return "manifest line " + std::to_string(lineno) + ": "; };
        if (first == "version") {
            if (!(ls >> m.version)) throw FormatError(where() + "missing version");
            continue;
        }
        CorpusEntry e;
        e.id = first;
        std::string kind, seed;
        if (!(ls >> kind >> seed)) throw FormatError(where() + "expected id kind seed");
        e.kind = parse_kind(kind);
        try {
            e.seed = std::stoull(seed);
        } catch (const std::exception&) {
            throw FormatError(where() + "bad seed '" + seed + "'");
        }
        std::string kv;
        while (ls >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw FormatError(where() + "expected key=value, got '" + kv + "'");
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "ext") {
                e.extension = val;
                continue;
            }
            try {
                std::size_t used = 0;
                e.params[key] = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument(val);
            } catch (const std::exception&) {
                throw FormatError(where() + "bad value for " + key);
            }
        }
        for (const auto& other : m.entries)
            if (other.id == e.id) throw FormatError(where() + "duplicate id " + e.id);
        m.entries.push_back(std::move(e));
    }
    if (m.version.empty()) throw FormatError("manifest has no version line");
    return m;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open manifest " + path);
    return parse_manifest(in);
}

namespace detail {

inline double wrap_displacement(double x, double L) { return x - L * std::round(x / L); }

inline double distance_to(const TorusGrid& g, std::size_t i, double c0, double c1) {
    auto idx = unflatten(g, i);
    double y0 = wrap_displacement(idx[0] * g.h() - c0, g.L);
    double y1 = g.d == 2 ? wrap_displacement(idx[1] * g.h() - c1, g.L) : 0.0;
    return std::hypot(y0, y1);
}

inline void subtract_mean(std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    double mean = s.value() / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

inline std::vector<double> random_band(const CorpusEntry& e, const TorusGrid& g) {
    double k = e.param("k");
    double lo = std::exp2(k - 0.25), hi = std::exp2(k + 0.25);
    double nyquist = std::numbers::pi * static_cast<double>(g.n_x) / g.L;
    if (hi >= nyquist) throw ValidationError("band outside grid Nyquist");
    const double k0 = 2.0 * std::numbers::pi / g.L;
    const long n = static_cast<long>(g.n_x);
    struct Mode {
        long m0, m1;
    };
    std::vector<Mode> modes;
    // One representative per conjugate pair: m1 > 0, or m1 == 0 with m0 > 0.
    long lim = n / 2 - 1;
    long m1max = g.d == 2 ? lim : 0;
    for (long m0 = -lim; m0 <= lim; ++m0)
        for (long m1 = 0; m1 <= m1max; ++m1) {
            if (m1 == 0 && m0 <= 0) continue;
            double xi = k0 * std::hypot(static_cast<double>(m0), static_cast<double>(m1));
            if (xi >= lo && xi <= hi) modes.push_back({m0, m1});
        }
    if (modes.empty()) throw ValidationError("frequency band of " + e.id + " contains no grid modes");
    SplitMix64 rng(e.seed);
    std::vector<double> phase;
    for (std::size_t q = 0; q < modes.size(); ++q) phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    double amp = 1.0 / std::sqrt(static_cast<double>(modes.size()));
    std::vector<double> out(g.spatial_size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = unflatten(g, i);
        CompensatedSum s;
        for (std::size_t q = 0; q < modes.size(); ++q) {
            // Integer phase reduction keeps the argument exact before scaling.
            long turns = (modes[q].m0 * idx[0] + modes[q].m1 * idx[1]) % n;
            s.add(amp * std::cos(2.0 * std::numbers::pi * static_cast<double>(turns) / static_cast<double>(n) + phase[q]));
        }
        out[i] = s.value();
    }
    return out;
}

}  // namespace detail

inline BoundaryFunction generate_boundary(const CorpusEntry& e, const TorusGrid& g) {
    if (!e.has_boundary()) throw ValidationError("corpus entry " + e.id + " has no boundary realization");
    BoundaryFunction f = zero_boundary(g);
    const double c0 = e.param("c", g.L / 2), c1 = e.param("c2", c0);
    switch (e.kind) {
        case CorpusKind::gaussian: {
            double w = e.param("w");
            for (std::size_t i = 0; i < f.samples.size(); ++i) {
                double r = detail::distance_to(g, i, c0, c1);
                f.samples[i] = std::exp(-r * r / (2 * w * w));
            }
            break;
        }
        case CorpusKind::modulated_gaussian: {
            double w = e.param("w"), om = e.param("omega");
            for (std::size_t i = 0; i < f.samples.size(); ++i) {
                double r = detail::distance_to(g, i, c0, c1);
                double y0 = detail::wrap_displacement(unflatten(g, i)[0] * g.h() - c0, g.L);
                f.samples[i] = std::exp(-r * r / (2 * w * w)) * std::cos(om * y0);
            }
            break;
        }
        case CorpusKind::bump: {
            double w = e.param("w");
            for (std::size_t i = 0; i < f.samples.size(); ++i) {
                double rho = detail::distance_to(g, i, c0, c1) / w;
                f.samples[i] = rho < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rho * rho)) : 0.0;
            }
            break;
        }
        case CorpusKind::multi_bump: {
            int count = static_cast<int>(e.param("n"));
            if (count < 1) throw ValidationError("multi_bump needs n >= 1");
            SplitMix64 rng(e.seed);
            for (int b = 0; b < count; ++b) {
                double b0 = rng.uniform(g.L / 4, 3 * g.L / 4);
                double b1 = rng.uniform(g.L / 4, 3 * g.L / 4);
                double w = rng.uniform(e.param("wmin", 1.5), e.param("wmax", 4.0));
                double amp = rng.uniform(0.5, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
                for (std::size_t i = 0; i < f.samples.size(); ++i) {
                    double r = detail::distance_to(g, i, b0, g.d == 2 ? b1 : 0.0);
                    f.samples[i] += amp * std::exp(-r * r / (2 * w * w));
                }
            }
            break;
        }
        case CorpusKind::lp_random_band: f.samples = detail::random_band(e, g); break;
        case CorpusKind::power_tail: {
            double w = e.param("w"), a = e.param("alpha");
            for (std::size_t i = 0; i < f.samples.size(); ++i) {
                double r = detail::distance_to(g, i, c0, c1) / w;
                f.samples[i] = std::pow(1.0 + r * r, -a);
            }
            break;
        }
        case CorpusKind::whitney_indicator: break;
    }
    // Homogeneous spaces see data modulo constants; the zero mode is removed.
    detail::subtract_mean(f.samples);
    return f;
}

inline KernelSpec extension_kernel(const CorpusEntry& e) {
    if (e.extension == "heat") return KernelSpec::heat();
    if (e.extension.size() > 2 && e.extension.rfind("gm", 0) == 0) return KernelSpec::gauss_moment(std::stoi(e.extension.substr(2)));
    throw ValidationError("unknown extension '" + e.extension + "' for " + e.id);
}

inline HalfSpaceField generate_halfspace(const CorpusEntry& e, const TorusGrid& g) {
    if (e.kind != CorpusKind::whitney_indicator) return kernel_extension(generate_boundary(e, g), extension_kernel(e));
    // 1 on Qbar = [2^{k-1}, 2^k) x (2^k idx + [0, 2^k)^d).
    int k = static_cast<int>(e.param("k"));
    long i0 = static_cast<long>(e.param("i")), i1 = static_cast<long>(e.param("i2", 0));
    double side = std::ldexp(1.0, k);
    HalfSpaceField F = zero_field(g);
    bool any = false;
    for (int j = 0; j <= g.J; ++j) {
        double t = g.t(j);
        if (!(t >= side / 2 * (1 - 1e-12) && t < side * (1 - 1e-12))) continue;
        for (std::size_t i = 0; i < g.spatial_size(); ++i) {
            auto idx = unflatten(g, i);
            auto inside = [&](long node, long cube) {
                double x = node * g.h() / side - static_cast<double>(cube);
                return x >= -1e-12 && x < 1 - 1e-12;
            };
            if (inside(idx[0], i0) && (g.d == 1 || inside(idx[1], i1))) {
                F.values[static_cast<std::size_t>(j) * g.spatial_size() + i] = 1.0;
                any = true;
            }
        }
    }
    if (!any) throw ValidationError("whitney_indicator " + e.id + " does not meet the grid");
    return F;
}

inline NamedField generate_named(const CorpusEntry& e, const TorusGrid& g) {
    NamedField nf{e.id, generate_halfspace(e, g), std::nullopt};
    if (e.has_boundary()) nf.boundary = generate_boundary(e, g);
    return nf;
}

}  // namespace zspace
