#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "dyadic.hpp"
#include "interp.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "report.hpp"

namespace zspace {

struct Metric {
    enum class Rel { Less, LessEq, GreaterEq };
    std::string name;
    double value = 0.0;
    Rel rel = Rel::Less;
    double limit = 0.0;

    bool ok() const {
        switch (rel) {
            case Rel::Less: return value < limit;
            case Rel::LessEq: return value <= limit;
            case Rel::GreaterEq: return value >= limit;
        }
        return false;
    }
    std::string relation() const { return rel == Rel::Less ? "<" : rel == Rel::LessEq ? "<=" : ">="; }
};

struct SuiteResult {
    std::string name;
    std::vector<EquivalenceReport> reports;
    std::vector<Metric> metrics;
    double seconds = 0.0;

    bool passed() const {
        if (metrics.empty()) return false;
        for (const auto& m : metrics)
            if (!m.ok()) return false;
        return true;
    }
    const Metric& metric(const std::string& n) const {
        for (const auto& m : metrics)
            if (m.name == n) return m;
        throw ValidationError("unknown metric " + n);
    }
};

struct VerifyContext {
    TorusGrid grid;
    std::string manifest_version;
    std::vector<NamedField> fields;
    std::vector<NamedField> boundary_fields;  // heat-extended boundary entries, manifest order
    LPFamily family;
    int jobs = 1;
};

inline constexpr std::size_t kBoundarySetSize = 10;

// Envelopes; see README for how each was pinned.
namespace limits {
inline constexpr double kOracleRel = 1e-10;
inline constexpr double kOracleSpeedup = 10.0;
inline constexpr double kWhitneyC = 50.0;
inline constexpr double kChangeAngleC = 20.0;
inline constexpr double kChangeAngleIdentity = 1e-6;
inline constexpr double kDyadicWidth = 100.0;
inline constexpr double kSequenceWidth = 50.0;
inline constexpr double kExact = 1e-10;
inline constexpr double kHuangWidth = 50.0;
inline constexpr double kVvWidth = 10.0;
inline constexpr double kDualityBanachC = 8.0;
inline constexpr double kDualityQuasiC = 400.0;
inline constexpr double kLocalizationSpread = 1e3;
inline constexpr double kNestingC = 50.0;
inline constexpr double kEmbeddingC = 50.0;
inline constexpr double kInterpWidth = 100.0;
inline constexpr double kKShape = 1e-10;
inline constexpr double kConvexSlack = -1e-10;
inline constexpr double kConvexIdentity = 1e-12;
inline constexpr double kLogConvexC = 20.0;
inline constexpr double kGwWidth = 100.0;
inline constexpr double kGwDrift = 0.2;
inline constexpr double kGolden = 1e-8;
}  // namespace limits

inline VerifyContext make_context(const Manifest& m, const TorusGrid& g, int jobs = 1) {
    VerifyContext ctx;
    ctx.grid = g;
    ctx.manifest_version = m.version;
    ctx.family = default_lp_family(g);
    ctx.jobs = jobs;
    ctx.fields = parallel_map<NamedField>(m.entries.size(), jobs, [&](std::size_t i) { return generate_named(m.entries[i], g); });
    for (std::size_t i = 0; i < m.entries.size() && ctx.boundary_fields.size() < kBoundarySetSize; ++i)
        if (ctx.fields[i].boundary && m.entries[i].extension == "heat") ctx.boundary_fields.push_back(ctx.fields[i]);
    return ctx;
}

inline std::vector<SpaceSpec> equivalence_sweep() {
    std::vector<SpaceSpec> out;
    for (double p : {1.0, 2.0, kInf})
        for (double q : {1.0, 2.0, kInf})
            for (double r : {1.0, 2.0})
                for (double beta : {-1.0, 0.0, 1.0}) out.push_back({p, q, r, beta});
    return out;
}

namespace detail {

inline EquivalenceReport new_report(const VerifyContext& ctx, std::string check, std::string params) {
    EquivalenceReport rep;
    rep.check = std::move(check);
    rep.params = std::move(params);
    rep.manifest_version = ctx.manifest_version;
    return rep;
}

template <class Fn>
EquivalenceReport corpus_report(const VerifyContext& ctx, const std::vector<NamedField>& fields, std::string check,
                                std::string params, Fn&& fn) {
    auto vals = parallel_map<std::pair<double, double>>(fields.size(), ctx.jobs, [&](std::size_t i) { return fn(fields[i]); });
    EquivalenceReport rep = new_report(ctx, std::move(check), std::move(params));
    for (std::size_t i = 0; i < fields.size(); ++i) rep.add(fields[i].id, vals[i].first, vals[i].second);
    return rep;
}

inline double max_relative_gap(const EquivalenceReport& rep) {
    double m = 0.0;
    for (const auto& row : rep.rows) m = std::max(m, relative_difference(row.lhs, row.rhs));
    return m;
}

inline double global_width(const std::vector<EquivalenceReport>& reps) {
    double lo = kInf, hi = 0.0;
    for (const auto& r : reps)
        if (!r.rows.empty()) {
            lo = std::min(lo, r.min_ratio());
            hi = std::max(hi, r.max_ratio());
        }
    return hi == 0.0 ? 1.0 : hi / lo;
}

inline double max_width(const std::vector<EquivalenceReport>& reps) {
    double w = 1.0;
    for (const auto& r : reps) w = std::max(w, r.width());
    return w;
}

template <class Fn>
SuiteResult timed_suite(std::string name, Fn&& body) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult res;
    res.name = std::move(name);
    body(res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline IndexRange common_rows(const TorusGrid& g, const std::vector<WhitneyParams>& ws) {
    IndexRange rr = all_rows(g);
    for (const auto& w : ws) rr = rr.intersect(whitney_window(g, w).rows);
    if (rr.empty()) throw ValidationError("empty retained t-set");
    return rr;
}

}  // namespace detail

// Fast versus direct box average over the corpus at six (r, beta) settings.
struct OracleResult {
    double max_rel = 0.0;
    std::size_t evaluations = 0;
};

inline const std::vector<std::pair<double, double>>& oracle_settings() {
    static const std::vector<std::pair<double, double>> s{{1.0, -1.0}, {1.0, 0.5}, {2.0, -0.5}, {2.0, 1.0}, {kInf, -1.0}, {kInf, 0.0}};
    return s;
}

inline OracleResult oracle_check(const VerifyContext& ctx) {
    const auto& settings = oracle_settings();
    std::size_t n = ctx.fields.size() * settings.size();
    auto errs = parallel_map<double>(n, ctx.jobs, [&](std::size_t k) {
        const auto& F = ctx.fields[k / settings.size()].F;
        auto [r, beta] = settings[k % settings.size()];
        AvgField a = box_average(F, r, beta), b = box_average_fast(F, r, beta);
        double m = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, relative_difference(a.values[i], b.values[i]));
        return m;
    });
    OracleResult out;
    out.evaluations = n;
    for (double e : errs) out.max_rel = std::max(out.max_rel, e);
    return out;
}

struct BenchRow {
    std::size_t n_x = 0;
    double naive_seconds = 0.0;
    double fast_seconds = 0.0;
    double max_rel = 0.0;
    double speedup() const { return fast_seconds > 0 ? naive_seconds / fast_seconds : kInf; }
};

// Times both box averages on the heat extension of `entry` at r = 2, beta = -1/2.
inline BenchRow bench_box_average(const CorpusEntry& entry, std::size_t n_x, int reps = 1) {
    TorusGrid g = make_grid(1, 64.0, n_x, 0.0625, 8.0, 8);
    HalfSpaceField F = generate_halfspace(entry, g);
    BenchRow row;
    row.n_x = n_x;
    using clock = std::chrono::steady_clock;
    AvgField a, b;
    double naive = kInf, fast = kInf;
    for (int k = 0; k < std::max(1, reps); ++k) {
        auto t0 = clock::now();
        a = box_average(F, 2.0, -0.5);
        auto t1 = clock::now();
        b = box_average_fast(F, 2.0, -0.5);
        auto t2 = clock::now();
        naive = std::min(naive, std::chrono::duration<double>(t1 - t0).count());
        fast = std::min(fast, std::chrono::duration<double>(t2 - t1).count());
    }
    row.naive_seconds = naive;
    row.fast_seconds = fast;
    for (std::size_t i = 0; i < a.values.size(); ++i) row.max_rel = std::max(row.max_rel, relative_difference(a.values[i], b.values[i]));
    return row;
}

inline SuiteResult suite_whitney_invariance(const VerifyContext& ctx) {
    return detail::timed_suite("whitney-invariance", [&](SuiteResult& res) {
        const std::vector<WhitneyParams> W{{0.5, 1.0, 1.0}, {0.25, 2.0, 2.0}, {0.5, 2.0, 0.5}};
        const IndexRange rows = detail::common_rows(ctx.grid, W);
        const std::array<ExtendedExponent, 3> pq{1.0, 2.0, kInf};
        const std::array<std::pair<int, int>, 3> pairs{{{1, 0}, {2, 0}, {2, 1}}};
        double cmax = 0.0;
        for (double r : {1.0, 2.0})
            for (double beta : {-1.0, 0.0, 1.0}) {
                // z[f][(ip * 3 + iq) * 3 + w]
                auto z = parallel_map<std::vector<double>>(ctx.fields.size(), ctx.jobs, [&](std::size_t f) {
                    std::vector<double> out(27);
                    for (std::size_t w = 0; w < 3; ++w) {
                        AvgField A = box_average_fast(ctx.fields[f].F, r, beta, W[w]);
                        for (std::size_t ip = 0; ip < 3; ++ip)
                            for (std::size_t iq = 0; iq < 3; ++iq) out[(ip * 3 + iq) * 3 + w] = reduce_z(A, pq[ip], pq[iq], rows);
                    }
                    return out;
                });
                for (std::size_t ip = 0; ip < 3; ++ip)
                    for (std::size_t iq = 0; iq < 3; ++iq) {
                        SpaceSpec spec{pq[ip], pq[iq], r, beta};
                        double c = 1.0;
                        for (auto [a, b] : pairs) {
                            auto rep = detail::new_report(ctx, "whitney-invariance",
                                                          format_spec(spec) + "|" + format_whitney(W[a]) + "/" + format_whitney(W[b]));
                            for (std::size_t f = 0; f < ctx.fields.size(); ++f)
                                rep.add(ctx.fields[f].id, z[f][(ip * 3 + iq) * 3 + a], z[f][(ip * 3 + iq) * 3 + b]);
                            c = std::max(c, rep.symmetric_bound());
                            res.reports.push_back(std::move(rep));
                        }
                        cmax = std::max(cmax, c);
                    }
            }
        res.metrics.push_back({"max_C", cmax, Metric::Rel::Less, limits::kWhitneyC});
    });
}

inline SuiteResult suite_change_angle(const VerifyContext& ctx) {
    return detail::timed_suite("change-angle", [&](SuiteResult& res) {
        const int d = ctx.grid.d;
        double cmax = 0.0, identity = 0.0;
        double monotone = 0.0;
        for (double p : {1.0, 2.0, kInf})
            for (double r : {1.0, 2.0, kInf}) {
                SpaceSpec spec{p, 2.0, r, 0.0};
                auto vals = parallel_map<std::array<double, 3>>(ctx.fields.size(), ctx.jobs, [&](std::size_t f) {
                    const auto& F = ctx.fields[f].F;
                    return std::array<double, 3>{change_angle_ratio(F, spec, 1.0), change_angle_ratio(F, spec, 2.0),
                                                 change_angle_ratio(F, spec, 4.0)};
                });
                double m = std::min(p, r);
                double c = 0.0;
                for (int li : {1, 2}) {
                    double lambda = li == 1 ? 2.0 : 4.0;
                    double bound = std::pow(lambda, d / m);
                    auto rep = detail::new_report(ctx, "change-angle", format_spec(spec) + "|lambda=" + format_real(lambda));
                    for (std::size_t f = 0; f < ctx.fields.size(); ++f) rep.add(ctx.fields[f].id, vals[f][static_cast<std::size_t>(li)], bound);
                    c = std::max(c, rep.max_ratio());
                    res.reports.push_back(std::move(rep));
                }
                for (const auto& v : vals) {
                    identity = std::max(identity, std::abs(v[0] - 1.0));
                    if (v[1] < v[0] * (1 - 1e-12) || v[2] < v[1] * (1 - 1e-12)) monotone += 1;
                }
                res.metrics.push_back({"C[p=" + format_real(p) + ",r=" + format_real(r) + "]", c, Metric::Rel::Less, limits::kChangeAngleC});
                cmax = std::max(cmax, c);
            }
        res.metrics.push_back({"max_C", cmax, Metric::Rel::Less, limits::kChangeAngleC});
        res.metrics.push_back({"lambda1_deviation", identity, Metric::Rel::Less, limits::kChangeAngleIdentity});
        res.metrics.push_back({"monotone_violations", monotone, Metric::Rel::LessEq, 0.0});
    });
}

inline SuiteResult suite_dyadic(const VerifyContext& ctx) {
    return detail::timed_suite("dyadic", [&](SuiteResult& res) {
        const auto specs = equivalence_sweep();
        const std::size_t nf = ctx.fields.size(), ns = specs.size();
        // Per field: z, dyadic and sequence norm for every spec.
        auto vals = parallel_map<std::vector<std::array<double, 3>>>(nf, ctx.jobs, [&](std::size_t f) {
            const auto& F = ctx.fields[f].F;
            std::vector<std::array<double, 3>> out(ns);
            for (std::size_t s = 0; s < ns; ++s) {
                const auto& sp = specs[s];
                out[s] = {z_norm(F, sp), dyadic_norm(F, sp), sequence_norm(to_sequence(F, sp), sp.p, sp.q, sp.beta)};
            }
            return out;
        });
        std::vector<EquivalenceReport> dy, seq;
        double seq_vs_dyadic = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            auto a = detail::new_report(ctx, "dyadic", format_spec(specs[s]));
            auto b = detail::new_report(ctx, "sequence", format_spec(specs[s]));
            for (std::size_t f = 0; f < nf; ++f) {
                a.add(ctx.fields[f].id, vals[f][s][1], vals[f][s][0]);
                b.add(ctx.fields[f].id, vals[f][s][2], vals[f][s][0]);
                seq_vs_dyadic = std::max(seq_vs_dyadic, relative_difference(vals[f][s][2], vals[f][s][1]));
            }
            dy.push_back(std::move(a));
            seq.push_back(std::move(b));
        }
        // Round trips must be bit-exact on the retained generations.
        auto gens = retained_generations(ctx.grid);
        auto mismatches = parallel_map<double>(nf, ctx.jobs, [&](std::size_t f) {
            const auto& F = ctx.fields[f].F;
            double bad = 0.0;
            SpaceSpec sp{2.0, 2.0, 2.0, 0.0};
            SequenceField S = to_sequence(F, sp);
            HalfSpaceField back = from_sequence(S);
            const std::size_t N = ctx.grid.spatial_size();
            for (const auto& G : gens)
                for (int jj = 0; jj < ctx.grid.s_oct; ++jj) {
                    std::size_t off = static_cast<std::size_t>(G.j_first + jj) * N;
                    for (std::size_t i = 0; i < N; ++i)
                        if (back.values[off + i] != F.values[off + i]) bad += 1;
                }
            SequenceField S2 = to_sequence(back, sp);
            for (std::size_t gi = 0; gi < S.generations.size(); ++gi)
                if (S.generations[gi].samples != S2.generations[gi].samples) bad += 1;
            return bad;
        });
        double bad = 0.0;
        for (double m : mismatches) bad += m;
        // Neighbour counts against the dimensional bound.
        double excess = 0.0;
        for (int d : {1, 2})
            for (int k : {-2, 0, 3})
                for (long i0 : {-3L, 0L, 5L})
                    for (long i1 : {-1L, 0L, 2L}) {
                        auto nb = neighbors_G({k, {i0, d == 2 ? i1 : 0}}, d);
                        excess = std::max(excess, static_cast<double>(nb.size()) - static_cast<double>(neighbors_bound(d)));
                    }
        res.metrics.push_back({"dyadic_width", detail::global_width(dy), Metric::Rel::Less, limits::kDyadicWidth});
        res.metrics.push_back({"sequence_width_per_spec", detail::max_width(seq), Metric::Rel::Less, limits::kSequenceWidth});
        res.metrics.push_back({"sequence_vs_dyadic_rel", seq_vs_dyadic, Metric::Rel::Less, limits::kExact});
        res.metrics.push_back({"roundtrip_mismatches", bad, Metric::Rel::LessEq, 0.0});
        res.metrics.push_back({"neighbor_excess", std::max(excess, 0.0), Metric::Rel::LessEq, 0.0});
        for (auto& r : dy) res.reports.push_back(std::move(r));
        for (auto& r : seq) res.reports.push_back(std::move(r));
    });
}

inline SuiteResult suite_coincidence(const VerifyContext& ctx) {
    return detail::timed_suite("coincidence", [&](SuiteResult& res) {
        double amenta = 0.0, tent = 0.0;
        for (double p : {1.0, 2.0})
            for (double r : {1.0, 2.0})
                for (double beta : {-0.5, 0.5}) {
                    SpaceSpec sp{p, p, r, beta};
                    auto rep = detail::corpus_report(ctx, ctx.fields, "coincidence-amenta", format_spec(sp), [&](const NamedField& nf) {
                        return std::pair{z_norm(nf.F, sp), z_amenta_norm(nf.F, p, r, beta)};
                    });
                    amenta = std::max(amenta, detail::max_relative_gap(rep));
                    res.reports.push_back(std::move(rep));
                }
        for (double p : {1.0, 2.0, 3.0})
            for (double beta : {-0.5, 0.0, 0.5}) {
                SpaceSpec sp{p, p, p, beta};
                auto rep = detail::corpus_report(ctx, ctx.fields, "coincidence-tent", format_spec(sp), [&](const NamedField& nf) {
                    return std::pair{t_norm(nf.F, sp), z_norm(nf.F, sp)};
                });
                tent = std::max(tent, detail::max_relative_gap(rep));
                res.reports.push_back(std::move(rep));
            }
        const IndexRange rows = detail::common_rows(ctx.grid, {WhitneyParams{}, kHuangInnerBox});
        std::vector<EquivalenceReport> huang;
        for (double p : {1.0, 2.0})
            for (double q : {1.0, 2.0, kInf})
                for (double r : {1.0, 2.0})
                    for (double beta : {-0.5, 0.5}) {
                        SpaceSpec sp{p, q, r, beta};
                        huang.push_back(detail::corpus_report(ctx, ctx.fields, "huang", format_spec(sp), [&](const NamedField& nf) {
                            return std::pair{huang_norm(nf.F, sp, rows), t_norm(nf.F, sp, {}, rows)};
                        }));
                    }
        const IndexRange trows = whitney_window(ctx.grid, {}).rows;
        for (double p : {1.0, 2.0})
            for (double q : {1.0, 2.0}) {
                SpaceSpec sp{p, q, q, 0.0};
                res.reports.push_back(detail::corpus_report(ctx, ctx.fields, "classical-tent", format_spec(sp), [&](const NamedField& nf) {
                    return std::pair{t_norm(nf.F, sp), classical_tent_norm(nf.F, p, q, 0.0, trows)};
                }));
            }
        res.metrics.push_back({"amenta_rel", amenta, Metric::Rel::Less, limits::kExact});
        res.metrics.push_back({"tent_pqr_rel", tent, Metric::Rel::Less, limits::kExact});
        res.metrics.push_back({"huang_width_per_spec", detail::max_width(huang), Metric::Rel::Less, limits::kHuangWidth});
        for (auto& r : huang) res.reports.push_back(std::move(r));
    });
}

inline SuiteResult suite_vv(const VerifyContext& ctx) {
    return detail::timed_suite("vv", [&](SuiteResult& res) {
        for (const auto& sp : equivalence_sweep())
            res.reports.push_back(detail::corpus_report(ctx, ctx.fields, "vv", format_spec(sp), [&](const NamedField& nf) {
                return std::pair{vv_norm(nf.F, sp), z_norm(nf.F, sp)};
            }));
        res.metrics.push_back({"width_per_spec", detail::max_width(res.reports), Metric::Rel::Less, limits::kVvWidth});
    });
}

inline SuiteResult suite_duality(const VerifyContext& ctx) {
    return detail::timed_suite("duality", [&](SuiteResult& res) {
        const std::size_t n = ctx.fields.size();
        std::vector<HalfSpaceField> absf;
        for (const auto& nf : ctx.fields) absf.push_back(absolute(nf.F));
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) pairs.push_back({a, b});
        auto pv = parallel_map<double>(pairs.size(), ctx.jobs, [&](std::size_t k) { return pairing(absf[pairs[k].first], absf[pairs[k].second]); });
        auto run = [&](const std::string& label, const SpaceSpec& sp, double limit) {
            SpaceSpec ds = dual_spec(sp, ctx.grid.d);
            auto norms = parallel_map<std::array<double, 2>>(n, ctx.jobs, [&](std::size_t f) {
                return std::array<double, 2>{z_norm(ctx.fields[f].F, sp), z_norm(ctx.fields[f].F, ds)};
            });
            auto rep = detail::new_report(ctx, "duality-" + label, format_spec(sp) + "|dual=" + format_spec(ds));
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                auto [a, b] = pairs[k];
                rep.add(ctx.fields[a].id + "|" + ctx.fields[b].id, pv[k], norms[a][0] * norms[b][1]);
                rep.add(ctx.fields[b].id + "|" + ctx.fields[a].id, pv[k], norms[b][0] * norms[a][1]);
            }
            res.metrics.push_back({"C_" + label, rep.max_ratio(), Metric::Rel::LessEq, limit});
            res.reports.push_back(std::move(rep));
        };
        run("banach", {2.0, 3.0, 2.0, 0.3}, limits::kDualityBanachC);
        run("quasi", {0.5, 1.0, 2.0, 0.3}, limits::kDualityQuasiC);
    });
}

inline SuiteResult suite_localization(const VerifyContext& ctx) {
    return detail::timed_suite("localization", [&](SuiteResult& res) {
        std::vector<NamedField> first(ctx.fields.begin(), ctx.fields.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, ctx.fields.size())));
        double spread = 1.0;
        // p = q = r = 2 gives a constant ratio; the other two exercise the mixed norms.
        for (const SpaceSpec& sp : {SpaceSpec{2.0, 2.0, 2.0, 0.0}, SpaceSpec{1.0, 3.0, 1.0, 0.5}, SpaceSpec{kInf, 1.0, 2.0, -0.5}}) {
            auto rep = localization_check(first, sp, LocalizationBox{});
            rep.manifest_version = ctx.manifest_version;
            spread = std::max(spread, rep.width());
            res.reports.push_back(std::move(rep));
        }
        res.metrics.push_back({"spread", spread, Metric::Rel::Less, limits::kLocalizationSpread});
    });
}

inline SuiteResult suite_nesting(const VerifyContext& ctx) {
    return detail::timed_suite("nesting", [&](SuiteResult& res) {
        double c = 0.0;
        for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 2}, {2, 1}, {2, 4}}) {
            auto parts = parallel_map<NestingReport>(ctx.fields.size(), ctx.jobs, [&](std::size_t f) {
                return nesting_check({ctx.fields[f]}, p, q, 2.0, 0.0);
            });
            NestingReport all;
            all.lower = detail::new_report(ctx, "nesting-lower", parts.front().lower.params);
            all.upper = detail::new_report(ctx, "nesting-upper", parts.front().upper.params);
            for (const auto& nr : parts) {
                for (const auto& row : nr.lower.rows) all.lower.add(row.field_id, row.lhs, row.rhs);
                for (const auto& row : nr.upper.rows) all.upper.add(row.field_id, row.lhs, row.rhs);
            }
            c = std::max({c, all.lower.max_ratio(), all.upper.max_ratio()});
            res.reports.push_back(std::move(all.lower));
            res.reports.push_back(std::move(all.upper));
        }
        SpaceSpec eq{2.0, 2.0, 2.0, 0.0};
        auto same = detail::corpus_report(ctx, ctx.fields, "nesting-p=q", format_spec(eq), [&](const NamedField& nf) {
            return std::pair{t_norm(nf.F, eq), z_norm(nf.F, eq)};
        });
        res.metrics.push_back({"max_C", c, Metric::Rel::Less, limits::kNestingC});
        res.metrics.push_back({"p=q_rel", detail::max_relative_gap(same), Metric::Rel::Less, limits::kExact});
        res.reports.push_back(std::move(same));
    });
}

// Hoelder factor of the largest dyadic box: max_k (sum over one box of the quadrature weights).
inline double dyadic_box_measure(const TorusGrid& g) {
    double mu = 0.0;
    for (const auto& G : retained_generations(g)) {
        CompensatedSum s;
        for (int jj = 0; jj < g.s_oct; ++jj)
            s.add(g.log_weight() * g.cell_volume() * std::pow(g.t(G.j_first + jj), -g.d) * static_cast<double>(G.local_nodes(g.d)));
        mu = std::max(mu, s.value());
    }
    return mu;
}

inline const std::vector<std::pair<SpaceSpec, SpaceSpec>>& embedding_quadruples() {
    static const std::vector<std::pair<SpaceSpec, SpaceSpec>> q{
        {{1.0, 1.0, 2.0, 0.0}, {2.0, 2.0, 1.0, -0.5}},
        {{2.0, 2.0, 2.0, 0.0}, {2.0, 3.0, 2.0, 0.0}},
        {{1.0, 2.0, 2.0, 0.5}, {kInf, 2.0, 2.0, -0.5}},
        {{2.0, 1.0, kInf, 0.0}, {4.0, 2.0, 1.0, -0.25}},
    };
    return q;
}

inline SuiteResult suite_embedding(const VerifyContext& ctx) {
    return detail::timed_suite("embedding", [&](SuiteResult& res) {
        const double mu = dyadic_box_measure(ctx.grid);
        double dyadic_violations = 0.0;
        int n = 0;
        for (const auto& [s0, s1] : embedding_quadruples()) {
            if (!embedding_admissible(s0, s1, ctx.grid.d)) throw ValidationError("embedding parameter relation violated");
            auto rep = detail::corpus_report(ctx, ctx.fields, "embedding", format_spec(s0) + "->" + format_spec(s1),
                                             [&](const NamedField& nf) { return std::pair{z_norm(nf.F, s1), z_norm(nf.F, s0)}; });
            double factor = std::pow(mu, s1.r.inverse() - s0.r.inverse());
            auto dy = parallel_map<double>(ctx.fields.size(), ctx.jobs, [&](std::size_t f) {
                double lhs = dyadic_norm(ctx.fields[f].F, s1), rhs = factor * dyadic_norm(ctx.fields[f].F, s0);
                return lhs > rhs * (1 + 1e-12) ? 1.0 : 0.0;
            });
            for (double v : dy) dyadic_violations += v;
            res.metrics.push_back({"C[" + std::to_string(++n) + "]", rep.max_ratio(), Metric::Rel::LessEq, limits::kEmbeddingC});
            res.reports.push_back(std::move(rep));
        }
        // Chained constants compose.
        SpaceSpec a{1.0, 1.0, 2.0, 0.0}, b{2.0, 2.0, 1.0, -0.5}, c{4.0, 4.0, 1.0, -0.75};
        auto ab = detail::corpus_report(ctx, ctx.fields, "embedding", format_spec(a) + "->" + format_spec(b),
                                        [&](const NamedField& nf) { return std::pair{z_norm(nf.F, b), z_norm(nf.F, a)}; });
        auto bc = detail::corpus_report(ctx, ctx.fields, "embedding", format_spec(b) + "->" + format_spec(c),
                                        [&](const NamedField& nf) { return std::pair{z_norm(nf.F, c), z_norm(nf.F, b)}; });
        auto ac = detail::corpus_report(ctx, ctx.fields, "embedding", format_spec(a) + "->" + format_spec(c),
                                        [&](const NamedField& nf) { return std::pair{z_norm(nf.F, c), z_norm(nf.F, a)}; });
        double chain_excess = ac.max_ratio() / (ab.max_ratio() * bc.max_ratio()) - 1.0;
        res.metrics.push_back({"dyadic_violations", dyadic_violations, Metric::Rel::LessEq, 0.0});
        res.metrics.push_back({"chain_excess", chain_excess, Metric::Rel::LessEq, 1e-9});
        res.reports.push_back(std::move(ab));
        res.reports.push_back(std::move(bc));
        res.reports.push_back(std::move(ac));
    });
}

inline SuiteResult interp_suite(const VerifyContext& ctx, EndpointKind kind) {
    const std::string name = kind == EndpointKind::Z ? "real-interp" : "tent-interp";
    return detail::timed_suite(name, [&](SuiteResult& res) {
        const SpaceSpec s0{2.0, 2.0, 2.0, 0.0}, s1{2.0, 2.0, 2.0, -1.0};
        const std::array<double, 3> thetas{0.3, 0.5, 0.7};
        const std::array<ExtendedExponent, 3> qs{1.0, 2.0, kInf};
        struct PerField {
            KShape shape;
            std::array<double, 9> interp{};
            std::array<double, 9> target{};
        };
        auto vals = parallel_map<PerField>(ctx.fields.size(), ctx.jobs, [&](std::size_t f) {
            const auto& F = ctx.fields[f].F;
            PerField out;
            KProfile P = build_k_profile(F, s0, s1, kind);
            out.shape = k_profile_shape(P);
            for (std::size_t a = 0; a < 3; ++a) {
                AvgField A = box_average_fast(F, 2.0, interpolated_beta(s0, s1, thetas[a]));
                for (std::size_t b = 0; b < 3; ++b) {
                    out.interp[a * 3 + b] = real_interp_from_profile(P, thetas[a], qs[b]);
                    out.target[a * 3 + b] = reduce_z(A, 2.0, qs[b], A.rows);
                }
            }
            return out;
        });
        KShape worst;
        for (const auto& v : vals) {
            worst.monotone_violation = std::max(worst.monotone_violation, v.shape.monotone_violation);
            worst.ratio_violation = std::max(worst.ratio_violation, v.shape.ratio_violation);
            worst.bound_violation = std::max(worst.bound_violation, v.shape.bound_violation);
        }
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) {
                auto rep = detail::new_report(ctx, name, format_spec(s0) + "|" + format_spec(s1) + "|theta=" + format_real(thetas[a]) +
                                                             "|q=" + format_exponent(qs[b]));
                for (std::size_t f = 0; f < ctx.fields.size(); ++f) rep.add(ctx.fields[f].id, vals[f].interp[a * 3 + b], vals[f].target[a * 3 + b]);
                res.reports.push_back(std::move(rep));
            }
        res.metrics.push_back({"width_per_theta_q", detail::max_width(res.reports), Metric::Rel::Less, limits::kInterpWidth});
        res.metrics.push_back({"khat_monotone_violation", worst.monotone_violation, Metric::Rel::LessEq, limits::kKShape});
        res.metrics.push_back({"khat_ratio_violation", worst.ratio_violation, Metric::Rel::LessEq, limits::kKShape});
        res.metrics.push_back({"khat_bound_violation", worst.bound_violation, Metric::Rel::LessEq, limits::kKShape});
    });
}

inline SuiteResult suite_real_interp(const VerifyContext& ctx) { return interp_suite(ctx, EndpointKind::Z); }
inline SuiteResult suite_tent_interp(const VerifyContext& ctx) { return interp_suite(ctx, EndpointKind::T); }

inline SuiteResult suite_convexity(const VerifyContext& ctx) {
    return detail::timed_suite("convexity", [&](SuiteResult& res) {
        const std::vector<SpaceSpec> specs{{2.0, 3.0, 2.0, 0.3}, {1.0, 2.0, 4.0, -0.5}, {3.0, 3.0, 3.0, 0.0}};
        // Five distinct fields drawn with a fixed seed.
        std::vector<std::size_t> pick;
        SplitMix64 rng(20240611);
        while (pick.size() < std::min<std::size_t>(5, ctx.fields.size())) {
            std::size_t k = static_cast<std::size_t>(rng.next() % ctx.fields.size());
            if (std::find(pick.begin(), pick.end(), k) == pick.end()) pick.push_back(k);
        }
        struct Tuple {
            std::string label;
            std::vector<std::size_t> members;
            SpaceSpec spec;
            double alpha;
        };
        std::vector<Tuple> tuples;
        for (const auto& sp : specs) {
            double m = std::min({sp.p.value(), sp.q.value(), sp.r.value()});
            for (double alpha : {m / 2, m}) {
                tuples.push_back({"random5", pick, sp, alpha});
                for (std::size_t f = 0; f < std::min<std::size_t>(3, ctx.fields.size()); ++f) tuples.push_back({"single", {f}, sp, alpha});
            }
        }
        std::vector<std::size_t> disjoint;
        for (std::size_t f = 0; f < ctx.fields.size(); ++f)
            if (ctx.fields[f].id == "wi0" || ctx.fields[f].id == "wi1") disjoint.push_back(f);
        if (disjoint.size() == 2)
            for (double a : {2.0, 3.0}) tuples.push_back({"disjoint", disjoint, {a, a, a, 0.0}, a});
        auto reps = parallel_map<ConvexityReport>(tuples.size(), ctx.jobs, [&](std::size_t k) {
            std::vector<HalfSpaceField> fs;
            for (std::size_t f : tuples[k].members) fs.push_back(ctx.fields[f].F);
            return convexity_check(fs, tuples[k].alpha, tuples[k].spec);
        });
        double slack = kInf, identity = 0.0, equality = 0.0, strict = kInf;
        auto rep = detail::new_report(ctx, "convexity", "lhs/rhs");
        for (std::size_t k = 0; k < tuples.size(); ++k) {
            const auto& t = tuples[k];
            const auto& cr = reps[k];
            std::string id = t.label + "|" + format_spec(t.spec) + "|alpha=" + format_real(t.alpha);
            if (t.label == "single") id += "|" + ctx.fields[t.members.front()].id;
            rep.add(id, cr.lhs, cr.rhs);
            slack = std::min(slack, cr.relative_slack);
            identity = std::max(identity, cr.identity_max_rel_err);
            if (t.label != "random5") equality = std::max(equality, std::abs(cr.relative_slack));
            else if (t.alpha < std::min({t.spec.p.value(), t.spec.q.value(), t.spec.r.value()})) strict = std::min(strict, cr.relative_slack);
        }
        res.metrics.push_back({"min_slack", slack, Metric::Rel::GreaterEq, limits::kConvexSlack});
        res.metrics.push_back({"identity_rel", identity, Metric::Rel::LessEq, limits::kConvexIdentity});
        res.metrics.push_back({"equality_cases_rel", equality, Metric::Rel::Less, limits::kExact});
        res.metrics.push_back({"strict_min_slack", strict, Metric::Rel::GreaterEq, 0.0});
        res.reports.push_back(std::move(rep));
    });
}

inline SuiteResult suite_log_convexity(const VerifyContext& ctx) {
    return detail::timed_suite("log-convexity", [&](SuiteResult& res) {
        const SpaceSpec a0{1.0, 1.0, 2.0, 0.0}, a1{3.0, 3.0, 2.0, 1.0}, same{2.0, 2.0, 2.0, 0.0};
        auto make = [&](const SpaceSpec& s0, const SpaceSpec& s1, double theta) {
            SpaceSpec st = interpolate_spec(s0, s1, theta);
            return detail::corpus_report(ctx, ctx.fields, "log-convexity",
                                         format_spec(s0) + "|" + format_spec(s1) + "|theta=" + format_real(theta), [&](const NamedField& nf) {
                                             double z0 = z_norm(nf.F, s0), z1 = z_norm(nf.F, s1);
                                             return std::pair{z_norm(nf.F, st), std::pow(z0, 1 - theta) * std::pow(z1, theta)};
                                         });
        };
        double c_main = 0.0;
        for (double theta : {0.25, 0.5, 0.75}) {
            auto rep = make(a0, a1, theta);
            c_main = std::max(c_main, rep.max_ratio());
            res.reports.push_back(std::move(rep));
        }
        auto deg = make(same, same, 0.5);
        res.metrics.push_back({"C_pair1", c_main, Metric::Rel::Less, limits::kLogConvexC});
        res.metrics.push_back({"C_degenerate", deg.max_ratio(), Metric::Rel::Less, limits::kLogConvexC});
        res.metrics.push_back({"degenerate_spread", deg.width() - 1.0, Metric::Rel::Less, limits::kExact});
        res.reports.push_back(std::move(deg));
    });
}

// max_f max_{r,r'} n_r(f)/n_{r'}(f) - 1 with n_r(f) the ratio normalised by its corpus median at r.
inline double r_drift(const std::vector<EquivalenceReport>& by_r) {
    std::vector<double> med;
    for (const auto& r : by_r) med.push_back(r.median_ratio());
    double drift = 0.0;
    if (by_r.empty()) return drift;
    for (std::size_t f = 0; f < by_r.front().rows.size(); ++f) {
        double lo = kInf, hi = 0.0;
        for (std::size_t k = 0; k < by_r.size(); ++k) {
            if (f >= by_r[k].rows.size()) return kInf;
            double n = by_r[k].rows[f].ratio / med[k];
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        drift = std::max(drift, hi / lo - 1.0);
    }
    return drift;
}

inline SuiteResult suite_gw_char(const VerifyContext& ctx) {
    return detail::timed_suite("gw-char", [&](SuiteResult& res) {
        const auto& B = ctx.boundary_fields;
        auto heat = parallel_map<HalfSpaceField>(B.size(), ctx.jobs, [&](std::size_t f) { return heat_extension(*B[f].boundary); });
        double width = 1.0, drift = 0.0;
        for (double beta : {-0.5, -1.0}) {
            struct Family {
                std::string label;
                double p, q;
                bool tent;
            };
            for (const Family& fam : {Family{"besov", 2, 2, false}, Family{"besov", 2, 3, false}, Family{"triebel", 2, 3, true}}) {
                std::vector<EquivalenceReport> by_r;
                for (double r : {1.0, 2.0, kInf}) {
                    SpaceSpec sp{fam.p, fam.q, r, beta};
                    auto vals = parallel_map<std::pair<double, double>>(B.size(), ctx.jobs, [&](std::size_t f) {
                        const auto& bf = *B[f].boundary;
                        if (fam.tent) return std::pair{t_norm(heat[f], sp), triebel_norm(bf, fam.p, fam.q, beta, ctx.family)};
                        return std::pair{z_norm(heat[f], sp), besov_norm(bf, fam.p, fam.q, beta, ctx.family)};
                    });
                    auto rep = detail::new_report(ctx, "gw-char-" + fam.label, format_spec(sp));
                    for (std::size_t f = 0; f < B.size(); ++f) rep.add(B[f].id, vals[f].first, vals[f].second);
                    width = std::max(width, rep.width());
                    by_r.push_back(rep);
                    res.reports.push_back(std::move(rep));
                }
                drift = std::max(drift, r_drift(by_r));
            }
        }
        res.metrics.push_back({"boundary_fields", static_cast<double>(B.size()), Metric::Rel::GreaterEq, static_cast<double>(kBoundarySetSize)});
        res.metrics.push_back({"width_per_spec", width, Metric::Rel::Less, limits::kGwWidth});
        res.metrics.push_back({"r_drift", drift, Metric::Rel::Less, limits::kGwDrift});
    });
}

struct SuiteEntry {
    std::string name;
    std::function<SuiteResult(const VerifyContext&)> run;
};

inline const std::vector<SuiteEntry>& suite_registry() {
    static const std::vector<SuiteEntry> reg{
        {"whitney-invariance", suite_whitney_invariance},
        {"change-angle", suite_change_angle},
        {"dyadic", suite_dyadic},
        {"coincidence", suite_coincidence},
        {"vv", suite_vv},
        {"duality", suite_duality},
        {"localization", suite_localization},
        {"nesting", suite_nesting},
        {"embedding", suite_embedding},
        {"real-interp", suite_real_interp},
        {"tent-interp", suite_tent_interp},
        {"convexity", suite_convexity},
        {"log-convexity", suite_log_convexity},
        {"gw-char", suite_gw_char},
    };
    return reg;
}

inline SuiteResult run_suite(const std::string& name, const VerifyContext& ctx) {
    for (const auto& e : suite_registry())
        if (e.name == name) return e.run(ctx);
    throw ValidationError("unknown suite " + name);
}

}  // namespace zspace
