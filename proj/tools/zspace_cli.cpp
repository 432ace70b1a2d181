// Command-line front end: norm, verify, bench, generate.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zspace/zspace.hpp"

#ifndef ZSPACE_DEFAULT_MANIFEST
#define ZSPACE_DEFAULT_MANIFEST "corpus/manifest.txt"
#endif

namespace fs = std::filesystem;
using namespace zspace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridFlags {
    int d = 1;
    double L = 64.0;
    std::size_t n_x = 1024;
    double t_min = 0.0625;
    double t_max = 8.0;
    int s_oct = 8;

    void attach(CLI::App* app) {
        app->add_option("--d", d, "spatial dimension (1 or 2)");
        app->add_option("--L", L, "torus side length");
        app->add_option("--nx", n_x, "nodes per axis (power of two)");
        app->add_option("--tmin", t_min, "smallest scale");
        app->add_option("--tmax", t_max, "largest scale");
        app->add_option("--soct", s_oct, "scale nodes per octave");
    }
    TorusGrid grid() const { return make_grid(d, L, n_x, t_min, t_max, s_oct); }
};

int env_jobs() {
    if (const char* v = std::getenv("WHITNEY_JOBS")) {
        try {
            int j = std::stoi(v);
            if (j >= 1) return j;
        } catch (const std::exception&) {
        }
        throw UsageError("WHITNEY_JOBS must be a positive integer");
    }
    return 1;
}

WhitneyParams parse_whitney(const std::string& s) {
    std::vector<double> v;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("--whitney expects a,b,c");
        }
    }
    if (v.size() != 3) throw UsageError("--whitney expects a,b,c");
    WhitneyParams w{v[0], v[1], v[2]};
    validate_whitney(w);
    return w;
}

ExtendedExponent parse_exponent(const std::string& flag, const std::string& s) {
    try {
        return ExtendedExponent::parse(s);
    } catch (const ValidationError& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

std::ofstream open_append_csv(const fs::path& path, const std::string& header) {
    bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    if (fresh) out << header << "\n";
    return out;
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

// norm -----------------------------------------------------------------------

struct NormConfig {
    std::string space = "Z";
    std::string p = "2", q = "2", r = "2";
    double beta = 0.0;
    std::string whitney;
    std::string input;
    std::string corpus_id;
    std::string manifest = ZSPACE_DEFAULT_MANIFEST;
    std::string csv = "norms.csv";
    GridFlags grid;
};

int cmd_norm(const NormConfig& c) {
    SpaceSpec spec{parse_exponent("--p", c.p), parse_exponent("--q", c.q), parse_exponent("--r", c.r), c.beta};
    WhitneyParams w = c.whitney.empty() ? WhitneyParams{} : parse_whitney(c.whitney);
    if ((c.space == "T" || c.space == "huang" || c.space == "triebel") && spec.p.is_infinite())
        throw UsageError(c.space == "triebel" ? "triebel p=inf unsupported" : "tent p=inf unsupported");
    if (c.input.empty() == c.corpus_id.empty()) throw UsageError("give exactly one of --input or --corpus");

    NamedField nf;
    if (!c.input.empty()) {
        nf.id = fs::path(c.input).filename().string();
        nf.F = load_field(c.input);
    } else {
        Manifest m = load_manifest(c.manifest);
        nf = generate_named(m.find(c.corpus_id), c.grid.grid());
    }
    auto boundary = [&]() -> const BoundaryFunction& {
        if (!nf.boundary) throw UsageError("--space " + c.space + " needs a corpus entry with boundary data");
        return *nf.boundary;
    };

    double value = 0.0;
    if (c.space == "Z") value = z_norm(nf.F, spec, w);
    else if (c.space == "T") value = t_norm(nf.F, spec, w);
    else if (c.space == "dyadic") value = dyadic_norm(nf.F, spec);
    else if (c.space == "amenta") value = z_amenta_norm(nf.F, spec.p, spec.r, spec.beta, w);
    else if (c.space == "huang") value = huang_norm(nf.F, spec);
    else if (c.space == "vv") value = vv_norm(nf.F, spec, w);
    else if (c.space == "besov") value = besov_norm(boundary(), spec.p, spec.q, spec.beta, default_lp_family(nf.F.grid));
    else if (c.space == "triebel") value = triebel_norm(boundary(), spec.p, spec.q, spec.beta, default_lp_family(nf.F.grid));
    else throw UsageError("unknown space " + c.space);

    std::cout << format_real(value) << "\n";
    if (!c.csv.empty()) {
        auto out = open_append_csv(c.csv, "space,params,whitney,field_id,value");
        out << c.space << "," << format_spec(spec) << "," << format_whitney(w) << "," << nf.id << "," << format_real(value) << "\n";
    }
    return kExitOk;
}

// verify ---------------------------------------------------------------------

struct VerifyConfig {
    std::string manifest = ZSPACE_DEFAULT_MANIFEST;
    std::vector<std::string> only;
    std::string out = "verify_out";
    int jobs = 0;
    GridFlags grid;
};

nlohmann::json suite_json(const SuiteResult& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["passed"] = s.passed();
    j["seconds"] = s.seconds;
    j["metrics"] = nlohmann::json::array();
    for (const auto& m : s.metrics)
        j["metrics"].push_back({{"name", m.name}, {"value", number(m.value)}, {"relation", m.relation()}, {"limit", number(m.limit)}, {"ok", m.ok()}});
    j["reports"] = nlohmann::json::array();
    for (const auto& r : s.reports)
        j["reports"].push_back({{"check", r.check},
                                {"params", r.params},
                                {"manifest_version", r.manifest_version},
                                {"rows", r.rows.size()},
                                {"degenerate", r.degenerate},
                                {"min_ratio", number(r.min_ratio())},
                                {"median_ratio", number(r.rows.empty() ? 1.0 : r.median_ratio())},
                                {"max_ratio", number(r.max_ratio())}});
    return j;
}

int cmd_verify(const VerifyConfig& c) {
    if (!fs::exists(c.manifest)) throw UsageError("manifest not found: " + c.manifest);
    std::vector<std::string> names;
    for (const auto& e : suite_registry()) names.push_back(e.name);
    if (!c.only.empty()) {
        for (const auto& n : c.only)
            if (std::find(names.begin(), names.end(), n) == names.end()) throw UsageError("unknown suite " + n);
        std::vector<std::string> keep;
        for (const auto& n : names)
            if (std::find(c.only.begin(), c.only.end(), n) != c.only.end()) keep.push_back(n);
        names = keep;
    }
    int jobs = c.jobs > 0 ? c.jobs : env_jobs();
    Manifest m = load_manifest(c.manifest);
    TorusGrid g = c.grid.grid();
    VerifyContext ctx = make_context(m, g, jobs);

    fs::create_directories(c.out);
    std::ofstream csv(fs::path(c.out) / "report.csv");
    if (!csv) throw std::runtime_error("cannot write report.csv in " + c.out);
    write_csv_header(csv);

    nlohmann::json summary;
    summary["manifest"] = c.manifest;
    summary["manifest_version"] = m.version;
    summary["grid"] = {{"d", g.d}, {"L", g.L}, {"n_x", g.n_x}, {"t_min", g.t_min}, {"t_max", g.t_max}, {"s_oct", g.s_oct}, {"J", g.J}};
    summary["jobs"] = jobs;
    summary["suites"] = nlohmann::json::array();

    std::vector<std::string> failed;
    for (const auto& name : names) {
        SuiteResult s = run_suite(name, ctx);
        for (const auto& r : s.reports) write_csv_rows(csv, r);
        csv.flush();
        std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << format_real(s.seconds) << " s)\n";
        for (const auto& mt : s.metrics)
            std::cout << "  " << mt.name << " = " << format_real(mt.value) << " " << mt.relation() << " " << format_real(mt.limit)
                      << (mt.ok() ? "" : "  FAILED") << "\n";
        if (!s.passed()) failed.push_back(s.name);
        summary["suites"].push_back(suite_json(s));
    }
    summary["passed"] = failed.empty();
    summary["failed"] = failed;
    std::ofstream(fs::path(c.out) / "summary.json") << summary.dump(2) << "\n";

    std::cout << names.size() << " suites run, " << failed.size() << " failed\n";
    if (!failed.empty()) {
        std::cerr << "failing suites:";
        for (const auto& f : failed) std::cerr << " " << f;
        std::cerr << "\n";
        return kExitCheck;
    }
    return kExitOk;
}

// bench ----------------------------------------------------------------------

struct BenchConfig {
    std::vector<std::size_t> sizes{256, 1024, 4096};
    bool sizes_given_empty = false;
    int reps = 3;
    std::string manifest = ZSPACE_DEFAULT_MANIFEST;
    std::string field = "g0";
    std::string out = "bench_out";
};

int cmd_bench(const BenchConfig& c) {
    if (c.sizes.empty() || c.sizes_given_empty) throw UsageError("--sizes needs at least one grid size");
    if (!fs::exists(c.manifest)) throw UsageError("manifest not found: " + c.manifest);
    Manifest m = load_manifest(c.manifest);
    const CorpusEntry& entry = m.find(c.field);
    fs::create_directories(c.out);
    fs::path csv_path = fs::path(c.out) / "bench.csv";
    std::ofstream csv(csv_path);
    csv << "n_x,naive_seconds,fast_seconds,speedup,max_rel_deviation\n";
    for (std::size_t n : c.sizes) {
        BenchRow row = bench_box_average(entry, n, c.reps);
        csv << row.n_x << "," << format_real(row.naive_seconds) << "," << format_real(row.fast_seconds) << "," << format_real(row.speedup())
            << "," << format_real(row.max_rel) << "\n";
        std::cout << "n_x=" << row.n_x << " naive=" << format_real(row.naive_seconds) << " s fast=" << format_real(row.fast_seconds)
                  << " s speedup=" << format_real(row.speedup()) << " max_rel=" << format_real(row.max_rel) << "\n";
    }
    std::ofstream gp(fs::path(c.out) / "bench.gp");
    gp << "set datafile separator ','\n"
          "set logscale xy\n"
          "set xlabel 'n_x'\n"
          "set ylabel 'seconds'\n"
          "set key top left\n"
          "set terminal pngcairo size 800,500\n"
          "set output 'bench.png'\n"
          "plot 'bench.csv' every ::1 using 1:2 with linespoints title 'naive', \\\n"
          "     'bench.csv' every ::1 using 1:3 with linespoints title 'fast'\n";
    return kExitOk;
}

// generate -------------------------------------------------------------------

struct GenerateConfig {
    std::string manifest = ZSPACE_DEFAULT_MANIFEST;
    std::string corpus_id;
    std::string out;
    GridFlags grid;
};

int cmd_generate(const GenerateConfig& c) {
    Manifest m = load_manifest(c.manifest);
    save_field(generate_halfspace(m.find(c.corpus_id), c.grid.grid()), c.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whitney-average function spaces on a periodic grid"};
    app.require_subcommand(1);

    NormConfig nc;
    auto* norm = app.add_subcommand("norm", "evaluate one norm of a field");
    norm->add_option("--space", nc.space, "Z, T, besov, triebel, dyadic, amenta, huang or vv");
    norm->add_option("--p", nc.p, "integrability in x (number or inf)");
    norm->add_option("--q", nc.q, "integrability in t (number or inf)");
    norm->add_option("--r", nc.r, "Whitney-average exponent (number or inf)");
    norm->add_option("--beta", nc.beta, "smoothness weight");
    norm->add_option("--whitney", nc.whitney, "Whitney parameters a,b,c");
    norm->add_option("--input", nc.input, "HSF1 field file");
    norm->add_option("--corpus", nc.corpus_id, "corpus entry id");
    norm->add_option("--manifest", nc.manifest, "corpus manifest");
    norm->add_option("--csv", nc.csv, "CSV file to append to (empty disables)");
    nc.grid.attach(norm);

    VerifyConfig vc;
    auto* verify = app.add_subcommand("verify", "run the verification suites over the corpus");
    verify->add_option("--manifest", vc.manifest, "corpus manifest");
    verify->add_option("--only", vc.only, "suite names (comma separated)")->delimiter(',');
    verify->add_option("--out", vc.out, "output directory");
    verify->add_option("--jobs", vc.jobs, "worker threads (default: WHITNEY_JOBS or 1)")->check(CLI::PositiveNumber);
    vc.grid.attach(verify);

    BenchConfig bc;
    std::vector<std::string> size_text;
    auto* bench = app.add_subcommand("bench", "time naive against fast box averages");
    bench->add_option("--sizes", size_text, "grid sizes n_x (comma separated)")->delimiter(',');
    bench->add_option("--reps", bc.reps, "repetitions per size (best time kept)")->check(CLI::PositiveNumber);
    bench->add_option("--manifest", bc.manifest, "corpus manifest");
    bench->add_option("--field", bc.field, "corpus entry to extend");
    bench->add_option("--out", bc.out, "output directory");

    GenerateConfig gc;
    auto* generate = app.add_subcommand("generate", "write a corpus field as HSF1");
    generate->add_option("--corpus", gc.corpus_id, "corpus entry id")->required();
    generate->add_option("--manifest", gc.manifest, "corpus manifest");
    generate->add_option("--out", gc.out, "output file")->required();
    gc.grid.attach(generate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*norm) return cmd_norm(nc);
        if (*verify) return cmd_verify(vc);
        if (*bench) {
            if (bench->count("--sizes")) {
                bc.sizes.clear();
                for (const auto& s : size_text) {
                    if (s.empty()) continue;
                    std::size_t used = 0;
                    unsigned long v = 0;
                    try {
                        v = std::stoul(s, &used);
                    } catch (const std::exception&) {
                        throw UsageError("bad grid size '" + s + "'");
                    }
                    if (used != s.size() || v == 0) throw UsageError("bad grid size '" + s + "'");
                    bc.sizes.push_back(v);
                }
                bc.sizes_given_empty = bc.sizes.empty();
            }
            return cmd_bench(bc);
        }
        if (*generate) return cmd_generate(gc);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        if (msg.find("tent spaces not defined for p=inf") != std::string::npos) msg = "tent p=inf unsupported";
        std::cerr << "error: " << msg << "\n";
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheck;
    }
    return kExitUsage;
}
