#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include "tailforge/oracle.hpp"
#include "tailforge/region.hpp"
#include "tailforge/rng.hpp"
#include "tailforge/sampler.hpp"
#include "tailforge/table_io.hpp"
#include "tailforge/tiler.hpp"
#include "tailforge/transforms.hpp"
#include "tailforge/validate.hpp"

namespace tailforge::cli {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct DistFlags {
    std::string dist = "stable";
    double alpha = kUnset;
    double beta = kUnset;
    double gamma = kUnset;
    double delta = kUnset;
};

struct RegionFlags {
    std::string region;
    std::string table_path;
    double target_rejection = 0.01;
    int max_level = TilerOptions{}.max_level;
};

struct Options {
    DistFlags dist;
    RegionFlags region;
    std::string seed;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t n = 0;
    unsigned threads = 1;
    int grid = 800;
    std::string suite = "all";
};

void add_dist_flags(CLI::App* cmd, DistFlags& f) {
    cmd->add_option("--dist", f.dist, "distribution family")
        ->check(CLI::IsMember({"stable", "ml"}))
        ->capture_default_str();
    cmd->add_option("--alpha", f.alpha, "index (stable, (0,2]) or order (ml, (0,1])")->required();
    cmd->add_option("--beta", f.beta, "stable skewness in [-1,1] (default 0)");
    cmd->add_option("--gamma", f.gamma, "stable scale > 0 (default 1)");
    cmd->add_option("--delta", f.delta, "stable location (default 0)");
}

void add_region_flags(CLI::App* cmd, RegionFlags& f, bool region_required) {
    auto* opt = cmd->add_option("--region", f.region, "condition, e.g. \"(-inf,-12]\" or \"(-inf,-1] U [1,inf)\"");
    if (region_required) {
        opt->required();
    }
    cmd->add_option("--table", f.table_path, "tile table cache: reused when it matches, else rebuilt and saved");
    cmd->add_option("--target-rejection", f.target_rejection, "tiling target for the rejection rate")
        ->capture_default_str();
    cmd->add_option("--max-level", f.max_level, "finest refinement level per axis")->capture_default_str();
}

void add_seed_flag(CLI::App* cmd, std::string& seed) {
    cmd->add_option("--seed", seed, "32-bit seed, decimal or 0x hex (fallback: TAILFORGE_SEED)");
}

TransformMap make_map(const DistFlags& f) {
    if (f.dist == "ml") {
        if (!std::isnan(f.beta) || !std::isnan(f.gamma) || !std::isnan(f.delta)) {
            throw InvalidParameter("parameter invariant violated: --beta/--gamma/--delta apply to --dist stable only");
        }
        return TransformMap::mittag_leffler(MLParams{f.alpha});
    }
    StableParams p;
    p.alpha = f.alpha;
    p.beta = std::isnan(f.beta) ? 0.0 : f.beta;
    p.gamma = std::isnan(f.gamma) ? 1.0 : f.gamma;
    p.delta = std::isnan(f.delta) ? 0.0 : f.delta;
    return TransformMap::stable(p);
}

std::uint32_t resolve_seed(const std::string& flag) {
    if (!flag.empty()) {
        return parse_seed(flag);
    }
    if (const char* env = std::getenv("TAILFORGE_SEED"); env != nullptr && *env != '\0') {
        return parse_seed(env);
    }
    return kDefaultSeed;
}

std::string describe(const TransformMap& map) {
    return map.family() == Family::stable ? to_string(map.stable_params()) : to_string(map.ml_params());
}

/// Loads the cached table when it was built for the same map, region and
/// target; otherwise builds one (and saves it when a path is given).
TileTable obtain_table(const TransformMap& map, const RegionSpec& region, const RegionFlags& f,
                       std::ostream& err) {
    if (!f.table_path.empty() && std::filesystem::exists(f.table_path)) {
        TileTable cached = load_table(f.table_path);
        if (cached.map == map && cached.region == region && cached.target_rejection == f.target_rejection) {
            return cached;
        }
        err << "note: table " << f.table_path << " was built for other settings; rebuilding\n";
    }
    TilerOptions opts;
    opts.target_rejection = f.target_rejection;
    opts.max_level = f.max_level;
    TileTable table = build_tile_table(map, region, opts);
    if (!table.converged) {
        err << "warning: tiling stopped at est_rejection=" << table.est_rejection << " above target "
            << f.target_rejection << "\n";
    }
    if (!f.table_path.empty()) {
        save_table(table, f.table_path);
    }
    return table;
}

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_values(std::ostream& os, const std::vector<double>& values, const std::string& format) {
    if (format == "csv") {
        std::string line;
        for (double x : values) {
            line = fmt17(x);
            line += '\n';
            os.write(line.data(), static_cast<std::streamsize>(line.size()));
        }
        return;
    }
    std::vector<char> bytes(values.size() * 8);
    for (std::size_t k = 0; k < values.size(); ++k) {
        const auto bits = std::bit_cast<std::uint64_t>(values[k]);
        for (int b = 0; b < 8; ++b) {
            bytes[8 * k + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Runs `body` with the output stream: --out file when given, else `out`.
template <class Body>
void with_output(const std::string& path, std::ostream& out, bool binary, Body&& body) {
    if (path.empty()) {
        body(out);
        return;
    }
    std::ofstream file(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!file) {
        throw InvalidParameter("cannot open output file " + path);
    }
    body(file);
    if (!file) {
        throw std::runtime_error("failed writing " + path);
    }
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
    const TransformMap map = make_map(o.dist);
    const std::uint32_t seed = resolve_seed(o.seed);
    if (o.threads == 0) {
        throw InvalidParameter("parameter invariant violated: --threads >= 1");
    }
    std::optional<TileTable> table;
    if (!o.region.region.empty()) {
        table = obtain_table(map, RegionSpec::parse(o.region.region), o.region, err);
    }
    const unsigned t_count = o.threads;
    std::vector<std::vector<double>> parts(t_count);
    std::vector<std::exception_ptr> errors(t_count);
    auto work = [&](unsigned k) {
        try {
            const std::uint64_t count = o.n / t_count + (k < o.n % t_count ? 1 : 0);
            parts[k].resize(count);
            Shr3 src(derive_seed(seed, k));
            if (table) {
                ConditionalSampler<Shr3> s(*table, src);
                for (auto& x : parts[k]) x = s();
            } else {
                UnconditionalSampler<Shr3> s(map, src);
                for (auto& x : parts[k]) x = s();
            }
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (t_count == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t_count; ++k) pool.emplace_back(work, k);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    with_output(o.out_path, out, o.format == "f64le", [&](std::ostream& os) {
        for (const auto& part : parts) write_values(os, part, o.format);
    });
    return kOk;
}

int cmd_map(const Options& o, std::ostream& out) {
    const TransformMap map = make_map(o.dist);
    if (o.grid < 1) {
        throw InvalidParameter("parameter invariant violated: --grid >= 1");
    }
    const int n = o.grid;
    with_output(o.out_path, out, false, [&](std::ostream& os) {
        os << "# dist=" << to_string(map.family()) << ' ' << describe(map) << " grid=" << n
           << " rows=u cols=v\n";
        std::string line;
        for (int i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            line.clear();
            for (int j = 0; j < n; ++j) {
                const double v = (j + 0.5) / n;
                if (j > 0) line += ',';
                const double x = map.raw(u, v);
                line += std::isfinite(x) ? fmt17(x) : "nan";
            }
            line += '\n';
            os << line;
        }
    });
    return kOk;
}

int cmd_table(const Options& o, std::ostream& out, std::ostream& err) {
    const TransformMap map = make_map(o.dist);
    const RegionSpec region = RegionSpec::parse(o.region.region);
    RegionFlags f = o.region;
    f.table_path.clear();
    const auto start = std::chrono::steady_clock::now();
    const TileTable table = obtain_table(map, region, f, err);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    save_table(table, o.out_path);
    Report r;
    r.set("dist", std::string(to_string(map.family())));
    r.set("params", describe(map));
    r.set("region", region.to_string());
    r.set("level_u", static_cast<std::uint64_t>(table.level_u));
    r.set("level_v", static_cast<std::uint64_t>(table.level_v));
    r.set("tiles", static_cast<std::uint64_t>(table.tiles.size()));
    r.set("boundary_tiles", static_cast<std::uint64_t>(table.boundary_count()));
    r.set("est_rejection", table.est_rejection);
    r.set("kept_area", table.kept_area());
    r.set("build_seconds", seconds);
    r.check("converged", table.converged);
    out << r.str();
    return r.all_pass() ? kOk : kCheckFailed;
}

CdfFunction oracle_cdf(const TransformMap& map) {
    if (map.family() == Family::stable) {
        const StableParams p = map.stable_params();
        return [p](double x) { return stable_cdf(p, x); };
    }
    auto s = std::make_shared<MittagLefflerSurvival>(map.ml_params());
    return [s](double t) { return t <= 0.0 ? 0.0 : 1.0 - s->survival(t); };
}

template <class Draw>
double timeboxed_rate(Draw&& draw, double seconds) {
    volatile double sink = 0.0;
    double acc = 0.0;
    std::uint64_t n = 0;
    const auto start = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    while (elapsed < seconds) {
        for (int k = 0; k < 64; ++k, ++n) acc += draw();
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    sink = acc;
    (void)sink;
    return static_cast<double>(n) / elapsed;
}

void suite_ks(const Options& o, const TransformMap& map, const std::optional<TileTable>& table,
              std::uint32_t seed, Report& r) {
    const std::uint64_t n = o.n == 0 ? 100000 : o.n;
    std::vector<double> xs(n);
    if (table) {
        ConditionalSampler<Shr3> s(*table, Shr3(seed));
        for (auto& x : xs) x = s();
    } else {
        UnconditionalSampler<Shr3> s(map, Shr3(seed));
        for (auto& x : xs) x = s();
    }
    std::sort(xs.begin(), xs.end());
    const auto run_ks = [&](const CdfFunction& base) {
        if (table) {
            const ConditionalCdf cond(base, table->region);
            return ks_one_sample(xs, TabulatedCdf(ks_nodes(xs), cond));
        }
        return ks_one_sample(xs, TabulatedCdf(ks_nodes(xs), base));
    };
    const KsResult ks = run_ks(oracle_cdf(map));
    r.set("ks_n", static_cast<std::uint64_t>(ks.n));
    r.set("ks_d", ks.d);
    r.set("ks_critical", ks.critical_1pct);
    r.check("ks", ks.pass);
    if (map.family() == Family::stable) {
        const StableParams realized = realized_parameters(map.stable_params());
        if (!(realized == map.stable_params())) {
            const KsResult alt = run_ks(oracle_cdf(TransformMap::stable(realized)));
            r.set("realized_params", to_string(realized));
            r.set("ks_realized_d", alt.d);
            r.set("ks_realized_pass", std::string(alt.pass ? "yes" : "no"));
        }
    }
}

void suite_rejection(const Options& o, const std::optional<TileTable>& table, std::uint32_t seed, Report& r) {
    if (!table) {
        r.set("rejection", std::string("skipped (no region)"));
        return;
    }
    const std::uint64_t n = o.n == 0 ? 1000000 : std::max<std::uint64_t>(o.n, 1000);
    ConditionalSampler<Shr3> s(*table, Shr3(seed));
    const double rate = measure_rejection(s, n);
    r.set("rejection_n", n);
    r.set("rejection_rate", rate);
    r.set("est_rejection", table->est_rejection);
    r.set("rejection_limit", 1.5 * table->target_rejection);
    r.check("rejection", rate < 1.5 * table->target_rejection);
}

void suite_throughput(const TransformMap& map, const std::optional<TileTable>& table, std::uint32_t seed,
                      Report& r) {
    UnconditionalSampler<Shr3> plain(map, Shr3(seed));
    r.set("unconditional_per_s", timeboxed_rate([&] { return plain(); }, 0.3));
    if (!table) {
        r.set("throughput", std::string("skipped (no region)"));
        return;
    }
    const TileTable finer = build_tile_table_at(map, table->region, table->level_u + 1, table->level_v + 1);
    ConditionalSampler<Shr3> a(*table, Shr3(seed));
    ConditionalSampler<Shr3> b(finer, Shr3(seed));
    const double rate_a = timeboxed_rate([&] { return a(); }, 0.4);
    const double rate_b = timeboxed_rate([&] { return b(); }, 0.4);
    const double ratio = rate_b / rate_a;
    r.set("tiles", static_cast<std::uint64_t>(table->tiles.size()));
    r.set("tiles_finer", static_cast<std::uint64_t>(finer.tiles.size()));
    r.set("conditional_per_s", rate_a);
    r.set("conditional_finer_per_s", rate_b);
    r.set("throughput_ratio", ratio);
    r.check("tile_count_independence", std::fabs(ratio - 1.0) <= 0.25);

    Shr3 probe(derive_seed(seed, 1));
    const double mass = table_area_estimate(*table, 200000, probe).value;
    NaiveConditionalSampler<Shr3> naive(map, table->region, Shr3(seed));
    const double naive_rate = timeboxed_rate([&] { return naive(); }, 0.3);
    r.set("region_mass", mass);
    r.set("naive_per_s", naive_rate);
    r.set("speedup_vs_naive", rate_a / naive_rate);
    if (mass <= 0.01) {
        r.check("speedup", rate_a / naive_rate >= 10.0);
    }
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err, bool bench) {
    const TransformMap map = make_map(o.dist);
    const std::uint32_t seed = resolve_seed(o.seed);
    std::optional<TileTable> table;
    if (!o.region.region.empty()) {
        table = obtain_table(map, RegionSpec::parse(o.region.region), o.region, err);
    }
    Report r;
    r.set("dist", std::string(to_string(map.family())));
    r.set("params", describe(map));
    r.set("region", table ? table->region.to_string() : std::string("(-inf,inf)"));
    r.set("seed", static_cast<std::uint64_t>(seed));
    const std::string suite = bench ? "throughput" : o.suite;
    if (suite == "ks" || suite == "all") suite_ks(o, map, table, seed, r);
    if (suite == "rejection" || suite == "all") suite_rejection(o, table, seed, r);
    if (suite == "throughput" || suite == "all") suite_throughput(map, table, seed, r);
    out << r.str();
    return r.all_pass() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stable and Mittag-Leffler variates, unconditional or restricted to a region", "tailforge"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "generate variates");
    add_dist_flags(gen, o.dist);
    add_region_flags(gen, o.region, false);
    add_seed_flag(gen, o.seed);
    gen->add_option("--n", o.n, "number of variates")->required();
    gen->add_option("--format", o.format, "csv or f64le")->check(CLI::IsMember({"csv", "f64le"}))->capture_default_str();
    gen->add_option("--out", o.out_path, "output file (default stdout)");
    gen->add_option("--threads", o.threads, "independent samplers with derived seeds")->capture_default_str();

    auto* map = app.add_subcommand("map", "transform map values on a grid of cell centers");
    add_dist_flags(map, o.dist);
    map->add_option("--grid", o.grid, "grid size N (N x N)")->capture_default_str();
    map->add_option("--out", o.out_path, "output file (default stdout)");

    auto* table = app.add_subcommand("table", "build a tile table and save it");
    add_dist_flags(table, o.dist);
    add_region_flags(table, o.region, true);
    table->add_option("--out", o.out_path, "table file")->required();

    auto* validate = app.add_subcommand("validate", "statistical checks, key=value report");
    add_dist_flags(validate, o.dist);
    add_region_flags(validate, o.region, false);
    add_seed_flag(validate, o.seed);
    validate->add_option("--suite", o.suite, "ks, rejection, throughput or all")
        ->check(CLI::IsMember({"ks", "rejection", "throughput", "all"}))
        ->capture_default_str();
    validate->add_option("--n", o.n, "sample size (default: 1e5 for ks, 1e6 for rejection)");

    auto* bench = app.add_subcommand("bench", "throughput measurements, key=value report");
    add_dist_flags(bench, o.dist);
    add_region_flags(bench, o.region, false);
    add_seed_flag(bench, o.seed);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, out, err);
        if (map->parsed()) return cmd_map(o, out);
        if (table->parsed()) return cmd_table(o, out, err);
        if (validate->parsed()) return cmd_validate(o, out, err, false);
        if (bench->parsed()) return cmd_validate(o, out, err, true);
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const SeedError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const TableFormatError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const EmptyRegionError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreachable;
    } catch (const StarvationError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreachable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kInvalidInput;
}

}  // namespace tailforge::cli
