// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "tailforge/oracle.hpp"
#include "tailforge/sampler.hpp"
#include "tailforge/tiler.hpp"
#include "tailforge/validate.hpp"

using namespace tailforge;

namespace {

int failures = 0;

void verdict(const char* id, bool pass, const std::string& summary) {
    std::printf("%s %s %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void detail(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

TransformMap stable(double a, double b = 0.0) { return TransformMap::stable(StableParams{a, b, 1.0, 0.0}); }

template <class Draw>
std::vector<double> sorted_draws(Draw&& draw, std::size_t n) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = draw();
    std::sort(xs.begin(), xs.end());
    return xs;
}

KsResult ks_against(const std::vector<double>& xs, const CdfFunction& cdf) {
    return ks_one_sample(xs, TabulatedCdf(ks_nodes(xs), cdf));
}

CdfFunction ml_cdf(double alpha) {
    auto s = std::make_shared<MittagLefflerSurvival>(MLParams{alpha});
    return [s](double t) { return t <= 0.0 ? 0.0 : 1.0 - s->survival(t); };
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ac1() {
    const auto t = build_tile_table(stable(1.8), RegionSpec::below(-12.0));
    ConditionalSampler<Shr3> s(t, Shr3(101));
    const double rate = measure_rejection(s, 1'000'000);
    char buf[160];
    std::snprintf(buf, sizeof buf, "rejection rate %.5f over 1e6 draws (limit 0.015, est_rejection %.5f)", rate,
                  t.est_rejection);
    verdict("AC1", rate < 0.015, buf);
}

void ac2() {
    bool ok = true;
    double worst = 0.0;
    for (double a : {0.3, 0.8, 1.5, 1.8, 1.95}) {
        for (double x : {-3.0, -12.0, -100.0}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto t = build_tile_table(stable(a), RegionSpec::below(x));
            const double sec = seconds_since(t0);
            worst = std::max(worst, sec);
            const bool pass = sec < 5.0 && t.converged && t.est_rejection <= 0.01;
            ok = ok && pass;
            detail("alpha=%.2f x=%g: %.3f s, levels (%d,%d), %zu tiles, est_rejection %.5f%s", a, x, sec,
                   t.level_u, t.level_v, t.tiles.size(), t.est_rejection, pass ? "" : "  <-- FAIL");
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "15 tables reach 1%% target, slowest %.3f s (limit 5 s)", worst);
    verdict("AC2", ok, buf);
}

void ac3() {
    bool ok = true;
    std::uint32_t seed = 300;
    auto report = [&](const std::string& name, const KsResult& ks) {
        ok = ok && ks.pass;
        detail("%s: d=%.5f critical=%.5f%s", name.c_str(), ks.d, ks.critical_1pct, ks.pass ? "" : "  <-- FAIL");
    };
    for (const auto& [a, x] : std::vector<std::pair<double, double>>{{1.8, -12.0}, {1.5, -5.0}, {0.8, -3.0}}) {
        const auto t = build_tile_table(stable(a), RegionSpec::below(x));
        ConditionalSampler<Shr3> s(t, Shr3(seed++));
        const auto xs = sorted_draws(s, 100'000);
        const StableParams p{a, 0.0, 1.0, 0.0};
        const ConditionalCdf cond([p](double y) { return stable_cdf(p, y); }, t.region);
        char name[64];
        std::snprintf(name, sizeof name, "stable alpha=%.1f X<=%g", a, x);
        report(name, ks_against(xs, [&](double y) { return cond(y); }));
    }
    {
        const auto t = build_tile_table(TransformMap::mittag_leffler(MLParams{0.9}), RegionSpec::above(10.0, false));
        ConditionalSampler<Shr3> s(t, Shr3(seed++));
        const auto xs = sorted_draws(s, 100'000);
        const ConditionalCdf cond(ml_cdf(0.9), t.region);
        report("mittag-leffler alpha=0.9 t>10", ks_against(xs, [&](double y) { return cond(y); }));
    }
    verdict("AC3", ok, "conditional KS at n=1e5 below 1.628/sqrt(n) for 3 stable tails and the ML tail");
}

void ac4() {
    bool ok = true;
    int discrepancies = 0;
    std::uint32_t seed = 400;
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        for (double b : {0.0, 0.5, -0.5}) {
            const StableParams nominal{a, b, 1.0, 0.0};
            UnconditionalSampler<Shr3> s(TransformMap::stable(nominal), Shr3(seed++));
            const auto xs = sorted_draws(s, 100'000);
            const auto ks = ks_against(xs, [&](double y) { return stable_cdf(nominal, y); });
            const StableParams realized = realized_parameters(nominal);
            if (realized == nominal) {
                ok = ok && ks.pass;
                detail("stable alpha=%.1f beta=%+.1f: d=%.5f critical=%.5f%s", a, b, ks.d, ks.critical_1pct,
                       ks.pass ? "" : "  <-- FAIL");
                continue;
            }
            // The printed Phi0 realizes a different skewness and scale.
            const auto kr = ks_against(xs, [&](double y) { return stable_cdf(realized, y); });
            ok = ok && kr.pass;
            if (!ks.pass) ++discrepancies;
            detail("stable alpha=%.1f beta=%+.1f: nominal d=%.5f (%s), realized beta'=%+.4f gamma'=%.4f d=%.5f "
                   "(%s), critical=%.5f",
                   a, b, ks.d, ks.pass ? "pass" : "DISCREPANCY", realized.beta, realized.gamma, kr.d,
                   kr.pass ? "pass" : "FAIL", ks.critical_1pct);
        }
    }
    for (double a : {0.6, 0.9, 1.0}) {
        UnconditionalSampler<Shr3> s(TransformMap::mittag_leffler(MLParams{a}), Shr3(seed++));
        const auto xs = sorted_draws(s, 100'000);
        const auto ks = ks_against(xs, ml_cdf(a));
        ok = ok && ks.pass;
        detail("mittag-leffler alpha=%.1f: d=%.5f critical=%.5f%s", a, ks.d, ks.critical_1pct,
               ks.pass ? "" : "  <-- FAIL");
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "unconditional KS at n=1e5; %d skewed cases disagree with their nominal parameters and match the "
                  "realized ones",
                  discrepancies);
    verdict("AC4", ok, buf);
}

void ac5() {
    UnconditionalSampler<Shr3> g(stable(2.0), Shr3(501));
    const int n = 1'000'000;
    double mean = 0.0;
    double m2 = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double x = g();
        const double d = x - mean;
        mean += d / k;
        m2 += d * (x - mean);
    }
    const double var = m2 / (n - 1);
    const bool var_ok = std::fabs(var - 2.0) <= 0.02;
    detail("alpha=2 sample variance %.5f at n=1e6 (target 2 +- 1%%)%s", var, var_ok ? "" : "  <-- FAIL");

    UnconditionalSampler<Shr3> e(TransformMap::mittag_leffler(MLParams{1.0}), Shr3(502));
    const auto xs = sorted_draws(e, 100'000);
    const auto ks = ks_one_sample(xs, [](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t); });
    detail("mittag-leffler alpha=1 vs 1-exp(-t): d=%.5f critical=%.5f%s", ks.d, ks.critical_1pct,
           ks.pass ? "" : "  <-- FAIL");
    verdict("AC5", var_ok && ks.pass, "Gaussian variance and exponential reduction");
}

void ac6() {
    const double a = 1.5;
    const int N = 100;
    UnconditionalSampler<Shr3> s(stable(a), Shr3(601));
    const auto raw = sorted_draws(s, 10'000);
    const double scale = std::pow(static_cast<double>(N), -1.0 / a);
    const auto sums = sorted_draws(
        [&] {
            double acc = 0.0;
            for (int k = 0; k < N; ++k) acc += s();
            return scale * acc;
        },
        10'000);
    const auto ks = ks_two_sample(raw, sums);
    char buf[160];
    std::snprintf(buf, sizeof buf, "two-sample KS raw vs normalized 100-sums, alpha=1.5, n=m=1e4: d=%.5f critical=%.5f",
                  ks.d, ks.critical_1pct);
    verdict("AC6", ks.pass, buf);
}

void ac7() {
    struct Case {
        const char* name;
        TransformMap map;
        RegionSpec region;
    };
    const Case cases[] = {
        {"stable 1.8 X<=-1", stable(1.8), RegionSpec::below(-1.0)},
        {"stable 1.8 X<=-12", stable(1.8), RegionSpec::below(-12.0)},
        {"stable 0.8 X<=-3", stable(0.8), RegionSpec::below(-3.0)},
        {"stable 1.5 b=0.5 (-inf,-2] U [1,2]", stable(1.5, 0.5), RegionSpec::parse("(-inf,-2] U [1,2]")},
        {"mittag-leffler 0.9 t>10", TransformMap::mittag_leffler(MLParams{0.9}), RegionSpec::above(10.0)},
        {"mittag-leffler 0.6 [3,4]", TransformMap::mittag_leffler(MLParams{0.6}), RegionSpec::between(3.0, 4.0)},
    };
    bool ok = true;
    std::uint32_t seed = 700;
    for (const auto& c : cases) {
        const auto t = build_tile_table(c.map, c.region);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> kept;
        std::vector<Tile> inside;
        for (const auto& tile : t.tiles) {
            kept.emplace_back(tile.i, tile.j);
            if (!tile.intersected) inside.push_back(tile);
        }
        auto cell = [](double x, int level) {
            return static_cast<std::uint32_t>(std::min(std::ldexp(x, level), std::ldexp(1.0, level) - 1.0));
        };
        Shr3 g(seed++);
        std::size_t in_region = 0;
        std::size_t misses = 0;
        for (int k = 0; k < 1'000'000; ++k) {
            const double u = g.next_unit();
            const double v = g.next_unit();
            const auto x = t.map(u, v);
            if (!x || !t.region.contains(*x)) continue;
            ++in_region;
            if (!std::binary_search(kept.begin(), kept.end(), std::make_pair(cell(u, t.level_u), cell(v, t.level_v))))
                ++misses;
        }
        std::size_t violations = 0;
        if (!inside.empty()) {
            for (int k = 0; k < 1'000'000; ++k) {
                const Tile& tile = inside[scale_to_range(next_u64(g), inside.size())];
                const double u = cell_coordinate(tile.i, t.level_u, g.next_unit());
                const double v = cell_coordinate(tile.j, t.level_v, g.next_unit());
                const auto x = t.map(u, v);
                if (!x || !t.region.contains(*x)) ++violations;
            }
        }
        const bool pass = misses == 0 && violations == 0;
        ok = ok && pass;
        detail("%s: %zu in-region probes, %zu outside kept tiles; %zu violations in 1e6 direct-accept probes%s",
               c.name, in_region, misses, violations, pass ? "" : "  <-- FAIL");
    }
    verdict("AC7", ok, "1e6 probes per table: full coverage, sound direct acceptance");
}

template <class Draw>
double best_rate(Draw&& draw, std::uint64_t n, int repeats) {
    double best = 0.0;
    for (int r = 0; r < repeats; ++r) best = std::max(best, measure_throughput(draw, n));
    return best;
}

void ac8() {
    const auto map = stable(1.8);
    const auto region = RegionSpec::below(-12.0);
    const auto coarse = build_tile_table(map, region);
    const auto fine = build_tile_table_at(map, region, coarse.level_u + 2, coarse.level_v + 2);
    ConditionalSampler<Shr3> a(coarse, Shr3(801));
    ConditionalSampler<Shr3> b(fine, Shr3(802));
    const std::uint64_t n = 2'000'000;
    const double ra = best_rate(a, n, 3);
    const double rb = best_rate(b, n, 3);
    const double ratio = rb / ra;
    const bool flat = std::fabs(ratio - 1.0) < 0.25;
    detail("levels (%d,%d): %zu tiles, %.3g variates/s", coarse.level_u, coarse.level_v, coarse.tiles.size(), ra);
    detail("levels (%d,%d): %zu tiles, %.3g variates/s", fine.level_u, fine.level_v, fine.tiles.size(), rb);
    detail("ratio %.3f (limit 1 +- 0.25)%s", ratio, flat ? "" : "  <-- FAIL");

    NaiveConditionalSampler<Shr3> naive(map, region, Shr3(803));
    const double rn = best_rate(naive, 5'000, 3);
    const double speedup = ra / rn;
    const bool fast = speedup >= 10.0;
    detail("naive rejection %.3g variates/s; speed-up %.1fx (limit 10x)%s", rn, speedup, fast ? "" : "  <-- FAIL");
    verdict("AC8", flat && fast, "throughput independent of tile count and >= 10x naive rejection");
}

bool grid_constant(const std::string& text, bool along_rows, double tol, double* worst) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> g;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        g.push_back(std::move(row));
    }
    *worst = 0.0;
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < g[i].size(); ++j) {
            // along_rows: constant within a row (varying v); else within a column (varying u)
            const double ref = along_rows ? g[i][0] : g[0][j];
            const double rel = std::fabs(g[i][j] - ref) / std::max(1.0, std::fabs(ref));
            *worst = std::max(*worst, rel);
        }
    }
    return n == 800 && *worst <= tol;
}

void ac9() {
    std::ostringstream out;
    std::ostringstream err;
    const int c1 = cli::run({"map", "--dist", "stable", "--alpha", "1", "--grid", "800"}, out, err);
    double w1 = 0.0;
    const bool cols = c1 == 0 && grid_constant(out.str(), false, 1e-12, &w1);
    detail("stable alpha=1, 800x800: largest relative change along u %.3g%s", w1, cols ? "" : "  <-- FAIL");

    std::ostringstream out2;
    const int c2 = cli::run({"map", "--dist", "ml", "--alpha", "1", "--grid", "800"}, out2, err);
    double w2 = 0.0;
    const bool rows = c2 == 0 && grid_constant(out2.str(), true, 1e-12, &w2);
    detail("mittag-leffler alpha=1, 800x800: largest relative change along v %.3g%s", w2, rows ? "" : "  <-- FAIL");
    verdict("AC9", cols && rows, "map grids: vertical isolines for stable alpha=1, horizontal for ML alpha=1");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    ac1();
    ac2();
    ac3();
    ac4();
    ac5();
    ac6();
    ac7();
    ac8();
    ac9();
    std::printf("acceptance: %d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
