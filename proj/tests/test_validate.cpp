#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tailforge/validate.hpp"

using namespace tailforge;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> normal_sample(std::uint32_t seed, std::size_t n, double shift = 0.0) {
    Shr3 g(seed);
    std::vector<double> xs(n);
    for (auto& x : xs) {
        const double u = g.next_unit();
        const double v = g.next_unit();
        x = std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v) + shift;
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

}  // namespace

TEST_SUITE("validate") {
    TEST_CASE("one-sample statistic on a hand-checked sample") {
        std::vector<double> xs;
        for (int k = 0; k < 10; ++k) xs.push_back(0.05 + 0.1 * k);
        const auto r = ks_one_sample(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
        CHECK(r.n == 10);
        CHECK(r.d == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(r.critical_1pct == doctest::Approx(1.628 / std::sqrt(10.0)).epsilon(1e-15));
        CHECK(r.pass);
    }

    TEST_CASE("samples from the model pass, shifted samples fail") {
        const auto xs = normal_sample(1, 100000);
        const auto good = ks_one_sample(xs, normal_cdf);
        CHECK(good.pass);
        CHECK(good.d < good.critical_1pct);
        const auto bad = ks_one_sample(normal_sample(2, 100000, 1.0), normal_cdf);
        CHECK_FALSE(bad.pass);
        CHECK(bad.d == doctest::Approx(normal_cdf(0.5) - normal_cdf(-0.5)).epsilon(0.02));
    }

    TEST_CASE("two-sample statistic") {
        const auto a = normal_sample(3, 20000);
        const auto same = ks_two_sample(a, a);
        CHECK(same.d == 0.0);
        CHECK(same.pass);
        const auto b = normal_sample(4, 30000);
        const auto ind = ks_two_sample(a, b);
        CHECK(ind.pass);
        CHECK(ind.critical_1pct == doctest::Approx(1.628 * std::sqrt(50000.0 / (20000.0 * 30000.0))));
        CHECK_FALSE(ks_two_sample(a, normal_sample(5, 30000, 0.2)).pass);
        // disjoint samples reach the maximum
        const std::vector<double> lo{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const std::vector<double> hi{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
        CHECK(ks_two_sample(lo, hi).d == 1.0);
    }

    TEST_CASE("input checks") {
        const std::vector<double> few{1, 2, 3};
        CHECK_THROWS_AS(ks_one_sample(few, normal_cdf), std::invalid_argument);
        std::vector<double> unsorted{3, 1, 2, 4, 5, 6, 7, 8, 9, 10};
        CHECK_THROWS_AS(ks_one_sample(unsorted, normal_cdf), std::invalid_argument);
        CHECK_THROWS_AS(ks_two_sample(unsorted, unsorted), std::invalid_argument);
        std::vector<double> with_nan{1, 2, 3, 4, 5, 6, 7, 8, 9, std::nan("")};
        CHECK_THROWS_AS(ks_one_sample(with_nan, normal_cdf), std::invalid_argument);
    }

    TEST_CASE("statistics are deterministic") {
        const auto xs = normal_sample(6, 5000);
        CHECK(ks_one_sample(xs, normal_cdf).d == ks_one_sample(xs, normal_cdf).d);
    }

    TEST_CASE("tabulated CDF interpolates between exact nodes") {
        const auto xs = normal_sample(7, 100000);
        const auto nodes = ks_nodes(xs);
        CHECK(nodes.front() == xs.front());
        CHECK(nodes.back() == xs.back());
        CHECK(nodes.size() == 4001);
        const TabulatedCdf tab(nodes, normal_cdf);
        for (double x : nodes) CHECK(tab(x) == normal_cdf(x));
        CHECK(tab(-100.0) == normal_cdf(nodes.front()));
        CHECK(std::fabs(ks_one_sample(xs, tab).d - ks_one_sample(xs, normal_cdf).d) < 1e-5);
        CHECK_THROWS_AS(TabulatedCdf({1.0, 1.0}, normal_cdf), std::invalid_argument);
    }

    TEST_CASE("conditional CDF over a union") {
        const ConditionalCdf c(normal_cdf, RegionSpec::parse("(-inf,-1] U [1,inf)"));
        CHECK(c.mass() == doctest::Approx(2.0 * normal_cdf(-1.0)).epsilon(1e-14));
        CHECK(c(-1.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c(0.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c(1.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c(-3.0) == doctest::Approx(normal_cdf(-3.0) / c.mass()).epsilon(1e-12));
        CHECK(c(50.0) == 1.0);
        CHECK_THROWS_AS(ConditionalCdf(normal_cdf, RegionSpec::below(-1e6)), std::invalid_argument);
    }

    TEST_CASE("histogram bins and totals") {
        const std::vector<double> xs{-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.0, 3.0};
        const auto h = make_histogram(xs, {0.0, 1.0, 2.0});
        REQUIRE(h.counts.size() == 2);
        CHECK(h.counts[0] == 2);
        CHECK(h.counts[1] == 4);
        CHECK(h.total == 6);
        CHECK(h.outside == 2);
        CHECK_THROWS_AS(make_histogram(xs, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(make_histogram(xs, {0.0, 0.0}), std::invalid_argument);
    }

    TEST_CASE("Poisson band check") {
        const auto xs = normal_sample(8, 200000);
        std::vector<double> edges;
        for (int k = 0; k <= 40; ++k) edges.push_back(-4.0 + 0.2 * k);
        const auto h = make_histogram(xs, edges);
        const auto good = poisson_band_check(h, normal_cdf);
        CHECK(good.bins == 40);
        CHECK(good.pass);
        const auto bad = poisson_band_check(h, [](double x) { return normal_cdf(x / 1.2); });
        CHECK_FALSE(bad.pass);
    }

    TEST_CASE("throughput measurement is positive and finite") {
        Shr3 g(9);
        const double rate = measure_throughput([&] { return g.next_unit(); }, 1'000'000);
        CHECK(rate > 0.0);
        CHECK(std::isfinite(rate));
    }

    TEST_CASE("report format") {
        Report r;
        r.set("n", std::uint64_t{100});
        r.set("d", 0.25);
        r.set("region", std::string("(-inf,-12]"));
        r.check("ks", true);
        CHECK(r.all_pass());
        CHECK(r.str() == "n=100\nd=0.25\nregion=(-inf,-12]\nks=pass\nresult=pass\n");
        r.check("rejection", false);
        r.check("speedup", false);
        CHECK_FALSE(r.all_pass());
        CHECK(r.str().find("rejection=fail\n") != std::string::npos);
        CHECK(r.str().find("result=fail\nfailed=rejection,speedup\n") != std::string::npos);
    }
}
