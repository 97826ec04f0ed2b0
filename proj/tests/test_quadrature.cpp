#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tailforge/quadrature.hpp"

using namespace tailforge;

TEST_SUITE("quadrature") {
    TEST_CASE("single Kronrod rule is exact for polynomials of degree 31") {
        const auto r = quad::gauss_kronrod21([](double x) { return std::pow(x, 30) + 3.0 * x; }, -1.0, 2.0);
        const double want = (std::pow(2.0, 31) + 1.0) / 31.0 + 1.5 * (4.0 - 1.0);
        CHECK(r.value == doctest::Approx(want).epsilon(1e-13));
        CHECK(r.evaluations == 21);
    }

    TEST_CASE("adaptive integration of smooth and peaked integrands") {
        const auto gauss = quad::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0, 1e-13, 0.0, 200);
        CHECK(gauss.converged);
        CHECK(gauss.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));

        // integrable endpoint singularity
        const auto root = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 0.0, 500);
        CHECK(root.value == doctest::Approx(2.0).epsilon(1e-9));

        const auto spike = quad::integrate([](double x) { return 1e-3 / (1e-6 + (x - 0.3) * (x - 0.3)); }, 0.0, 1.0,
                                           1e-12, 0.0, 500);
        const double want = std::atan(0.7 / 1e-3) + std::atan(0.3 / 1e-3);
        CHECK(spike.converged);
        CHECK(spike.value == doctest::Approx(want).epsilon(1e-11));
    }

    TEST_CASE("error estimate bounds the true error") {
        const auto r = quad::integrate([](double x) { return std::cos(50.0 * x); }, 0.0, 3.0, 1e-9, 0.0, 100);
        const double want = std::sin(150.0) / 50.0;
        CHECK(std::fabs(r.value - want) <= r.error + 1e-15);
    }

    TEST_CASE("subdivision budget is reported as non-convergence") {
        const auto r = quad::integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-15, 0.0, 3);
        CHECK_FALSE(r.converged);
        CHECK(r.subdivisions == 3);
    }

    TEST_CASE("zero-width interval") {
        const auto r = quad::integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-12, 0.0, 10);
        CHECK(r.value == 0.0);
        CHECK(r.converged);
    }

    TEST_CASE("Wynn epsilon accelerates an alternating series") {
        std::vector<double> sums;
        double s = 0.0;
        for (int k = 1; k <= 14; ++k) {
            s += (k % 2 == 1 ? 1.0 : -1.0) / k;
            sums.push_back(s);
        }
        const auto e = quad::wynn_epsilon(sums);
        CHECK(std::fabs(sums.back() - std::numbers::ln2) > 1e-2);
        CHECK(e.value == doctest::Approx(std::numbers::ln2).epsilon(1e-10));
        CHECK(e.error < 1e-8);
    }

    TEST_CASE("Wynn epsilon on a geometric sequence is exact") {
        std::vector<double> sums;
        double s = 0.0;
        for (int k = 0; k < 6; ++k) {
            s += std::pow(0.5, k);
            sums.push_back(s);
        }
        CHECK(quad::wynn_epsilon(sums).value == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(quad::wynn_epsilon(std::vector<double>{}).value == 0.0);
    }
}
