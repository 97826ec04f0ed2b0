#pragma once

// Adaptive Gauss-Kronrod (10/21) quadrature and Wynn epsilon extrapolation.
// Used by the density/CDF oracle; kept generic so tests can exercise it on
// integrals with known values.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace tailforge::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
    bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067366418, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

}  // namespace detail

/// Single 21-point Kronrod rule on [a, b] with the QUADPACK error heuristic.
template <class F>
Result gauss_kronrod21(F&& f, double a, double b) {
    using namespace detail;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 21> fv{};
    for (int k = 0; k < 10; ++k) {
        fv[2 * k] = f(center - half * kXgk[k]);
        fv[2 * k + 1] = f(center + half * kXgk[k]);
    }
    fv[20] = f(center);

    double kronrod = kWgk[10] * fv[20];
    double gauss = 0.0;
    double abs_sum = kWgk[10] * std::fabs(fv[20]);
    for (int k = 0; k < 10; ++k) {
        const double pair = fv[2 * k] + fv[2 * k + 1];
        kronrod += kWgk[k] * pair;
        abs_sum += kWgk[k] * (std::fabs(fv[2 * k]) + std::fabs(fv[2 * k + 1]));
        if (k % 2 == 1) {
            gauss += kWg[k / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[10] * std::fabs(fv[20] - mean);
    for (int k = 0; k < 10; ++k) {
        asc += kWgk[k] * (std::fabs(fv[2 * k] - mean) + std::fabs(fv[2 * k + 1] - mean));
    }

    Result r;
    r.value = kronrod * half;
    r.evaluations = 21;
    const double abs_half = std::fabs(half);
    double err = std::fabs((kronrod - gauss) * half);
    asc *= abs_half;
    abs_sum *= abs_half;
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    r.error = err;
    if (!std::isfinite(r.value)) {
        r.error = std::numeric_limits<double>::infinity();
        r.converged = false;
    }
    return r;
}

/// Globally adaptive bisection: repeatedly splits the interval with the
/// largest error estimate until the total error is below
/// max(abs_tol, rel_tol * |value|) or max_subdivisions is reached.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 int max_subdivisions) {
    struct Piece {
        double a, b;
        Result r;
        bool operator<(const Piece& o) const { return r.error < o.r.error; }
    };
    Result total;
    if (a == b) {
        return total;
    }
    std::priority_queue<Piece> heap;
    Piece first{a, b, gauss_kronrod21(f, a, b)};
    total.value = first.r.value;
    total.error = first.r.error;
    total.evaluations = first.r.evaluations;
    heap.push(first);

    int splits = 0;
    while (total.error > std::max(abs_tol, rel_tol * std::fabs(total.value))) {
        if (splits >= max_subdivisions || !std::isfinite(total.value)) {
            total.converged = false;
            break;
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval exhausted at double resolution
            total.converged = false;
            heap.push(worst);
            break;
        }
        Piece left{worst.a, mid, gauss_kronrod21(f, worst.a, mid)};
        Piece right{mid, worst.b, gauss_kronrod21(f, mid, worst.b)};
        total.value += left.r.value + right.r.value - worst.r.value;
        total.error += left.r.error + right.r.error - worst.r.error;
        total.evaluations += left.r.evaluations + right.r.evaluations;
        heap.push(left);
        heap.push(right);
        ++splits;
        if (splits % 64 == 0) {
            // resum to shed accumulated cancellation in the running totals
            auto copy = heap;
            double v = 0.0;
            double e = 0.0;
            while (!copy.empty()) {
                v += copy.top().r.value;
                e += copy.top().r.error;
                copy.pop();
            }
            total.value = v;
            total.error = e;
        }
    }
    total.subdivisions = splits;
    return total;
}

struct Extrapolation {
    double value = 0.0;
    double error = std::numeric_limits<double>::infinity();
};

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the even-
/// column entry whose two most recent values agree best, and that difference
/// as the error estimate.
inline Extrapolation wynn_epsilon(std::span<const double> sums) {
    Extrapolation best;
    const std::size_t n = sums.size();
    if (n == 0) {
        return best;
    }
    best.value = sums.back();
    if (n >= 2) {
        best.error = std::fabs(sums[n - 1] - sums[n - 2]);
    }
    std::vector<double> prev(n + 1, 0.0);  // column -1
    std::vector<double> cur(sums.begin(), sums.end());
    for (std::size_t col = 1; cur.size() >= 2; ++col) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
            const double diff = cur[k + 1] - cur[k];
            if (diff == 0.0) {
                // exact convergence of this column
                if (col % 2 == 1) {
                    return {cur[k + 1], 0.0};
                }
                next[k] = std::numeric_limits<double>::infinity();
                continue;
            }
            next[k] = prev[k + 1] + 1.0 / diff;
        }
        if (col % 2 == 0 && next.size() >= 2) {
            const double a = next[next.size() - 1];
            const double b = next[next.size() - 2];
            const double err = std::fabs(a - b);
            if (std::isfinite(a) && std::isfinite(err) && err < best.error) {
                best = {a, err};
            }
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return best;
}

}  // namespace tailforge::quad
