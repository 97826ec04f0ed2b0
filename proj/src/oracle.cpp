#include "tailforge/oracle.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "tailforge/quadrature.hpp"
#include "tailforge/transforms.hpp"

namespace tailforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { density, distribution };

// Integrand of the inversion formulas for the standardized law:
//   density:      e^{-k^a} cos(psi(k))
//   distribution: e^{-k^a} sin(psi(k)) / k
// with psi(k) = k z - beta tan(pi a / 2) k^a      (a != 1)
//      psi(k) = k z + (2 beta / pi) k ln k        (a == 1)
struct Integrand {
    double alpha;
    double z;
    double skew;
    bool alpha_one;
    Kind kind;

    double operator()(double k) const noexcept {
        if (k <= 0.0) {
            return 0.0;
        }
        const double ka = alpha == 2.0 ? k * k : std::pow(k, alpha);
        const double env = std::exp(-ka);
        if (env == 0.0) {
            return 0.0;
        }
        const double psi = alpha_one ? k * z + skew * k * std::log(k) : k * z - skew * ka;
        return kind == Kind::density ? env * std::cos(psi) : env * std::sin(psi) / k;
    }
};

struct Accumulator {
    double value = 0.0;
    double error = 0.0;
};

void add_panel(Accumulator& acc, const quad::Result& r, const char* what) {
    if (!r.converged) {
        throw ConvergenceError(std::string("quadrature did not converge: ") + what, r.error);
    }
    acc.value += r.value;
    acc.error += r.error;
}

// Integral over [0, b] through k = b r^p, which removes the k^(a-1) endpoint
// behaviour for a < 1 and the log for a == 1.
quad::Result origin_panel(const Integrand& f, double b, double power, double tol, int max_sub) {
    auto g = [&](double r) {
        const double rp = std::pow(r, power - 1.0);
        return f(b * rp * r) * b * power * rp;
    };
    return quad::integrate(g, 0.0, 1.0, tol, 1e-13, max_sub);
}

// Non-oscillatory stretch [a, b]: geometric breakpoints from `scale`.
void smooth_stretch(Accumulator& acc, const Integrand& f, double a, double b, double scale,
                    double tol, int max_sub) {
    double lo = a;
    double width = std::max(scale, a);
    while (lo < b) {
        const double hi = std::min(b, lo + width);
        add_panel(acc, quad::integrate(f, lo, hi, tol, 1e-13, max_sub), "smooth panel");
        lo = hi;
        width = std::max(width, lo);
    }
}

double inversion_integral(const Integrand& f, const QuadratureSpec& q) {
    const double tol = kPi * q.abs_tol;  // result is divided by pi
    const double panel_tol = tol / 128.0;
    const int max_sub = q.max_subdivisions;

    // envelope e^{-k^a} below ~1e-3 tol beyond the cutoff
    const double cutoff = std::pow(std::log(1e3 / q.abs_tol) + 1.0, 1.0 / f.alpha);
    const double power = f.alpha < 1.0 ? 1.0 / f.alpha : (f.alpha_one && f.skew != 0.0 ? 2.0 : 1.0);
    const double az = std::fabs(f.z);
    const double period = az > 0.0 ? kPi / az : kInf;  // half-period of the oscillation
    const double offset = f.kind == Kind::density ? 0.5 : 1.0;  // first zero of cos / sin

    Accumulator acc;
    const double first = std::min(cutoff, offset * period);
    const double head = std::min(first, 1.0);
    add_panel(acc, origin_panel(f, head, power, panel_tol, max_sub), "origin panel");
    if (first > head) {
        smooth_stretch(acc, f, head, first, head, panel_tol, max_sub);
    }
    if (first >= cutoff) {
        return acc.value;
    }

    const double remaining_panels = (cutoff - first) / period;
    if (remaining_panels <= 64.0) {
        for (double lo = first; lo < cutoff; lo += period) {
            add_panel(acc, quad::integrate(f, lo, lo + period, panel_tol, 1e-13, max_sub),
                      "oscillation panel");
        }
        return acc.value;
    }

    // Long alternating tail: partial sums over half-periods, Wynn-accelerated.
    std::vector<double> sums{acc.value};
    double lo = first;
    double last_estimate = kInf;
    for (int m = 0; m < max_sub; ++m) {
        add_panel(acc, quad::integrate(f, lo, lo + period, panel_tol, 1e-13, max_sub),
                  "oscillation panel");
        lo += period;
        sums.push_back(acc.value);
        if (lo >= cutoff) {
            return acc.value;
        }
        if (sums.size() >= 8) {
            const std::size_t window = std::min<std::size_t>(sums.size(), 40);
            const auto ext =
                quad::wynn_epsilon(std::span<const double>(sums).last(window));
            if (ext.error < 0.1 * tol && std::fabs(ext.value - last_estimate) < 0.1 * tol) {
                return ext.value;
            }
            last_estimate = ext.value;
        }
    }
    throw ConvergenceError("oscillatory tail did not converge", std::fabs(acc.value - last_estimate));
}

Integrand make_integrand(const StableParams& p, double z, Kind kind) {
    const bool alpha_one = std::fabs(p.alpha - 1.0) < kAlphaOneThreshold;
    double skew = 0.0;
    if (p.beta != 0.0) {
        skew = alpha_one ? 2.0 * p.beta / kPi : p.beta * std::tan(0.5 * kPi * p.alpha);
    }
    return Integrand{alpha_one ? 1.0 : p.alpha, z, skew, alpha_one, kind};
}

bool tail_series_available(const StableParams& p) {
    return std::fabs(p.alpha - 1.0) >= kAlphaOneThreshold || p.beta == 0.0;
}

// Upper-tail series for x > 0; density selects the term-wise derivative.
double tail_series(double alpha, double beta, double x, bool density, double* error) {
    const double t = std::fabs(alpha - 1.0) < kAlphaOneThreshold ? 0.0
                                                                 : std::tan(0.5 * kPi * alpha);
    const double rho = std::sqrt(1.0 + beta * beta * t * t);
    const double theta = std::atan(beta * t);
    const double angle = 0.5 * kPi * alpha + theta;
    const double lx = std::log(x);
    const double lrho = std::log(rho);

    double sum = 0.0;
    double prev_env = kInf;
    double err = kInf;
    for (int n = 1; n <= 400; ++n) {
        const double na = n * alpha;
        const double log_env = std::lgamma(density ? na + 1.0 : na) - std::lgamma(n + 1.0) +
                               n * lrho - na * lx - (density ? lx : 0.0);
        const double env = std::exp(log_env) / kPi;
        if (n > 2 && env > prev_env) {
            err = prev_env;
            break;
        }
        const double s = std::sin(n * angle);
        sum += (n % 2 == 1 ? 1.0 : -1.0) * env * s;
        prev_env = env;
        if (env <= 1e-17 * std::fabs(sum) || env == 0.0) {
            err = env;
            break;
        }
    }
    if (error != nullptr) {
        *error = err;
    }
    return sum;
}

// Standardized value of the lower tail P(X < -|x|) or upper tail P(X > x).
bool try_tail(const StableParams& p, double z, bool density, const QuadratureSpec& q,
              double* out) {
    if (!tail_series_available(p) || std::fabs(z) <= q.max_abscissa) {
        return false;
    }
    double err = 0.0;
    const double b = z > 0.0 ? p.beta : -p.beta;
    const double v = tail_series(p.alpha, b, std::fabs(z), density, &err);
    if (!(err <= 0.1 * q.abs_tol) || !std::isfinite(v)) {
        return false;
    }
    *out = v;
    return true;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(max_abscissa > 0.0) || max_subdivisions < 1) {
        throw InvalidParameter(
            "parameter invariant violated: abs_tol > 0, max_abscissa > 0, max_subdivisions >= 1");
    }
}

double stable_tail_series(double alpha, double beta, double x, double* error) {
    if (x == 0.0) {
        throw InvalidParameter("parameter invariant violated: tail series needs x != 0");
    }
    StableParams p{alpha, beta, 1.0, 0.0};
    p.validate();
    if (!tail_series_available(p)) {
        throw InvalidParameter(
            "parameter invariant violated: no tail series for alpha == 1 with beta != 0");
    }
    return x > 0.0 ? tail_series(alpha, beta, x, false, error)
                   : tail_series(alpha, -beta, -x, false, error);
}

double stable_pdf(const StableParams& p, double x, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    const double z = (x - p.delta) / p.gamma;
    double value = 0.0;
    if (!try_tail(p, z, true, q, &value)) {
        value = inversion_integral(make_integrand(p, z, Kind::density), q) / kPi;
    }
    if (value < 0.0) {
        value = 0.0;  // quadrature noise; tolerance-level negatives only
    }
    return value / p.gamma;
}

double stable_cdf(const StableParams& p, double x, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    if (x == kInf) {
        return 1.0;
    }
    if (x == -kInf) {
        return 0.0;
    }
    const double z = (x - p.delta) / p.gamma;
    double value = 0.0;
    double tail = 0.0;
    if (try_tail(p, z, false, q, &tail)) {
        value = z < 0.0 ? tail : 1.0 - tail;
    } else {
        value = 0.5 + inversion_integral(make_integrand(p, z, Kind::distribution), q) / kPi;
    }
    return std::clamp(value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Mittag-Leffler

namespace {

constexpr double kCrossoverRelTol = 1e-8;
constexpr double kScanLimit = 120.0;

double reciprocal_gamma_term(double k, double alpha, double log_t, double* sign) {
    // 1/Gamma(1 - k a) = Gamma(k a) sin(pi k a) / pi
    const double ka = k * alpha;
    *sign = sin_pi(ka);
    return std::lgamma(ka) - ka * log_t;
}

}  // namespace

struct MittagLefflerSurvival::Impl {
    double alpha = 1.0;
    bool exponential = false;
    double crossover = kInf;
    std::vector<__float128> coef;  // 1 / Gamma(alpha n + 1)

    double series(double t, double* error) const {
        if (t == 0.0) {
            if (error) *error = 0.0;
            return 1.0;
        }
        const __float128 z = -powq(static_cast<__float128>(t), static_cast<__float128>(alpha));
        __float128 sum = 0;
        __float128 power = 1;
        __float128 max_term = 0;
        bool done = false;
        for (std::size_t n = 0; n < coef.size(); ++n) {
            const __float128 term = power * coef[n];
            sum += term;
            const __float128 mag = fabsq(term);
            max_term = std::max(max_term, mag);
            if (n > 4 && mag < static_cast<__float128>(1e-36) * fabsq(sum) && mag < max_term) {
                done = true;
                break;
            }
            power *= z;
        }
        const double value = static_cast<double>(sum);
        if (error) {
            *error = done ? static_cast<double>(max_term * static_cast<__float128>(1e-33)) + 1e-300 : kInf;
        }
        return value;
    }

    double asymptotic(double t, double* error) const {
        const double lt = std::log(t);
        double sum = 0.0;
        double prev = kInf;
        double err = kInf;
        for (int k = 1; k <= 400; ++k) {
            double s = 0.0;
            const double log_env = reciprocal_gamma_term(k, alpha, lt, &s);
            const double env = std::exp(log_env) / kPi;
            if (k > 1 && env > prev) {
                err = prev;
                break;
            }
            sum += (k % 2 == 1 ? 1.0 : -1.0) * env * s;
            prev = env;
            if (env <= 1e-18 * std::fabs(sum) || env == 0.0) {
                err = env;
                break;
            }
        }
        if (error) *error = err;
        return sum;
    }

    void build() {
        if (exponential) {
            return;
        }
        const std::size_t n_max =
            std::min<std::size_t>(40000, static_cast<std::size_t>(4.0 * kScanLimit / alpha) + 400);
        coef.resize(n_max);
        const __float128 a = alpha;
        for (std::size_t n = 0; n < n_max; ++n) {
            coef[n] = expq(-lgammaq(a * static_cast<__float128>(n) + 1));
        }
        // first t where the two routes agree; series stays exact below it
        for (double t = 0.25; t <= kScanLimit; t *= 1.02) {
            double se = 0.0;
            double ae = 0.0;
            const double s = series(t, &se);
            const double as = asymptotic(t, &ae);
            if (!(se <= 1e-3 * kCrossoverRelTol * std::fabs(s))) {
                break;
            }
            if (std::fabs(s - as) <= kCrossoverRelTol * std::fabs(s) &&
                ae <= kCrossoverRelTol * std::fabs(as)) {
                crossover = t;
                return;
            }
        }
        crossover = kInf;
    }

    double evaluate(double t, bool use_series) const {
        double err = 0.0;
        const double v = use_series ? series(t, &err) : asymptotic(t, &err);
        if (!(err <= kCrossoverRelTol * std::fabs(v))) {
            throw ConvergenceError(
                use_series ? "Mittag-Leffler series not convergent at this t"
                           : "Mittag-Leffler asymptotic expansion not accurate at this t",
                err);
        }
        return v;
    }
};

MittagLefflerSurvival::MittagLefflerSurvival(const MLParams& p) : impl_(std::make_unique<Impl>()) {
    p.validate();
    impl_->alpha = p.alpha;
    impl_->exponential = p.alpha == 1.0;
    impl_->build();
}

MittagLefflerSurvival::~MittagLefflerSurvival() = default;
MittagLefflerSurvival::MittagLefflerSurvival(MittagLefflerSurvival&&) noexcept = default;
MittagLefflerSurvival& MittagLefflerSurvival::operator=(MittagLefflerSurvival&&) noexcept = default;

double MittagLefflerSurvival::alpha() const noexcept { return impl_->alpha; }
double MittagLefflerSurvival::crossover() const noexcept { return impl_->crossover; }

double MittagLefflerSurvival::series(double t, double* error) const {
    if (impl_->exponential) {
        if (error) *error = 0.0;
        return std::exp(-t);
    }
    return impl_->series(t, error);
}

double MittagLefflerSurvival::asymptotic(double t, double* error) const {
    if (impl_->exponential) {
        if (error) *error = 0.0;
        return 0.0;
    }
    return impl_->asymptotic(t, error);
}

double MittagLefflerSurvival::survival(double t) const {
    if (!(t >= 0.0)) {
        throw InvalidParameter("parameter invariant violated: t >= 0");
    }
    if (t == 0.0) {
        return 1.0;
    }
    if (impl_->exponential) {
        return std::exp(-t);
    }
    if (t == kInf) {
        return 0.0;
    }
    return impl_->evaluate(t, t < impl_->crossover);
}

double MittagLefflerSurvival::density(double t) const {
    if (!(t > 0.0)) {
        throw InvalidParameter("parameter invariant violated: t > 0");
    }
    const double h = std::min(std::max(1e-6, 1e-6 * t), 0.5 * t);
    if (impl_->exponential) {
        return (std::exp(-(t - h)) - std::exp(-(t + h))) / (2.0 * h);
    }
    // both stencil points on the same route
    const bool use_series = t < impl_->crossover;
    return (impl_->evaluate(t - h, use_series) - impl_->evaluate(t + h, use_series)) / (2.0 * h);
}

namespace {

const MittagLefflerSurvival& cached_evaluator(double alpha) {
    static std::mutex mutex;
    static std::map<double, std::unique_ptr<MittagLefflerSurvival>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[alpha];
    if (!slot) {
        slot = std::make_unique<MittagLefflerSurvival>(MLParams{alpha});
    }
    return *slot;
}

}  // namespace

double ml_survival(const MLParams& p, double t) {
    p.validate();
    if (!(t >= 0.0)) {
        throw InvalidParameter("parameter invariant violated: t >= 0");
    }
    if (p.alpha == 1.0) {
        return std::exp(-t);
    }
    return cached_evaluator(p.alpha).survival(t);
}

double ml_pdf(const MLParams& p, double t) {
    p.validate();
    return cached_evaluator(p.alpha).density(t);
}

}  // namespace tailforge
