#pragma once

// Reference evaluation of stable densities/CDFs and of the Mittag-Leffler
// survival function and density. Slow and accurate; used to validate samplers
// and tile tables, never on the sampling path.
//
// Stable law convention (alpha != 1):
//   log phi(k) = -gamma^alpha |k|^alpha (1 - i beta sign(k) tan(pi alpha / 2)) + i delta k
// and for alpha == 1 the usual (2/pi) beta log|k| term. Scale and location act
// affinely: X = gamma X_std + delta, matching the transform maps.

#include <memory>
#include <stdexcept>
#include <string>

#include "tailforge/params.hpp"

namespace tailforge {

/// Numerical integration failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

struct QuadratureSpec {
    /// Beyond |x| > max_abscissa (standardized) the asymptotic tail series is used.
    double max_abscissa = 100.0;
    double abs_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const;
};

/// Density via Fourier inversion (cosine transform when beta == 0).
double stable_pdf(const StableParams& p, double x, const QuadratureSpec& q = {});

/// P(X <= x) via the Gil-Pelaez inversion of the characteristic function
/// (the pdf integrated in closed form under the k integral), with the
/// power-law tail series beyond max_abscissa.
double stable_cdf(const StableParams& p, double x, const QuadratureSpec& q = {});

/// Asymptotic tail series for the standardized law:
///   P(X > x) ~ (1/pi) sum_n (-1)^(n+1) Gamma(n alpha)/n! rho^n sin(n(pi alpha/2 + theta)) x^(-n alpha)
/// with rho = sqrt(1 + beta^2 tan^2(pi alpha/2)), theta = atan(beta tan(pi alpha/2)).
/// x > 0 gives the upper tail; x < 0 the lower tail P(X < x). Optimally
/// truncated; `error` receives the magnitude of the first omitted term.
double stable_tail_series(double alpha, double beta, double x, double* error = nullptr);

/// Evaluator of E_alpha(-t^alpha) for a fixed order. Construction locates the
/// series/asymptotic crossover, so reuse an instance for many evaluations.
class MittagLefflerSurvival {
public:
    explicit MittagLefflerSurvival(const MLParams& p);
    ~MittagLefflerSurvival();
    MittagLefflerSurvival(MittagLefflerSurvival&&) noexcept;
    MittagLefflerSurvival& operator=(MittagLefflerSurvival&&) noexcept;

    double alpha() const noexcept;
    /// Where the evaluator switches from the power series to the asymptotic
    /// expansion (infinity for alpha == 1).
    double crossover() const noexcept;

    /// E_alpha(-t^alpha), t >= 0.
    double survival(double t) const;
    /// -d/dt E_alpha(-t^alpha) by central differences, t > 0.
    double density(double t) const;

    /// Direct access to the two routes, for cross-checking.
    double series(double t, double* error = nullptr) const;
    double asymptotic(double t, double* error = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// E_alpha(-t^alpha); exactly exp(-t) for alpha == 1. Evaluators are cached
/// per alpha.
double ml_survival(const MLParams& p, double t);

/// -d/dt E_alpha(-t^alpha) by central differences with step
/// h = max(1e-6, 1e-6 t) (capped at t/2).
double ml_pdf(const MLParams& p, double t);

}  // namespace tailforge
