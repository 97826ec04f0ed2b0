#pragma once

// Two-dimensional transform maps from the unit square to real variates.
//
// Stable:          X = F(u, v) with W = -ln u and Phi = pi (v - 1/2)
//   alpha != 1:    X = sin(alpha (Phi + Phi0)) / cos Phi
//                      * (W cos Phi / cos(Phi - alpha (Phi + Phi0)))^(1 - 1/alpha)
//                  Phi0 = (pi/2) beta (1 - |1 - alpha|) / alpha
//   alpha == 1:    X = (1 + 2 beta Phi / pi) tan Phi
//                      - (2/pi) beta ln(W cos Phi / (1 + 2 beta Phi / pi))
// Mittag-Leffler:  T = W (sin(alpha pi) / tan(alpha pi v) - cos(alpha pi))^(1/alpha)
//
// All trigonometric factors are evaluated through sin_pi / cos_pi so that
// cos Phi keeps full relative precision next to the v = 0 and v = 1 edges.

#include <cmath>
#include <numbers>
#include <optional>

#include "tailforge/params.hpp"

namespace tailforge {

/// sin(pi x), exact zeros at integers, full relative precision near them.
double sin_pi(double x) noexcept;
/// cos(pi x), exact zeros at half-integers.
double cos_pi(double x) noexcept;

/// |alpha - 1| below this selects the alpha == 1 branch of the stable map.
inline constexpr double kAlphaOneThreshold = 1e-8;

/// Standard stable map F(u, v). Requires p.gamma == 1 and p.delta == 0.
/// Returns std::nullopt on a singular evaluation (non-finite result).
std::optional<double> stable_transform(const StableParams& p, UnitPair pt);

/// Mittag-Leffler map M(u, v) >= 0, with the leading factor taken as -ln u.
std::optional<double> ml_transform(const MLParams& p, UnitPair pt);

/// gamma * x + delta.
inline double apply_scale_location(double x, const StableParams& p) noexcept {
    return p.gamma * x + p.delta;
}

/// The map above, for beta != 0 and alpha != 1, draws from the characteristic-
/// function family with different skewness and scale than the ones it is fed:
///   beta'  = tan(alpha Phi0) / tan(pi alpha / 2)
///   gamma' = gamma * cos(alpha Phi0)^(1/alpha)
/// This returns those realized parameters (identity when beta == 0 or alpha is
/// 1 or 2). See docs/parametrization.md.
StableParams realized_parameters(const StableParams& p);

enum class Family : unsigned char { stable = 0, mittag_leffler = 1 };

const char* to_string(Family f) noexcept;

/// A transform map bound to its parameters, with the per-call constants
/// precomputed. Stable maps include the scale/location step.
class TransformMap {
public:
    static TransformMap stable(const StableParams& p);
    static TransformMap mittag_leffler(const MLParams& p);

    Family family() const noexcept { return family_; }
    const StableParams& stable_params() const noexcept { return stable_; }
    const MLParams& ml_params() const noexcept { return ml_; }
    double alpha() const noexcept { return alpha_; }

    /// Unchecked evaluation for (u, v) in the open unit square.
    std::optional<double> operator()(double u, double v) const noexcept {
        const double x = raw(u, v);
        if (!std::isfinite(x)) {
            return std::nullopt;
        }
        return x;
    }

    /// As operator() but returns the raw double (possibly inf/nan).
    double raw(double u, double v) const noexcept {
        return family_ == Family::stable ? gamma_ * stable_raw(u, v) + delta_ : ml_raw(u, v);
    }

    bool operator==(const TransformMap& o) const noexcept {
        return family_ == o.family_ && stable_ == o.stable_ && ml_ == o.ml_;
    }

private:
    TransformMap() = default;

    double stable_raw(double u, double v) const noexcept;
    double ml_raw(double u, double v) const noexcept;

    Family family_ = Family::stable;
    StableParams stable_{};
    MLParams ml_{};
    double alpha_ = 2.0;
    double gamma_ = 1.0;
    double delta_ = 0.0;
    // stable
    bool alpha_one_ = false;
    double beta_ = 0.0;
    double phi0_over_pi_ = 0.0;
    double exponent_ = 0.5;
    // mittag-leffler
    double inv_alpha_ = 1.0;
    double one_minus_alpha_ = 0.0;
};

inline double TransformMap::stable_raw(double u, double v) const noexcept {
    const double w = -std::log(u);
    const double s = v - 0.5;  // Phi / pi
    const double cos_phi = v <= 0.5 ? sin_pi(v) : sin_pi(1.0 - v);
    if (alpha_one_) {
        const double lin = 1.0 + 2.0 * beta_ * s;
        const double tan_phi = sin_pi(s) / cos_phi;
        return lin * tan_phi -
               (2.0 / std::numbers::pi) * beta_ * std::log(w * cos_phi / lin);
    }
    const double shifted = s + phi0_over_pi_;
    const double num = sin_pi(alpha_ * shifted);
    const double den = cos_pi(s - alpha_ * shifted);
    return num / cos_phi * std::pow(w * cos_phi / den, exponent_);
}

inline double TransformMap::ml_raw(double u, double v) const noexcept {
    const double w = -std::log(u);
    // sin(a pi) / tan(a pi v) - cos(a pi) == sin(a pi (1 - v)) / sin(a pi v)
    const double upper = v >= 0.5 ? sin_pi(alpha_ * (1.0 - v))
                                   : sin_pi(one_minus_alpha_ + alpha_ * v);
    const double lower = sin_pi(alpha_ * v);
    return w * std::pow(upper / lower, inv_alpha_);
}

}  // namespace tailforge
