#include "tailforge/transforms.hpp"

#include <limits>

namespace tailforge {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi r) for r in [0, 1].
double sin_pi_unit(double r) noexcept {
    if (r <= 0.25) {
        return std::sin(kPi * r);
    }
    if (r <= 0.75) {
        return std::cos(kPi * (r - 0.5));
    }
    return std::sin(kPi * (1.0 - r));
}

}  // namespace

double sin_pi(double x) noexcept {
    if (!std::isfinite(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const bool negative = x < 0.0;
    double r = std::fmod(std::fabs(x), 2.0);
    double sign = negative ? -1.0 : 1.0;
    if (r >= 1.0) {
        r -= 1.0;
        sign = -sign;
    }
    const double s = sin_pi_unit(r);
    return s == 0.0 ? 0.0 : sign * s;
}

double cos_pi(double x) noexcept {
    if (!std::isfinite(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double r = std::fmod(std::fabs(x), 2.0);
    if (r > 1.0) {
        r = 2.0 - r;
    }
    if (r <= 0.25) {
        return std::cos(kPi * r);
    }
    if (r <= 0.75) {
        return std::sin(kPi * (0.5 - r));
    }
    return -std::cos(kPi * (1.0 - r));
}

std::optional<double> stable_transform(const StableParams& p, UnitPair pt) {
    p.validate();
    pt.validate();
    if (!p.is_standard()) {
        throw InvalidParameter(
            "parameter invariant violated: stable_transform requires gamma == 1 and delta == 0");
    }
    return TransformMap::stable(p)(pt.u, pt.v);
}

std::optional<double> ml_transform(const MLParams& p, UnitPair pt) {
    p.validate();
    pt.validate();
    return TransformMap::mittag_leffler(p)(pt.u, pt.v);
}

StableParams realized_parameters(const StableParams& p) {
    p.validate();
    if (p.beta == 0.0 || std::fabs(p.alpha - 1.0) < kAlphaOneThreshold || p.alpha == 2.0) {
        return p;
    }
    const double a = p.alpha;
    const double theta = 0.5 * kPi * p.beta * (1.0 - std::fabs(1.0 - a));  // alpha * Phi0
    StableParams out = p;
    out.beta = std::tan(theta) / std::tan(0.5 * kPi * a);
    out.gamma = p.gamma * std::pow(std::cos(theta), 1.0 / a);
    return out;
}

const char* to_string(Family f) noexcept {
    return f == Family::stable ? "stable" : "ml";
}

TransformMap TransformMap::stable(const StableParams& p) {
    p.validate();
    TransformMap m;
    m.family_ = Family::stable;
    m.stable_ = p;
    m.alpha_ = p.alpha;
    m.gamma_ = p.gamma;
    m.delta_ = p.delta;
    m.beta_ = p.beta;
    m.alpha_one_ = std::fabs(p.alpha - 1.0) < kAlphaOneThreshold;
    m.phi0_over_pi_ = 0.5 * p.beta * (1.0 - std::fabs(1.0 - p.alpha)) / p.alpha;
    m.exponent_ = 1.0 - 1.0 / p.alpha;
    return m;
}

TransformMap TransformMap::mittag_leffler(const MLParams& p) {
    p.validate();
    TransformMap m;
    m.family_ = Family::mittag_leffler;
    m.ml_ = p;
    m.alpha_ = p.alpha;
    m.inv_alpha_ = 1.0 / p.alpha;
    m.one_minus_alpha_ = 1.0 - p.alpha;
    return m;
}

}  // namespace tailforge
