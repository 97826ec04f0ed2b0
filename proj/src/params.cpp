#include "tailforge/params.hpp"

#include <cmath>
#include <cstdio>

namespace tailforge {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) {
        throw InvalidParameter(std::string("parameter invariant violated: ") + invariant);
    }
}

}  // namespace

void StableParams::validate() const {
    require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) &&
                std::isfinite(delta),
            "all stable parameters finite");
    require(alpha > 0.0 && alpha <= 2.0, "0 < alpha <= 2");
    require(beta >= -1.0 && beta <= 1.0, "-1 <= beta <= 1");
    require(gamma > 0.0, "gamma > 0");
}

void MLParams::validate() const {
    require(std::isfinite(alpha), "alpha finite");
    require(alpha > 0.0 && alpha <= 1.0, "0 < alpha <= 1");
}

void UnitPair::validate() const {
    require(u > 0.0 && u < 1.0, "0 < u < 1");
    require(v > 0.0 && v < 1.0, "0 < v < 1");
}

std::string to_string(const StableParams& p) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "alpha=%.17g beta=%.17g gamma=%.17g delta=%.17g", p.alpha,
                  p.beta, p.gamma, p.delta);
    return buf;
}

std::string to_string(const MLParams& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "alpha=%.17g", p.alpha);
    return buf;
}

}  // namespace tailforge
