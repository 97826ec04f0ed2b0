#pragma once

#include <stdexcept>
#include <string>

namespace tailforge {

/// Thrown when a parameter record violates one of its invariants. The message
/// names the violated invariant.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of the alpha-stable family in the characteristic-function
/// parametrization: index alpha, skewness beta, scale gamma, location delta.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;

    /// Throws InvalidParameter unless 0 < alpha <= 2, |beta| <= 1, gamma > 0
    /// and all fields are finite.
    void validate() const;

    bool is_standard() const noexcept { return gamma == 1.0 && delta == 0.0; }
    bool operator==(const StableParams&) const = default;
};

/// One-parameter Mittag-Leffler waiting-time law of order alpha in (0, 1].
struct MLParams {
    double alpha = 1.0;

    void validate() const;
    bool operator==(const MLParams&) const = default;
};

/// A point strictly inside the unit square.
struct UnitPair {
    double u;
    double v;

    void validate() const;
};

std::string to_string(const StableParams& p);
std::string to_string(const MLParams& p);

}  // namespace tailforge
