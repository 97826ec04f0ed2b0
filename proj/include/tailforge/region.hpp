#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailforge/params.hpp"

namespace tailforge {

struct Endpoint {
    double value;
    bool closed;  // ignored for infinite values
};

/// One interval of the extended real line.
struct Interval {
    Endpoint lower;
    Endpoint upper;

    bool contains(double x) const noexcept {
        const bool above = lower.closed ? x >= lower.value : x > lower.value;
        const bool below = upper.closed ? x <= upper.value : x < upper.value;
        return above && below;
    }
};

/// Ordered union of disjoint intervals: the condition a variate must satisfy.
class RegionSpec {
public:
    /// Validates: nonempty, each interval nondegenerate (lower < upper),
    /// sorted ascending, pairwise disjoint. Throws InvalidParameter.
    explicit RegionSpec(std::vector<Interval> intervals);

    static RegionSpec below(double x, bool closed = true);  // (-inf, x]
    static RegionSpec above(double x, bool closed = true);  // [x, inf)
    static RegionSpec between(double lo, double hi);        // [lo, hi]

    /// Parses e.g. "(-inf,-12]", "[-0.5, 0.5]", "(-inf,-1] U [1,inf)".
    static RegionSpec parse(std::string_view text);

    bool contains(double x) const noexcept {
        for (const auto& iv : intervals_) {
            if (iv.contains(x)) {
                return true;
            }
        }
        return false;
    }

    /// Which piece of the line x falls in: 2k + 1 inside interval k, 2k in
    /// the gap just below interval k (2n above the last one). Two points with
    /// different components are separated by a region boundary.
    std::size_t component(double x) const noexcept {
        std::size_t below = 0;
        for (const auto& iv : intervals_) {
            if (iv.contains(x)) {
                return 2 * below + 1;
            }
            if (iv.lower.value < x) {
                ++below;
            }
        }
        return 2 * below;
    }

    std::span<const Interval> intervals() const noexcept { return intervals_; }

    /// True when the union is the whole real line (tiling keeps the full square).
    bool covers_full_line() const noexcept;

    /// Canonical textual form accepted by parse().
    std::string to_string() const;

    bool operator==(const RegionSpec&) const;

private:
    std::vector<Interval> intervals_;
};

}  // namespace tailforge
