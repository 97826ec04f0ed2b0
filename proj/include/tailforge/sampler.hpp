#pragma once

// Production loop: pick a kept tile uniformly, draw a point inside it, emit the
// mapped value directly for tiles inside the region and test it otherwise.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "tailforge/rng.hpp"
#include "tailforge/tiler.hpp"
#include "tailforge/transforms.hpp"

namespace tailforge {

/// Too many consecutive candidates failed; the table cannot feed the region.
class StarvationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultRetryCap = 1'000'000;

/// Event counts since construction. Each candidate ends in exactly one of
/// accepts, rejects, direct_accepts or singular_redraws (a non-finite value
/// drawn from a direct-acceptance tile).
struct SamplerCounters {
    std::uint64_t draws = 0;
    std::uint64_t accepts = 0;
    std::uint64_t rejects = 0;
    std::uint64_t direct_accepts = 0;
    std::uint64_t singular_redraws = 0;

    std::uint64_t emitted() const noexcept { return accepts + direct_accepts; }
    std::uint64_t tests() const noexcept { return accepts + rejects; }
    bool operator==(const SamplerCounters&) const = default;
};

struct SamplerOptions {
    std::uint64_t retry_cap = kDefaultRetryCap;
    /// Also test direct accepts and throw std::logic_error on a violation.
    /// Off in production: skipping that test is what direct acceptance buys.
    bool verify_direct_accepts = false;
};

/// Draws from the parent law conditioned on the table's region. Single owner;
/// the table is shared read-only and must outlive the sampler.
template <UniformSource S>
class ConditionalSampler {
public:
    ConditionalSampler(const TileTable& table, S src, SamplerOptions options = {})
        : table_(&table), index_(table), src_(std::move(src)), options_(options) {
        if (options_.retry_cap == 0) {
            throw InvalidParameter("parameter invariant violated: retry_cap >= 1");
        }
    }

    double operator()() {
        const TileTable& t = *table_;
        for (std::uint64_t streak = 0; streak < options_.retry_cap; ++streak) {
            ++counters_.draws;
            const auto tile = index_.locate(next_u64(src_));
            const double u = cell_coordinate(tile.i, t.level_u, src_.next_unit());
            const double v = cell_coordinate(tile.j, t.level_v, src_.next_unit());
            const double x = t.map.raw(u, v);
            if (!tile.intersected) {
                if (std::isfinite(x)) {
                    if (options_.verify_direct_accepts && !t.region.contains(x)) {
                        throw std::logic_error("direct accept outside region: x=" + std::to_string(x));
                    }
                    ++counters_.direct_accepts;
                    return x;
                }
                ++counters_.singular_redraws;
            } else if (std::isfinite(x) && t.region.contains(x)) {
                ++counters_.accepts;
                return x;
            } else {
                ++counters_.rejects;
            }
        }
        throw StarvationError("no candidate in region " + t.region.to_string() + " after " +
                              std::to_string(options_.retry_cap) + " consecutive draws");
    }

    const SamplerCounters& counters() const noexcept { return counters_; }
    const TileTable& table() const noexcept { return *table_; }
    S& source() noexcept { return src_; }

private:
    const TileTable* table_;
    TileIndex index_;
    S src_;
    SamplerOptions options_;
    SamplerCounters counters_;
};

template <UniformSource S>
double sample_conditional(ConditionalSampler<S>& s) {
    return s();
}

/// Conditional draw for a table built over one bounded interval [x1, x2].
template <UniformSource S>
double sample_interval(ConditionalSampler<S>& s) {
    const auto ivs = s.table().region.intervals();
    if (ivs.size() != 1 || !std::isfinite(ivs[0].lower.value) || !std::isfinite(ivs[0].upper.value)) {
        throw InvalidParameter("sample_interval needs a table over a single bounded interval, got " +
                               s.table().region.to_string());
    }
    return s();
}

/// Plain transform sampling: two uniforms per candidate, redraw on a
/// singular evaluation.
template <UniformSource S>
class UnconditionalSampler {
public:
    UnconditionalSampler(TransformMap map, S src, std::uint64_t retry_cap = kDefaultRetryCap)
        : map_(std::move(map)), src_(std::move(src)), retry_cap_(retry_cap) {}

    double operator()() {
        for (std::uint64_t k = 0; k < retry_cap_; ++k) {
            const double u = src_.next_unit();
            const double v = src_.next_unit();
            const double x = map_.raw(u, v);
            if (std::isfinite(x)) {
                return x;
            }
            ++singular_retries_;
        }
        throw StarvationError("transform singular on " + std::to_string(retry_cap_) + " consecutive draws");
    }

    std::uint64_t singular_retries() const noexcept { return singular_retries_; }
    const TransformMap& map() const noexcept { return map_; }
    S& source() noexcept { return src_; }

private:
    TransformMap map_;
    S src_;
    std::uint64_t retry_cap_;
    std::uint64_t singular_retries_ = 0;
};

template <UniformSource S>
double sample_unconditional(const TransformMap& map, S& src) {
    for (std::uint64_t k = 0; k < kDefaultRetryCap; ++k) {
        const double u = src.next_unit();
        const double v = src.next_unit();
        const auto x = map(u, v);
        if (x) {
            return *x;
        }
    }
    throw StarvationError("transform singular on every draw");
}

/// Baseline for speed comparisons: unconditional draws until one lands in the
/// region.
template <UniformSource S>
class NaiveConditionalSampler {
public:
    NaiveConditionalSampler(TransformMap map, RegionSpec region, S src,
                            std::uint64_t retry_cap = 1'000'000'000)
        : inner_(std::move(map), std::move(src)), region_(std::move(region)), retry_cap_(retry_cap) {}

    double operator()() {
        for (std::uint64_t k = 0; k < retry_cap_; ++k) {
            ++draws_;
            const double x = inner_();
            if (region_.contains(x)) {
                return x;
            }
        }
        throw StarvationError("naive sampler found nothing in " + region_.to_string());
    }

    std::uint64_t draws() const noexcept { return draws_; }

private:
    UnconditionalSampler<S> inner_;
    RegionSpec region_;
    std::uint64_t retry_cap_;
    std::uint64_t draws_ = 0;
};

}  // namespace tailforge
