#pragma once

// Statistical checks used by the test suites and the `validate`/`bench`
// commands: Kolmogorov-Smirnov statistics, histograms with Poisson bands,
// rejection and throughput measurements, key=value reports.

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tailforge/region.hpp"
#include "tailforge/sampler.hpp"

namespace tailforge {

/// Asymptotic 1% critical coefficient of the Kolmogorov distribution.
inline constexpr double kKsCoefficient1pct = 1.628;

struct KsResult {
    std::size_t n = 0;
    std::size_t m = 0;  // second sample size; 0 for one-sample tests
    double d = 0.0;
    double critical_1pct = 0.0;
    bool pass = false;
};

using CdfFunction = std::function<double(double)>;

/// d = sup |F_n - F| over the sorted sample, critical value 1.628 / sqrt(n).
/// Throws std::invalid_argument for n < 10 or unsorted input.
KsResult ks_one_sample(std::span<const double> sorted, const CdfFunction& cdf);

/// Two-sample statistic with critical value 1.628 sqrt((n + m) / (n m)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// A CDF evaluated exactly at a set of nodes and linearly interpolated in
/// between; clamps to the end values outside the node range. Lets an
/// expensive oracle be used against 10^5-point samples.
class TabulatedCdf {
public:
    TabulatedCdf(std::vector<double> nodes, const CdfFunction& cdf);

    double operator()(double x) const;
    std::span<const double> nodes() const noexcept { return nodes_; }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
};

/// Every `stride`-th point of a sorted sample plus both ends, deduplicated.
std::vector<double> ks_nodes(std::span<const double> sorted, std::size_t stride = 25);

/// P(X <= x | X in region) from an unconditional CDF.
class ConditionalCdf {
public:
    ConditionalCdf(CdfFunction cdf, RegionSpec region);

    double operator()(double x) const;
    /// P(X in region) under the unconditional law.
    double mass() const noexcept { return mass_; }

private:
    double mass_below(double x) const;

    CdfFunction cdf_;
    RegionSpec region_;
    std::vector<double> lower_values_;  // cdf at each interval's lower end
    double mass_ = 0.0;
};

struct Histogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;    // sum of counts
    std::uint64_t outside = 0;  // samples beyond the outer edges, not in total
};

/// Bins samples into [edges[k], edges[k+1]) (last bin closed). Edges must be
/// strictly increasing, at least two.
Histogram make_histogram(std::span<const double> samples, std::vector<double> edges);

struct BandCheck {
    std::size_t bins = 0;
    std::size_t within = 0;
    double fraction = 0.0;
    bool pass = false;
};

/// Compares bin counts with the expectation from `cdf` renormalized to the
/// histogram range: a bin passes when |observed - expected| <= sigmas *
/// sqrt(expected). The check passes when at least `min_fraction` of bins do.
BandCheck poisson_band_check(const Histogram& h, const CdfFunction& cdf, double sigmas = 4.0,
                             double min_fraction = 0.95);

/// Emits n variates and returns rejects / (rejects + accepts + direct_accepts)
/// over that run.
template <UniformSource S>
double measure_rejection(ConditionalSampler<S>& s, std::uint64_t n) {
    if (n < 1000) {
        throw std::invalid_argument("measure_rejection: n must be >= 1000");
    }
    const SamplerCounters before = s.counters();
    for (std::uint64_t k = 0; k < n; ++k) {
        s();
    }
    const SamplerCounters& after = s.counters();
    const double rejects = static_cast<double>(after.rejects - before.rejects);
    const double emitted = static_cast<double>(after.emitted() - before.emitted());
    return rejects / (rejects + emitted);
}

/// Variates per second for n calls of `draw`. The results are summed into a
/// sink so the calls cannot be elided.
template <class Draw, class Clock = std::chrono::steady_clock>
double measure_throughput(Draw&& draw, std::uint64_t n) {
    volatile double sink = 0.0;
    double acc = 0.0;
    const auto start = Clock::now();
    for (std::uint64_t k = 0; k < n; ++k) {
        acc += draw();
    }
    const auto stop = Clock::now();
    sink = acc;
    (void)sink;
    const double seconds = std::chrono::duration<double>(stop - start).count();
    return static_cast<double>(n) / seconds;
}

/// Line-oriented key=value report. Checks record a name, a verdict and
/// free-form detail fields.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value);
    void check(const std::string& name, bool pass);

    bool all_pass() const noexcept { return failures_.empty(); }
    const std::vector<std::string>& failures() const noexcept { return failures_; }
    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> lines_;
    std::vector<std::string> failures_;
};

}  // namespace tailforge
