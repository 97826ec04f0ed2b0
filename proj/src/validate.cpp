#include "tailforge/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tailforge {

namespace {

void require_sample(std::span<const double> s, const char* what) {
    if (s.size() < 10) {
        throw std::invalid_argument(std::string(what) + ": need at least 10 samples");
    }
    if (!std::is_sorted(s.begin(), s.end())) {
        throw std::invalid_argument(std::string(what) + ": samples must be sorted ascending");
    }
    if (std::any_of(s.begin(), s.end(), [](double x) { return std::isnan(x); })) {
        throw std::invalid_argument(std::string(what) + ": NaN in sample");
    }
}

double cdf_at(const CdfFunction& cdf, double x) {
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    return cdf(x);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

KsResult ks_one_sample(std::span<const double> sorted, const CdfFunction& cdf) {
    require_sample(sorted, "ks_one_sample");
    const auto n = sorted.size();
    const double dn = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = cdf(sorted[k]);
        d = std::max({d, static_cast<double>(k + 1) / dn - f, f - static_cast<double>(k) / dn});
    }
    KsResult r;
    r.n = n;
    r.d = std::clamp(d, 0.0, 1.0);
    r.critical_1pct = kKsCoefficient1pct / std::sqrt(dn);
    r.pass = r.d < r.critical_1pct;
    return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    require_sample(a, "ks_two_sample");
    require_sample(b, "ks_two_sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.n = a.size();
    r.m = b.size();
    r.d = d;
    r.critical_1pct = kKsCoefficient1pct * std::sqrt((na + nb) / (na * nb));
    r.pass = r.d < r.critical_1pct;
    return r;
}

TabulatedCdf::TabulatedCdf(std::vector<double> nodes, const CdfFunction& cdf) : nodes_(std::move(nodes)) {
    if (nodes_.empty() || !std::is_sorted(nodes_.begin(), nodes_.end()) ||
        std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
        throw std::invalid_argument("TabulatedCdf: nodes must be nonempty, sorted and distinct");
    }
    values_.reserve(nodes_.size());
    for (double x : nodes_) {
        values_.push_back(cdf_at(cdf, x));
    }
}

double TabulatedCdf::operator()(double x) const {
    if (x <= nodes_.front()) return values_.front();
    if (x >= nodes_.back()) return values_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::vector<double> ks_nodes(std::span<const double> sorted, std::size_t stride) {
    if (stride == 0) {
        throw std::invalid_argument("ks_nodes: stride must be >= 1");
    }
    std::vector<double> nodes;
    for (std::size_t k = 0; k < sorted.size(); k += stride) {
        nodes.push_back(sorted[k]);
    }
    if (!sorted.empty()) {
        nodes.push_back(sorted.back());
    }
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

ConditionalCdf::ConditionalCdf(CdfFunction cdf, RegionSpec region)
    : cdf_(std::move(cdf)), region_(std::move(region)) {
    for (const Interval& iv : region_.intervals()) {
        const double lo = cdf_at(cdf_, iv.lower.value);
        lower_values_.push_back(lo);
        mass_ += std::max(0.0, cdf_at(cdf_, iv.upper.value) - lo);
    }
    if (!(mass_ > 0.0)) {
        throw std::invalid_argument("ConditionalCdf: region " + region_.to_string() + " has zero mass");
    }
}

double ConditionalCdf::mass_below(double x) const {
    double total = 0.0;
    const auto ivs = region_.intervals();
    for (std::size_t k = 0; k < ivs.size(); ++k) {
        if (x <= ivs[k].lower.value) {
            break;
        }
        const double top = std::min(x, ivs[k].upper.value);
        total += std::max(0.0, cdf_at(cdf_, top) - lower_values_[k]);
    }
    return total;
}

double ConditionalCdf::operator()(double x) const { return std::clamp(mass_below(x) / mass_, 0.0, 1.0); }

Histogram make_histogram(std::span<const double> samples, std::vector<double> edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("make_histogram: need at least two edges");
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (!(edges[k - 1] < edges[k])) {
            throw std::invalid_argument("make_histogram: edges must be strictly increasing");
        }
    }
    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (double x : samples) {
        if (!(x >= h.edges.front() && x <= h.edges.back())) {
            ++h.outside;
            continue;
        }
        auto k = static_cast<std::size_t>(std::upper_bound(h.edges.begin(), h.edges.end(), x) - h.edges.begin());
        k = std::min(k, h.edges.size() - 1);  // x == last edge
        ++h.counts[k - 1];
        ++h.total;
    }
    return h;
}

BandCheck poisson_band_check(const Histogram& h, const CdfFunction& cdf, double sigmas, double min_fraction) {
    BandCheck out;
    out.bins = h.counts.size();
    const double f0 = cdf_at(cdf, h.edges.front());
    const double span = cdf_at(cdf, h.edges.back()) - f0;
    if (!(span > 0.0)) {
        throw std::invalid_argument("poisson_band_check: model has no mass over the histogram range");
    }
    double prev = f0;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        const double next = cdf_at(cdf, h.edges[k + 1]);
        const double expected = static_cast<double>(h.total) * (next - prev) / span;
        prev = next;
        const double diff = std::fabs(static_cast<double>(h.counts[k]) - expected);
        // a bin expecting almost nothing passes while it stays almost empty
        if (diff <= sigmas * std::sqrt(std::max(expected, 1.0))) {
            ++out.within;
        }
    }
    out.fraction = out.bins == 0 ? 0.0 : static_cast<double>(out.within) / static_cast<double>(out.bins);
    out.pass = out.fraction >= min_fraction;
    return out;
}

void Report::set(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }

void Report::set(const std::string& key, double value) { set(key, format_double(value)); }

void Report::set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

void Report::check(const std::string& name, bool pass) {
    set(name, std::string(pass ? "pass" : "fail"));
    if (!pass) {
        failures_.push_back(name);
    }
}

std::string Report::str() const {
    std::string out;
    for (const auto& [k, v] : lines_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    out += "result=";
    out += all_pass() ? "pass" : "fail";
    out += '\n';
    if (!failures_.empty()) {
        out += "failed=";
        for (std::size_t k = 0; k < failures_.size(); ++k) {
            if (k > 0) out += ',';
            out += failures_[k];
        }
        out += '\n';
    }
    return out;
}

}  // namespace tailforge
