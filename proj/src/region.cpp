#include "tailforge/region.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace tailforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& what) {
    throw InvalidParameter("region invariant violated: " + what);
}

[[noreturn]] void syntax(std::string_view text, const std::string& what) {
    throw InvalidParameter("region expression '" + std::string(text) + "': " + what);
}

// Endpoints touch without overlapping only when at least one side is open.
bool disjoint_and_ordered(const Interval& a, const Interval& b) {
    if (a.upper.value < b.lower.value) {
        return true;
    }
    if (a.upper.value == b.lower.value && std::isfinite(a.upper.value)) {
        return !(a.upper.closed && b.lower.closed);
    }
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {
        for (char c : text) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                squeezed_.push_back(c);
            }
        }
    }

    std::vector<Interval> run() {
        std::vector<Interval> out;
        if (squeezed_.empty()) {
            syntax(text_, "empty expression");
        }
        while (true) {
            out.push_back(interval());
            if (pos_ == squeezed_.size()) {
                break;
            }
            if (squeezed_[pos_] != 'U' && squeezed_[pos_] != 'u') {
                syntax(text_, "expected 'U' between intervals");
            }
            ++pos_;
        }
        return out;
    }

private:
    Interval interval() {
        Interval iv{};
        iv.lower.closed = bracket("[(", '[');
        iv.lower.value = number();
        expect(',');
        iv.upper.value = number();
        iv.upper.closed = bracket("])", ']');
        if (std::isinf(iv.lower.value)) iv.lower.closed = false;
        if (std::isinf(iv.upper.value)) iv.upper.closed = false;
        return iv;
    }

    bool bracket(const char* allowed, char closed) {
        if (pos_ >= squeezed_.size() || (squeezed_[pos_] != allowed[0] && squeezed_[pos_] != allowed[1])) {
            syntax(text_, std::string("expected one of '") + allowed + "'");
        }
        return squeezed_[pos_++] == closed;
    }

    void expect(char c) {
        if (pos_ >= squeezed_.size() || squeezed_[pos_] != c) {
            syntax(text_, std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    double number() {
        std::size_t end = pos_;
        while (end < squeezed_.size() && squeezed_[end] != ',' && squeezed_[end] != ']' &&
               squeezed_[end] != ')') {
            ++end;
        }
        std::string token = squeezed_.substr(pos_, end - pos_);
        pos_ = end;
        if (token == "inf" || token == "+inf") return kInf;
        if (token == "-inf") return -kInf;
        double value = 0.0;
        const char* first = token.data();
        if (!token.empty() && token[0] == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() ||
            !std::isfinite(value)) {
            syntax(text_, "bad number '" + token + "'");
        }
        return value;
    }

    std::string_view text_;
    std::string squeezed_;
    std::size_t pos_ = 0;
};

std::string format_number(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

RegionSpec::RegionSpec(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) {
        fail("at least one interval");
    }
    for (auto& iv : intervals_) {
        if (std::isnan(iv.lower.value) || std::isnan(iv.upper.value)) {
            fail("endpoints are not NaN");
        }
        if (iv.lower.value == kInf || iv.upper.value == -kInf) {
            fail("lower endpoint < +inf and upper endpoint > -inf");
        }
        if (!(iv.lower.value < iv.upper.value)) {
            fail("lower < upper in every interval");
        }
        if (std::isinf(iv.lower.value)) iv.lower.closed = false;
        if (std::isinf(iv.upper.value)) iv.upper.closed = false;
    }
    for (std::size_t k = 1; k < intervals_.size(); ++k) {
        if (!disjoint_and_ordered(intervals_[k - 1], intervals_[k])) {
            fail("intervals sorted ascending and pairwise disjoint");
        }
    }
}

RegionSpec RegionSpec::below(double x, bool closed) {
    return RegionSpec({Interval{{-kInf, false}, {x, closed}}});
}

RegionSpec RegionSpec::above(double x, bool closed) {
    return RegionSpec({Interval{{x, closed}, {kInf, false}}});
}

RegionSpec RegionSpec::between(double lo, double hi) {
    return RegionSpec({Interval{{lo, true}, {hi, true}}});
}

RegionSpec RegionSpec::parse(std::string_view text) { return RegionSpec(Parser(text).run()); }

bool RegionSpec::covers_full_line() const noexcept {
    if (intervals_.front().lower.value != -kInf || intervals_.back().upper.value != kInf) {
        return false;
    }
    for (std::size_t k = 1; k < intervals_.size(); ++k) {
        const auto& a = intervals_[k - 1].upper;
        const auto& b = intervals_[k].lower;
        if (a.value != b.value || !(a.closed || b.closed)) {
            return false;
        }
    }
    return true;
}

std::string RegionSpec::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
        const auto& iv = intervals_[k];
        if (k > 0) out += " U ";
        out += iv.lower.closed ? '[' : '(';
        out += format_number(iv.lower.value);
        out += ',';
        out += format_number(iv.upper.value);
        out += iv.upper.closed ? ']' : ')';
    }
    return out;
}

bool RegionSpec::operator==(const RegionSpec& o) const {
    if (intervals_.size() != o.intervals_.size()) return false;
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
        const auto& a = intervals_[k];
        const auto& b = o.intervals_[k];
        if (a.lower.value != b.lower.value || a.lower.closed != b.lower.closed ||
            a.upper.value != b.upper.value || a.upper.closed != b.upper.closed) {
            return false;
        }
    }
    return true;
}

}  // namespace tailforge
