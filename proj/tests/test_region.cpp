#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "tailforge/region.hpp"

using namespace tailforge;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("region") {
    TEST_CASE("grammar examples") {
        const auto tail = RegionSpec::parse("(-inf,-12]");
        REQUIRE(tail.intervals().size() == 1);
        CHECK(tail.intervals()[0].lower.value == -kInf);
        CHECK(tail.intervals()[0].upper.value == -12.0);
        CHECK(tail.intervals()[0].upper.closed);
        CHECK(tail.contains(-12.0));
        CHECK_FALSE(tail.contains(-11.999));
        CHECK(tail.contains(-1e300));
        CHECK(tail == RegionSpec::below(-12.0));

        const auto mid = RegionSpec::parse("[-0.5, 0.5]");
        CHECK(mid == RegionSpec::between(-0.5, 0.5));
        CHECK(mid.contains(0.5));
        CHECK_FALSE(mid.contains(0.5000001));

        const auto both = RegionSpec::parse("(-inf,-1] U [1,inf)");
        REQUIRE(both.intervals().size() == 2);
        CHECK(both.contains(-1.0));
        CHECK(both.contains(3.0));
        CHECK_FALSE(both.contains(0.0));
        CHECK(both == RegionSpec::parse("  ( -inf , -1 ]u[ 1 , +inf )  "));
    }

    TEST_CASE("open and closed markers") {
        const auto r = RegionSpec::parse("(0,1)");
        CHECK_FALSE(r.contains(0.0));
        CHECK_FALSE(r.contains(1.0));
        CHECK(r.contains(0.5));
        const auto half = RegionSpec::parse("[0,1)");
        CHECK(half.contains(0.0));
        CHECK_FALSE(half.contains(1.0));
        CHECK(RegionSpec::above(3.0, false) == RegionSpec::parse("(3,inf)"));
        // an infinite endpoint is always open
        CHECK(RegionSpec::parse("[-inf,2]") == RegionSpec::parse("(-inf,2]"));
        CHECK_FALSE(RegionSpec::below(0.0).contains(std::nan("")));
    }

    TEST_CASE("to_string round trip") {
        for (const char* text : {"(-inf,-12]", "[-0.5,0.5]", "(-inf,-1] U [1,inf)", "(0.1,0.30000000000000004)",
                                 "[1e-300,2] U (2,3)"}) {
            const auto r = RegionSpec::parse(text);
            CHECK(RegionSpec::parse(r.to_string()) == r);
        }
        CHECK(RegionSpec::parse("(-inf,-12]").to_string() == "(-inf,-12]");
        CHECK(RegionSpec::parse("(-inf,-1]U[1,inf)").to_string() == "(-inf,-1] U [1,inf)");
    }

    TEST_CASE("components separate the pieces of the line") {
        const auto r = RegionSpec::parse("(-inf,-1] U [1,2) U (2,3]");
        CHECK(r.component(-5.0) == 1);
        CHECK(r.component(-1.0) == 1);
        CHECK(r.component(0.0) == 2);
        CHECK(r.component(1.0) == 3);
        CHECK(r.component(2.0) == 4);
        CHECK(r.component(2.5) == 5);
        CHECK(r.component(3.0) == 5);
        CHECK(r.component(3.5) == 6);
        const auto band = RegionSpec::between(3.0, 4.0);
        CHECK(band.component(2.0) == 0);
        CHECK(band.component(3.5) == 1);
        CHECK(band.component(9.0) == 2);
        for (double x : {-5.0, 0.0, 1.5, 2.0, 3.0, 7.0}) {
            CHECK((r.component(x) % 2 == 1) == r.contains(x));
        }
    }

    TEST_CASE("full line detection") {
        CHECK(RegionSpec::parse("(-inf,inf)").covers_full_line());
        CHECK(RegionSpec::parse("(-inf,0] U (0,inf)").covers_full_line());
        CHECK(RegionSpec::parse("(-inf,0) U [0,inf)").covers_full_line());
        CHECK_FALSE(RegionSpec::parse("(-inf,0) U (0,inf)").covers_full_line());
        CHECK_FALSE(RegionSpec::parse("(-inf,0]").covers_full_line());
    }

    TEST_CASE("invariant violations name the invariant") {
        auto message = [](const char* text) {
            try {
                (void)RegionSpec::parse(text);
            } catch (const InvalidParameter& e) {
                return std::string(e.what());
            }
            return std::string();
        };
        CHECK(message("[2,1]").find("lower < upper") != std::string::npos);
        CHECK(message("[1,1]").find("lower < upper") != std::string::npos);
        CHECK(message("[0,2] U [1,3]").find("disjoint") != std::string::npos);
        CHECK(message("[2,3] U [0,1]").find("sorted") != std::string::npos);
        CHECK(message("[0,1] U [1,2]").find("disjoint") != std::string::npos);
        CHECK(message("[0,1) U [1,2]").empty());
        CHECK(message("(inf,inf)").find("region invariant violated") != std::string::npos);
        CHECK_THROWS_AS(RegionSpec(std::vector<Interval>{}), InvalidParameter);
    }

    TEST_CASE("syntax errors") {
        for (const char* text : {"", "   ", "[0,1", "0,1]", "[0;1]", "[a,1]", "[0,1] [2,3]", "[0,1] V [2,3]",
                                 "[0,1] U", "[nan,1]", "[1e999,2]", "[,1]"}) {
            INFO("text='" << text << "'");
            CHECK_THROWS_AS(RegionSpec::parse(text), InvalidParameter);
        }
    }
}
