#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

#include "tailforge/table_io.hpp"

using namespace tailforge;

namespace {

std::string serialize(const TileTable& t) {
    std::ostringstream out(std::ios::binary);
    write_table(t, out);
    return out.str();
}

TileTable deserialize(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_table(in);
}

void check_equal(const TileTable& a, const TileTable& b) {
    CHECK(a.map == b.map);
    CHECK(a.region == b.region);
    CHECK(a.level_u == b.level_u);
    CHECK(a.level_v == b.level_v);
    CHECK(a.tiles == b.tiles);
    CHECK(a.est_rejection == b.est_rejection);
    CHECK(a.target_rejection == b.target_rejection);
    CHECK(a.converged == b.converged);
}

}  // namespace

TEST_SUITE("table_io") {
    TEST_CASE("round trip preserves every field") {
        const auto stable = build_tile_table(TransformMap::stable(StableParams{1.5, -0.25, 2.0, 0.5}),
                                             RegionSpec::parse("(-inf,-3] U [1,4)"));
        check_equal(stable, deserialize(serialize(stable)));

        const auto ml = build_tile_table(TransformMap::mittag_leffler(MLParams{0.9}), RegionSpec::above(10.0));
        check_equal(ml, deserialize(serialize(ml)));

        TilerOptions opts;
        opts.max_level = 3;
        const auto rough = build_tile_table(TransformMap::stable(StableParams{1.8, 0, 1, 0}),
                                            RegionSpec::below(-12.0), opts);
        REQUIRE_FALSE(rough.converged);
        check_equal(rough, deserialize(serialize(rough)));
    }

    TEST_CASE("layout starts with the magic and version") {
        const auto t = build_tile_table(TransformMap::stable(StableParams{2.0, 0, 1, 0}), RegionSpec::below(0.0));
        const std::string bytes = serialize(t);
        REQUIRE(bytes.size() > 8);
        CHECK(bytes.substr(0, 4) == "TFTB");
        CHECK(static_cast<unsigned char>(bytes[4]) == kTableFormatVersion);
        CHECK(bytes[5] == 0);
        CHECK(bytes[8] == 0);  // family: stable
        double alpha = 0.0;
        std::memcpy(&alpha, bytes.data() + 9, 8);
        CHECK(alpha == 2.0);
        CHECK(serialize(deserialize(bytes)) == bytes);
    }

    TEST_CASE("corruption is detected") {
        const auto t = build_tile_table(TransformMap::stable(StableParams{1.8, 0, 1, 0}), RegionSpec::below(-1.0));
        const std::string good = serialize(t);

        std::string flipped = good;
        flipped[good.size() / 2] ^= 0x10;
        CHECK_THROWS_AS(deserialize(flipped), TableFormatError);

        std::string magic = good;
        magic[0] = 'X';
        CHECK_THROWS_AS(deserialize(magic), TableFormatError);

        std::string version = good;
        version[4] = 9;
        CHECK_THROWS_AS(deserialize(version), TableFormatError);

        CHECK_THROWS_AS(deserialize(good.substr(0, good.size() - 3)), TableFormatError);
        CHECK_THROWS_AS(deserialize(good.substr(0, 20)), TableFormatError);
        CHECK_THROWS_AS(deserialize(good + "x"), TableFormatError);
        CHECK_THROWS_AS(deserialize(""), TableFormatError);
    }

    TEST_CASE("save and load through a file") {
        const auto dir = std::filesystem::temp_directory_path() / "tailforge_table_io_test";
        std::filesystem::create_directories(dir);
        const auto path = dir / "t.tftb";
        const auto t = build_tile_table(TransformMap::stable(StableParams{0.8, 0, 1, 0}), RegionSpec::below(-3.0));
        save_table(t, path);
        check_equal(t, load_table(path));
        CHECK_THROWS_AS(load_table(dir / "missing.tftb"), TableFormatError);
        std::filesystem::remove_all(dir);
    }
}
