#include "tailforge/table_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tailforge {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'T', 'B'};
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) buf_.push_back(static_cast<unsigned char>(v >> (8 * k)));
    }
    void u64(std::uint64_t v) {
        for (int k = 0; k < 8; ++k) buf_.push_back(static_cast<unsigned char>(v >> (8 * k)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    const std::vector<unsigned char>& data() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    explicit Reader(std::vector<unsigned char> buf) : buf_(std::move(buf)) {}

    void need(std::size_t n) const {
        if (buf_.size() - pos_ < n) {
            throw TableFormatError("table file truncated at byte " + std::to_string(pos_));
        }
    }
    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::uint32_t{buf_[pos_++]} << (8 * k);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= std::uint64_t{buf_[pos_++]} << (8 * k);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool flag() {
        const std::uint8_t b = u8();
        if (b > 1) throw TableFormatError("boolean field holds " + std::to_string(b));
        return b == 1;
    }

    std::size_t pos() const { return pos_; }
    std::size_t size() const { return buf_.size(); }
    const unsigned char* data() const { return buf_.data(); }

private:
    std::vector<unsigned char> buf_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a(const unsigned char* p, std::size_t n) {
    std::uint64_t h = kFnvOffset;
    for (std::size_t k = 0; k < n; ++k) {
        h ^= p[k];
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

void write_table(const TileTable& table, std::ostream& out) {
    Writer w;
    w.bytes(kMagic, 4);
    w.u32(kTableFormatVersion);
    w.u8(static_cast<std::uint8_t>(table.map.family()));
    if (table.map.family() == Family::stable) {
        const StableParams& p = table.map.stable_params();
        w.f64(p.alpha);
        w.f64(p.beta);
        w.f64(p.gamma);
        w.f64(p.delta);
    } else {
        w.f64(table.map.ml_params().alpha);
        w.f64(0.0);
        w.f64(1.0);
        w.f64(0.0);
    }
    w.i32(table.level_u);
    w.i32(table.level_v);
    w.f64(table.est_rejection);
    w.f64(table.target_rejection);
    w.u8(table.converged ? 1 : 0);
    const auto ivs = table.region.intervals();
    w.u32(static_cast<std::uint32_t>(ivs.size()));
    for (const Interval& iv : ivs) {
        w.f64(iv.lower.value);
        w.u8(iv.lower.closed ? 1 : 0);
        w.f64(iv.upper.value);
        w.u8(iv.upper.closed ? 1 : 0);
    }
    w.u64(table.tiles.size());
    for (const Tile& t : table.tiles) {
        w.u32(t.i);
        w.u32(t.j);
        w.u8(t.intersected ? 1 : 0);
    }
    const std::uint64_t sum = fnv1a(w.data().data(), w.data().size());
    w.u64(sum);
    out.write(reinterpret_cast<const char*>(w.data().data()), static_cast<std::streamsize>(w.data().size()));
    if (!out) {
        throw TableFormatError("failed writing tile table");
    }
}

TileTable read_table(std::istream& in) {
    std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (buf.size() < 12) {
        throw TableFormatError("table file truncated");
    }
    const std::uint64_t expected = [&] {
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= std::uint64_t{buf[buf.size() - 8 + k]} << (8 * k);
        return v;
    }();
    if (std::memcmp(buf.data(), kMagic, 4) != 0) {
        throw TableFormatError("not a tile table (bad magic)");
    }
    if (fnv1a(buf.data(), buf.size() - 8) != expected) {
        throw TableFormatError("tile table checksum mismatch");
    }
    buf.resize(buf.size() - 8);
    Reader r(std::move(buf));
    r.u32();  // magic, checked above
    const std::uint32_t version = r.u32();
    if (version != kTableFormatVersion) {
        throw TableFormatError("unsupported table format version " + std::to_string(version));
    }
    const std::uint8_t family = r.u8();
    StableParams sp{r.f64(), r.f64(), r.f64(), r.f64()};
    std::optional<TransformMap> map;
    try {
        if (family == static_cast<std::uint8_t>(Family::stable)) {
            map = TransformMap::stable(sp);
        } else if (family == static_cast<std::uint8_t>(Family::mittag_leffler)) {
            map = TransformMap::mittag_leffler(MLParams{sp.alpha});
        } else {
            throw TableFormatError("unknown distribution family " + std::to_string(family));
        }
    } catch (const InvalidParameter& e) {
        throw TableFormatError(std::string("invalid parameters in table: ") + e.what());
    }
    const std::int32_t level_u = r.i32();
    const std::int32_t level_v = r.i32();
    if (level_u < 0 || level_u > 31 || level_v < 0 || level_v > 31) {
        throw TableFormatError("tile levels out of range");
    }
    const double est = r.f64();
    const double target = r.f64();
    const bool converged = r.flag();
    const std::uint32_t n_iv = r.u32();
    std::vector<Interval> ivs;
    for (std::uint32_t k = 0; k < n_iv; ++k) {
        Interval iv{};
        iv.lower.value = r.f64();
        iv.lower.closed = r.flag();
        iv.upper.value = r.f64();
        iv.upper.closed = r.flag();
        ivs.push_back(iv);
    }
    std::optional<RegionSpec> region;
    try {
        region.emplace(std::move(ivs));
    } catch (const InvalidParameter& e) {
        throw TableFormatError(std::string("invalid region in table: ") + e.what());
    }
    const std::uint64_t n_tiles = r.u64();
    if (n_tiles > (r.size() - r.pos()) / 9) {
        throw TableFormatError("tile count exceeds file size");
    }
    TileTable table{*map, *region, level_u, level_v, {}, est, target, converged, {}};
    table.tiles.reserve(static_cast<std::size_t>(n_tiles));
    const std::uint64_t lim_u = std::uint64_t{1} << level_u;
    const std::uint64_t lim_v = std::uint64_t{1} << level_v;
    for (std::uint64_t k = 0; k < n_tiles; ++k) {
        Tile t{r.u32(), r.u32(), r.flag()};
        if (t.i >= lim_u || t.j >= lim_v) {
            throw TableFormatError("tile index out of range");
        }
        table.tiles.push_back(t);
    }
    if (r.pos() != r.size()) {
        throw TableFormatError("trailing bytes after tile list");
    }
    return table;
}

void save_table(const TileTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw TableFormatError("cannot open " + path.string() + " for writing");
    }
    write_table(table, out);
}

TileTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TableFormatError("cannot open " + path.string());
    }
    return read_table(in);
}

}  // namespace tailforge
