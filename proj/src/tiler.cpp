#include "tailforge/tiler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <string>
#include <utility>

namespace tailforge {

namespace {

constexpr int kStartLevel = 2;
constexpr int kMaxProbesPerEdge = 16;
constexpr int kAbsoluteMaxLevel = 31;

struct Probe {
    TileClass cls;
    bool any_in;
};

Probe probe_tile(const TransformMap& map, const RegionSpec& region, const TileCoord& t, int per_edge) {
    const bool quarantined = touches_singularity(map, t);
    const int m = 2 * (per_edge - 1) + 1;
    std::array<double, 2 * kMaxProbesPerEdge> us{};
    std::array<double, 2 * kMaxProbesPerEdge> vs{};
    for (int k = 0; k < m; ++k) {
        const double frac = static_cast<double>(k) / (m - 1);
        us[k] = cell_coordinate(t.i, t.level_u, frac);
        vs[k] = cell_coordinate(t.j, t.level_v, frac);
    }
    // Probes in different components (two gaps on either side of a bounded
    // interval, or two intervals of a union) have a region boundary between
    // them even when no probe is in the region.
    constexpr std::size_t kNone = ~std::size_t{0};
    std::size_t first = kNone;
    bool in = false;
    bool mixed = false;
    bool singular = false;
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const double x = map.raw(us[a], vs[b]);
            if (!std::isfinite(x)) {
                singular = true;
                continue;
            }
            const std::size_t c = region.component(x);
            in = in || (c % 2 == 1);
            if (first == kNone) {
                first = c;
            } else if (c != first) {
                mixed = true;
            }
            if (in && (mixed || singular || quarantined)) {
                return {TileClass::boundary, true};
            }
        }
    }
    if (quarantined || singular || mixed) {
        return {TileClass::boundary, in};
    }
    return {in ? TileClass::inside : TileClass::outside, in};
}

struct Block {
    std::uint32_t i, j;
    int level_u, level_v;
};

using Cell = std::pair<std::uint32_t, std::uint32_t>;

// Inside tiles are kept as blocks at the level where they were found; their
// children inherit the classification. Only boundary tiles are refined.
struct State {
    int level_u = kStartLevel;
    int level_v = kStartLevel;
    std::vector<Block> inside;
    double inside_count = 0.0;  // in tiles of the current levels
    std::vector<Cell> boundary;
    bool any_in = false;

    double kept() const { return inside_count + static_cast<double>(boundary.size()); }
    double est() const { return kept() == 0.0 ? 1.0 : static_cast<double>(boundary.size()) / kept(); }
};

struct Candidate {
    bool along_u = true;
    std::vector<Block> new_inside;
    std::vector<Cell> boundary;
    bool any_in = false;
    double kept = 0.0;

    double est() const { return kept == 0.0 ? 1.0 : static_cast<double>(boundary.size()) / kept; }
};

class Engine {
public:
    Engine(const TransformMap& map, const RegionSpec& region, int per_edge)
        : map_(map), region_(region), per_edge_(per_edge) {}

    State initial(int level_u, int level_v) const {
        State s;
        s.level_u = level_u;
        s.level_v = level_v;
        for (std::uint32_t i = 0; i < (1u << level_u); ++i) {
            for (std::uint32_t j = 0; j < (1u << level_v); ++j) {
                add(s, TileCoord{i, j, level_u, level_v});
            }
        }
        return s;
    }

    Candidate refine(const State& s, bool along_u) const {
        Candidate c;
        c.along_u = along_u;
        const int lu = s.level_u + (along_u ? 1 : 0);
        const int lv = s.level_v + (along_u ? 0 : 1);
        c.boundary.reserve(s.boundary.size() * 2);
        for (const auto& [i, j] : s.boundary) {
            for (std::uint32_t half = 0; half < 2; ++half) {
                const TileCoord child = along_u ? TileCoord{2 * i + half, j, lu, lv}
                                                : TileCoord{i, 2 * j + half, lu, lv};
                const Probe p = probe_tile(map_, region_, child, per_edge_);
                c.any_in = c.any_in || p.any_in;
                if (p.cls == TileClass::inside) {
                    c.new_inside.push_back({child.i, child.j, lu, lv});
                } else if (p.cls == TileClass::boundary) {
                    c.boundary.emplace_back(child.i, child.j);
                }
            }
        }
        c.kept = 2.0 * s.inside_count + static_cast<double>(c.new_inside.size() + c.boundary.size());
        return c;
    }

    static void commit(State& s, Candidate&& c) {
        if (c.along_u) {
            ++s.level_u;
        } else {
            ++s.level_v;
        }
        s.inside_count = 2.0 * s.inside_count + static_cast<double>(c.new_inside.size());
        s.inside.insert(s.inside.end(), c.new_inside.begin(), c.new_inside.end());
        s.boundary = std::move(c.boundary);
        s.any_in = c.any_in || !s.inside.empty();
    }

private:
    void add(State& s, const TileCoord& t) const {
        const Probe p = probe_tile(map_, region_, t, per_edge_);
        s.any_in = s.any_in || p.any_in;
        if (p.cls == TileClass::inside) {
            s.inside.push_back({t.i, t.j, t.level_u, t.level_v});
            s.inside_count += 1.0;
        } else if (p.cls == TileClass::boundary) {
            s.boundary.emplace_back(t.i, t.j);
        }
    }

    const TransformMap& map_;
    const RegionSpec& region_;
    int per_edge_;
};

RefinementStep record(const State& s) {
    return {s.level_u, s.level_v, static_cast<std::size_t>(s.kept()), s.boundary.size(), s.est()};
}

TileTable finish(const TransformMap& map, const RegionSpec& region, const State& s) {
    if (s.kept() == 0.0 || (s.inside_count == 0.0 && !s.any_in)) {
        throw EmptyRegionError("region " + region.to_string() + " is unreachable for " +
                               (map.family() == Family::stable ? to_string(map.stable_params())
                                                               : to_string(map.ml_params())));
    }
    TileTable table{map, region, 0, 0, {}, 0.0, 0.0, true, {}};
    table.level_u = s.level_u;
    table.level_v = s.level_v;
    table.tiles.reserve(static_cast<std::size_t>(s.kept()));
    for (const Block& b : s.inside) {
        const int du = s.level_u - b.level_u;
        const int dv = s.level_v - b.level_v;
        for (std::uint32_t a = 0; a < (1u << du); ++a) {
            for (std::uint32_t c = 0; c < (1u << dv); ++c) {
                table.tiles.push_back({(b.i << du) + a, (b.j << dv) + c, false});
            }
        }
    }
    for (const auto& [i, j] : s.boundary) {
        table.tiles.push_back({i, j, true});
    }
    std::sort(table.tiles.begin(), table.tiles.end(), [](const Tile& x, const Tile& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    table.est_rejection = s.est();
    return table;
}

TileTable full_square(const TransformMap& map, const RegionSpec& region, double target) {
    TileTable table{map, region, 0, 0, {}, 0.0, 0.0, true, {}};
    table.tiles.push_back({0, 0, false});
    table.target_rejection = target;
    table.history.push_back({0, 0, 1, 0, 0.0});
    return table;
}

// Mittag-Leffler waiting times are positive. Without this check a region
// below zero would refine the quarantined v = 0 row up to the tile limit
// before reporting that nothing was found.
void check_support(const TransformMap& map, const RegionSpec& region) {
    if (map.family() != Family::mittag_leffler) {
        return;
    }
    for (const Interval& iv : region.intervals()) {
        if (iv.upper.value > 0.0) {
            return;
        }
    }
    throw EmptyRegionError("region " + region.to_string() + " misses the support (0, inf) of " +
                           to_string(map.ml_params()));
}

void check_probes(int per_edge) {
    if (per_edge < 2 || per_edge > kMaxProbesPerEdge) {
        throw InvalidParameter("parameter invariant violated: 2 <= probes_per_edge <= " +
                               std::to_string(kMaxProbesPerEdge));
    }
}

}  // namespace

const char* to_string(TileClass c) noexcept {
    switch (c) {
        case TileClass::inside:
            return "inside";
        case TileClass::outside:
            return "outside";
        case TileClass::boundary:
            return "boundary";
    }
    return "?";
}

void TilerOptions::validate() const {
    if (!(target_rejection > 0.0 && target_rejection < 1.0)) {
        throw InvalidParameter("parameter invariant violated: 0 < target_rejection < 1");
    }
    if (max_level < kStartLevel || max_level > kAbsoluteMaxLevel) {
        throw InvalidParameter("parameter invariant violated: 2 <= max_level <= " +
                               std::to_string(kAbsoluteMaxLevel));
    }
    check_probes(probes_per_edge);
    if (max_tiles < 1) {
        throw InvalidParameter("parameter invariant violated: max_tiles >= 1");
    }
}

TileIndex::TileIndex(const TileTable& table) : n_(table.tiles.size()) {
    if (n_ == 0) {
        throw EmptyRegionError("tile table is empty");
    }
    for (std::size_t k = 0; k < table.tiles.size(); ++k) {
        const Tile& t = table.tiles[k];
        if (!runs_.empty()) {
            const Run& last = runs_.back();
            const std::uint64_t len = k - last.start;
            if (last.i == t.i && last.intersected == t.intersected && t.j == last.j0 + len) {
                continue;
            }
        }
        runs_.push_back({k, t.i, t.j, t.intersected});
    }
    const int bits = std::clamp(static_cast<int>(std::bit_width(runs_.size())) + 1, 1, 26);
    guide_shift_ = 64 - bits;
    guide_.resize(std::size_t{1} << bits);
    std::size_t k = 0;
    for (std::size_t b = 0; b < guide_.size(); ++b) {
        const std::uint64_t first = scale_to_range(std::uint64_t{b} << guide_shift_, n_);
        while (k + 1 < runs_.size() && runs_[k + 1].start <= first) {
            ++k;
        }
        guide_[b] = static_cast<std::uint32_t>(k);
    }
}

std::size_t TileTable::boundary_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(tiles.begin(), tiles.end(), [](const Tile& t) { return t.intersected; }));
}

bool touches_singularity(const TransformMap& map, const TileCoord& t) noexcept {
    const std::uint32_t last_u = (1u << t.level_u) - 1;
    const std::uint32_t last_v = (1u << t.level_v) - 1;
    if (map.family() == Family::stable) {
        const bool edge_u = t.i == 0 || t.i == last_u;
        const bool edge_v = t.j == 0 || t.j == last_v;
        return map.alpha() < 2.0 && edge_u && edge_v;
    }
    // the bracket has its pole at v = 0 only; at v = 1 it tends to zero
    return map.alpha() < 1.0 && t.j == 0;
}

TileClass classify_tile(const TransformMap& map, const RegionSpec& region, const TileCoord& t,
                        int probes_per_edge) {
    check_probes(probes_per_edge);
    return probe_tile(map, region, t, probes_per_edge).cls;
}

TileTable build_tile_table(const TransformMap& map, const RegionSpec& region,
                           const TilerOptions& options) {
    options.validate();
    check_support(map, region);
    if (region.covers_full_line()) {
        return full_square(map, region, options.target_rejection);
    }
    const Engine engine(map, region, options.probes_per_edge);
    State s = engine.initial(kStartLevel, kStartLevel);
    std::vector<RefinementStep> history{record(s)};
    bool converged = false;
    while (s.kept() > 0.0) {
        if (s.est() <= options.target_rejection) {
            converged = true;
            break;
        }
        std::optional<Candidate> best;
        for (const bool along_u : {true, false}) {
            if ((along_u ? s.level_u : s.level_v) >= options.max_level) {
                continue;
            }
            Candidate c = engine.refine(s, along_u);
            if (c.kept > static_cast<double>(options.max_tiles)) {
                continue;
            }
            if (!best || c.est() < best->est() || (c.est() == best->est() && c.kept < best->kept)) {
                best = std::move(c);
            }
        }
        if (!best) {
            break;
        }
        Engine::commit(s, std::move(*best));
        history.push_back(record(s));
    }
    TileTable table = finish(map, region, s);
    table.target_rejection = options.target_rejection;
    table.converged = converged;
    table.history = std::move(history);
    return table;
}

TileTable build_tile_table_at(const TransformMap& map, const RegionSpec& region, int level_u,
                              int level_v, int probes_per_edge) {
    check_probes(probes_per_edge);
    if (level_u < 0 || level_v < 0 || level_u > kAbsoluteMaxLevel || level_v > kAbsoluteMaxLevel) {
        throw InvalidParameter("parameter invariant violated: 0 <= level <= " +
                               std::to_string(kAbsoluteMaxLevel));
    }
    check_support(map, region);
    const Engine engine(map, region, probes_per_edge);
    State s = engine.initial(std::min(level_u, kStartLevel), std::min(level_v, kStartLevel));
    std::vector<RefinementStep> history{record(s)};
    while (s.level_u < level_u || s.level_v < level_v) {
        // alternate, finer axis last
        const bool along_u = s.level_v >= level_v || (s.level_u < level_u && s.level_u <= s.level_v);
        Engine::commit(s, engine.refine(s, along_u));
        history.push_back(record(s));
    }
    TileTable table = finish(map, region, s);
    table.target_rejection = 1.0;
    table.history = std::move(history);
    return table;
}

}  // namespace tailforge
