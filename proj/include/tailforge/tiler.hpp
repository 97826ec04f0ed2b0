#pragma once

// Setup stage: cover the part of the unit square where the transform map lands
// in a region with equal-size dyadic tiles, flagging the tiles that the region
// boundary may cross.
//
// Tiles are rectangles of 2^-level_u by 2^-level_v. Both levels are chosen by
// the builder; a thin strip along one edge needs fine resolution across the
// strip only. All tiles of one table have the same size, so the sampler picks
// them with uniform probability.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tailforge/region.hpp"
#include "tailforge/rng.hpp"
#include "tailforge/transforms.hpp"

namespace tailforge {

/// No point of the unit square reachable by the sampler maps into the region.
class EmptyRegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TileClass : unsigned char { inside, outside, boundary };

const char* to_string(TileClass c) noexcept;

/// A tile addressed at arbitrary levels.
struct TileCoord {
    std::uint32_t i;  // u index, 0 <= i < 2^level_u
    std::uint32_t j;  // v index, 0 <= j < 2^level_v
    int level_u;
    int level_v;
};

/// Table entry at the table's levels.
struct Tile {
    std::uint32_t i;
    std::uint32_t j;
    bool intersected;

    bool operator==(const Tile&) const = default;
};

struct TilerOptions {
    double target_rejection = 0.01;
    /// Upper bound for each of level_u and level_v.
    int max_level = 30;
    int probes_per_edge = 3;
    /// Refinement stops (unconverged) rather than exceed this many tiles.
    std::size_t max_tiles = std::size_t{1} << 23;

    void validate() const;
};

/// One step of the refinement path, for diagnostics.
struct RefinementStep {
    int level_u;
    int level_v;
    std::size_t kept;
    std::size_t boundary;
    double est_rejection;
};

struct TileTable {
    TransformMap map;
    RegionSpec region;
    int level_u = 0;
    int level_v = 0;
    std::vector<Tile> tiles;
    /// Fraction of kept tiles flagged intersected: an upper bound on the
    /// sampler's rejection rate.
    double est_rejection = 0.0;
    double target_rejection = 0.0;
    bool converged = true;
    std::vector<RefinementStep> history;

    double tile_area() const noexcept { return std::ldexp(1.0, -(level_u + level_v)); }
    double kept_area() const noexcept { return static_cast<double>(tiles.size()) * tile_area(); }
    std::size_t boundary_count() const noexcept;
};

/// Coordinates the conditional sampler may visit: the same extremes an
/// unconditional draw from 32-bit words reaches, whatever the tile level.
inline constexpr double kReachMin = to_unit_interval(0);
inline constexpr double kReachMax = to_unit_interval(0xFFFFFFFFu);

/// Unit-square coordinate of position `frac` in [0, 1] across cell `index` at
/// `level`, clamped to [kReachMin, kReachMax].
inline double cell_coordinate(std::uint32_t index, int level, double frac) noexcept {
    const double x = std::ldexp(static_cast<double>(index) + frac, -level);
    return std::clamp(x, kReachMin, kReachMax);
}

/// True for tiles the tiler never trusts: stable maps (alpha < 2) at any of
/// the four corners of the square, Mittag-Leffler maps (alpha < 1) on the
/// v = 0 row.
bool touches_singularity(const TransformMap& map, const TileCoord& t) noexcept;

/// Probes a (2P - 1) x (2P - 1) grid over the tile, which is the P x P probe
/// grid of the tile together with those of its four children. Inside or
/// Outside needs every probe in the same component of the line (one interval,
/// or one gap between intervals), no singular evaluation and no singularity
/// contact; anything else is Boundary.
TileClass classify_tile(const TransformMap& map, const RegionSpec& region, const TileCoord& t,
                        int probes_per_edge = 3);

/// Refines from 4 x 4 tiles, each step halving the tiles along whichever axis
/// lowers the boundary fraction more, until est_rejection <= target or a limit
/// is hit (then converged == false). Throws EmptyRegionError when no probe
/// ever lands in the region.
TileTable build_tile_table(const TransformMap& map, const RegionSpec& region,
                           const TilerOptions& options = {});

/// Same classification at fixed levels (no target). Used to compare tables of
/// different resolution over one region.
TileTable build_tile_table_at(const TransformMap& map, const RegionSpec& region, int level_u,
                              int level_v, int probes_per_edge = 3);

/// Run-length view of a table's tile list. Maps a uniform 64-bit word to the
/// tile at index floor(r * N / 2^64) of the list, through a guide table keyed
/// by the word's top bits, so lookups touch a few cache lines however long
/// the list is.
class TileIndex {
public:
    explicit TileIndex(const TileTable& table);

    struct Located {
        std::uint32_t i;
        std::uint32_t j;
        bool intersected;
    };

    Located locate(std::uint64_t r) const noexcept {
        const std::uint64_t idx = scale_to_range(r, n_);
        std::size_t k = guide_[r >> guide_shift_];
        while (k + 1 < runs_.size() && runs_[k + 1].start <= idx) {
            ++k;
        }
        const Run& run = runs_[k];
        return {run.i, run.j0 + static_cast<std::uint32_t>(idx - run.start), run.intersected};
    }

    std::uint64_t tiles() const noexcept { return n_; }
    std::size_t runs() const noexcept { return runs_.size(); }

private:
    struct Run {
        std::uint64_t start;
        std::uint32_t i;
        std::uint32_t j0;
        bool intersected;
    };

    std::vector<Run> runs_;
    std::vector<std::uint32_t> guide_;
    int guide_shift_ = 63;
    std::uint64_t n_ = 0;
};

struct AreaEstimate {
    double value = 0.0;      // P(X in region)
    double std_error = 0.0;
    double kept_area = 0.0;
    double acceptance = 0.0;  // fraction of probes in kept tiles landing in the region
    std::size_t samples = 0;
};

/// Monte Carlo estimate of P(X in region): kept area times the fraction of
/// uniform points in kept tiles that satisfy the region.
template <UniformSource S>
AreaEstimate table_area_estimate(const TileTable& table, std::size_t samples, S& src) {
    if (samples == 0) {
        throw std::invalid_argument("table_area_estimate: samples must be >= 1");
    }
    AreaEstimate out;
    out.samples = samples;
    out.kept_area = table.kept_area();
    if (table.tiles.empty()) {
        return out;
    }
    const auto n_tiles = static_cast<std::uint64_t>(table.tiles.size());
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Tile& t = table.tiles[scale_to_range(next_u64(src), n_tiles)];
        const double u = cell_coordinate(t.i, table.level_u, src.next_unit());
        const double v = cell_coordinate(t.j, table.level_v, src.next_unit());
        const auto x = table.map(u, v);
        if (x && table.region.contains(*x)) {
            ++hits;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    out.acceptance = p;
    out.value = out.kept_area * p;
    out.std_error = out.kept_area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return out;
}

}  // namespace tailforge
