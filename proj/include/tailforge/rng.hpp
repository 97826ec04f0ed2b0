#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace tailforge {

class SeedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint32_t kDefaultSeed = 0x2545F491u;

inline constexpr double kUnitMin = 0x1p-53;
inline constexpr double kUnitMax = 1.0 - 0x1p-53;

/// (w + 1/2) / 2^32 clamped to [2^-53, 1 - 2^-53]; never 0 or 1.
constexpr double to_unit_interval(std::uint32_t w) noexcept {
    const double x = (static_cast<double>(w) + 0.5) * 0x1p-32;
    return std::clamp(x, kUnitMin, kUnitMax);
}

/// Anything that yields 32-bit words and interior unit reals deterministically.
template <class S>
concept UniformSource = requires(S& s) {
    { s.next_u32() } -> std::same_as<std::uint32_t>;
    { s.next_unit() } -> std::same_as<double>;
};

/// floor(r * n / 2^64): maps a uniform 64-bit word onto [0, n) without a
/// division; the bias per index is below n / 2^64.
constexpr std::uint64_t scale_to_range(std::uint64_t r, std::uint64_t n) noexcept {
    __extension__ typedef unsigned __int128 wide;
    return static_cast<std::uint64_t>((static_cast<wide>(r) * n) >> 64);
}

/// Two consecutive words as one 64-bit value, first word high.
template <UniformSource S>
std::uint64_t next_u64(S& src) {
    const std::uint64_t hi = src.next_u32();
    return (hi << 32) | src.next_u32();
}

struct Shr3State {
    std::uint32_t y;
};

/// One step of Marsaglia's three-shift register (13, 17, 5). The output word
/// is the new state.
constexpr std::pair<Shr3State, std::uint32_t> shr3_next(Shr3State s) noexcept {
    std::uint32_t y = s.y;
    y ^= y << 13;
    y ^= y >> 17;
    y ^= y << 5;
    return {Shr3State{y}, y};
}

/// SHR3 xorshift generator. Period 2^32 - 1 over nonzero states.
class Shr3 {
public:
    explicit constexpr Shr3(std::uint32_t seed = kDefaultSeed) : state_{seed} {
        if (seed == 0) {
            throw SeedError("seed must be nonzero: the all-zero SHR3 state is absorbing");
        }
    }

    constexpr std::uint32_t next_u32() noexcept {
        auto [s, w] = shr3_next(state_);
        state_ = s;
        return w;
    }

    constexpr double next_unit() noexcept { return to_unit_interval(next_u32()); }

    constexpr Shr3State state() const noexcept { return state_; }

private:
    Shr3State state_;
};

static_assert(UniformSource<Shr3>);

/// Parses a decimal or 0x-prefixed hexadecimal 32-bit seed. Throws SeedError
/// for malformed, out-of-range or zero values.
std::uint32_t parse_seed(std::string_view text);

/// Seed for stream k derived from a base seed; stream 0 keeps the base seed.
std::uint32_t derive_seed(std::uint32_t base, std::uint32_t stream) noexcept;

}  // namespace tailforge
