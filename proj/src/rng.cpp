#include "tailforge/rng.hpp"

#include <charconv>
#include <string>

namespace tailforge {

std::uint32_t parse_seed(std::string_view text) {
    const std::string original(text);
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
        text.remove_suffix(1);
    }
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    }
    std::uint64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, base);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw SeedError("seed is not a decimal or 0x-hexadecimal integer: '" + original + "'");
    }
    if (value > 0xFFFFFFFFull) {
        throw SeedError("seed does not fit in 32 bits: '" + original + "'");
    }
    if (value == 0) {
        throw SeedError("seed must be nonzero");
    }
    return static_cast<std::uint32_t>(value);
}

std::uint32_t derive_seed(std::uint32_t base, std::uint32_t stream) noexcept {
    if (stream == 0) {
        return base;
    }
    // splitmix64 finalizer over (base, stream)
    std::uint64_t z = (static_cast<std::uint64_t>(base) << 32 | stream) + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    auto seed = static_cast<std::uint32_t>(z ^ (z >> 32));
    return seed == 0 ? 0x9E3779B9u : seed;
}

}  // namespace tailforge
