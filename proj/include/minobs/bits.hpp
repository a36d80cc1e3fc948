#ifndef MINOBS_BITS_HPP
#define MINOBS_BITS_HPP

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "minobs/error.hpp"
#include "minobs/rng.hpp"

namespace minobs {

/// A fixed-length vector of environmental degrees of freedom.
/// Index 0 is the leftmost (most significant) bit in the string form.
using Config = std::vector<std::uint8_t>;

using BitString = std::vector<std::uint8_t>;

inline std::string bits_to_string(const BitString& bits)
{
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline BitString bits_from_string(const std::string& s)
{
    BitString bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1')
            throw Error(Errc::SpecInvalid, "bit string contains '" + std::string(1, c) + "'");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

inline Config random_config(std::size_t num_dof, Rng& rng)
{
    Config c(num_dof);
    for (auto& b : c) b = static_cast<std::uint8_t>(rng.next_bit());
    return c;
}

/// Decodes the bits at `indices` (first index most significant) as an
/// unsigned integer.
inline std::uint64_t decode_bits(const Config& config, const std::vector<std::size_t>& indices)
{
    std::uint64_t v = 0;
    for (std::size_t i : indices) v = (v << 1) | config[i];
    return v;
}

/// Binary encoding of `value`, fixed `width`, most significant bit first.
inline BitString encode_bits(std::uint64_t value, std::size_t width)
{
    BitString out(width);
    for (std::size_t i = 0; i < width; ++i)
        out[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1);
    return out;
}

} // namespace minobs

#endif // MINOBS_BITS_HPP
