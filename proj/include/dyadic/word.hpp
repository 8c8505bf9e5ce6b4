#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "dyadic/error.hpp"

namespace dyadic {

// Depth policy. Words are capped at the configured bound; operations that
// would need longer words throw DomainError instead of truncating. The
// packed representation below gives a hard ceiling of 60 symbols.
inline constexpr int kDepthCeiling = 60;

inline int& detail_max_depth() {
    static int depth = 32;
    return depth;
}
inline int max_depth() { return detail_max_depth(); }
inline void set_max_depth(int d) {
    if (d < 1 || d > kDepthCeiling)
        throw DomainError("max depth must lie in [1, " + std::to_string(kDepthCeiling) +
                          "], got " + std::to_string(d));
    detail_max_depth() = d;
}

// A finite binary word, the address of a dyadic cylinder. Bits are packed
// MSB-first into a single machine word, so comparison of (bits, len) pairs
// is the lexicographic order on words ("" < "0" < "00" < "01" < "1").
struct Word {
    std::uint64_t bits = 0; // left-aligned, unused low bits are zero
    std::uint8_t len = 0;

    constexpr Word() = default;
    constexpr Word(std::uint64_t b, std::uint8_t l) : bits(b), len(l) {}

    static constexpr std::uint64_t mask(int len) {
        return len == 0 ? 0ull : ~0ull << (64 - len);
    }

    // The word of length `len` whose leaf index at that level is `index`.
    static Word from_index(std::uint64_t index, int len) {
        if (len == 0) return {};
        return Word{index << (64 - len), static_cast<std::uint8_t>(len)};
    }
    std::uint64_t index() const { return len == 0 ? 0 : bits >> (64 - len); }

    int size() const { return len; }
    bool empty() const { return len == 0; }

    int bit(int i) const { return static_cast<int>((bits >> (63 - i)) & 1u); }
    int last_bit() const { return bit(len - 1); }
    int ones() const { return std::popcount(bits); }
    int zeros() const { return len - ones(); }

    bool is_prefix_of(const Word& w) const {
        return len <= w.len && ((bits ^ w.bits) & mask(len)) == 0;
    }

    Word push(int b) const {
        if (len >= max_depth())
            throw DomainError("word depth would exceed configured bound " +
                              std::to_string(max_depth()));
        return Word{bits | (static_cast<std::uint64_t>(b) << (63 - len)),
                    static_cast<std::uint8_t>(len + 1)};
    }

    Word concat(const Word& s) const {
        if (len + s.len > max_depth())
            throw DomainError("word depth " + std::to_string(len + s.len) +
                              " would exceed configured bound " + std::to_string(max_depth()));
        return Word{bits | (s.bits >> len), static_cast<std::uint8_t>(len + s.len)};
    }

    // The suffix after dropping the first k symbols.
    Word suffix_from(int k) const {
        return Word{bits << k, static_cast<std::uint8_t>(len - k)};
    }

    Word parent() const { return Word{bits & mask(len - 1), static_cast<std::uint8_t>(len - 1)}; }
    Word sibling() const { return Word{bits ^ (1ull << (64 - len)), len}; }

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
        if (a.bits != b.bits) return a.bits <=> b.bits;
        return a.len <=> b.len;
    }

    std::string str() const {
        std::string s;
        s.reserve(len);
        for (int i = 0; i < len; ++i) s.push_back(static_cast<char>('0' + bit(i)));
        return s;
    }
};

// Two words are siblings when they differ exactly in their last symbol.
inline bool are_siblings(const Word& a, const Word& b) {
    return a.len == b.len && a.len > 0 && (a.bits ^ b.bits) == (1ull << (64 - a.len));
}

inline Word parse_word(std::string_view s) {
    if (s.size() > static_cast<std::size_t>(max_depth()))
        throw DomainError("word \"" + std::string(s) + "\" longer than configured depth bound " +
                          std::to_string(max_depth()));
    Word w;
    for (const char c : s) {
        if (c != '0' && c != '1')
            throw ParseError("word must be over {0,1}, got \"" + std::string(s) + "\"");
        w = Word{w.bits | (static_cast<std::uint64_t>(c - '0') << (63 - w.len)),
                 static_cast<std::uint8_t>(w.len + 1)};
    }
    return w;
}

} // namespace dyadic
