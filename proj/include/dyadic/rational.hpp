#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "dyadic/error.hpp"

namespace dyadic {

// Arbitrary-precision integers and rationals. cpp_rational keeps itself in
// lowest terms with a positive denominator, which is exactly the contract the
// rest of the library assumes. No floating point appears anywhere.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string format_rat(const Rat& r) {
    // Always "p/q", even for integers, so output is uniform and re-parseable.
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rat parse_rat(std::string_view s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos)
            return Rat(Int(std::string(s)));
        const Int p{std::string(s.substr(0, slash))};
        const Int q{std::string(s.substr(slash + 1))};
        if (q == 0) throw ParseError("rational with zero denominator: " + std::string(s));
        return Rat(p, q);
    } catch (const std::runtime_error&) {
        throw ParseError("malformed rational: " + std::string(s));
    }
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw DomainError("negative power of zero");
        return 1 / pow_rat(base, -e);
    }
    Rat acc = 1, b = base;
    for (long k = e; k > 0; k >>= 1) {
        if (k & 1) acc *= b;
        b *= b;
    }
    return acc;
}

// True when r = m / 2^k for some integer m; reports the smallest such k.
inline bool is_dyadic(const Rat& r, int& k_out) {
    Int den = denominator(r);
    int k = 0;
    while ((den & 1) == 0) { den >>= 1; ++k; }
    k_out = k;
    return den == 1;
}

} // namespace dyadic
