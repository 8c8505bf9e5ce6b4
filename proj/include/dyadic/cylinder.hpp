#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/error.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/word.hpp"

namespace dyadic {

// The Bernoulli parameter of the product measure: a symbol 0 has mass
// lambda, a symbol 1 has mass 1 - lambda. Exact rational in (0, 1).
class Lambda {
public:
    explicit Lambda(Rat v) : v_(std::move(v)) {
        if (v_ <= 0 || v_ >= 1)
            throw DomainError("lambda must satisfy 0 < lambda < 1, got " + format_rat(v_));
    }
    static Lambda parse(std::string_view s) { return Lambda(parse_rat(s)); }

    const Rat& value() const { return v_; }
    Rat zero_mass() const { return v_; }
    Rat one_mass() const { return 1 - v_; }
    bool is_half() const { return v_ == Rat(1, 2); }

private:
    Rat v_;
};

// Mass of a single cylinder [w].
inline Rat mu(const Word& w, const Lambda& lambda) {
    return pow_rat(lambda.zero_mass(), w.zeros()) * pow_rat(lambda.one_mass(), w.ones());
}

// A finite union of cylinders in canonical form: the word list is sorted,
// prefix-free, and fully merged (never both children of a node, always the
// node itself). Canonical form makes set equality plain vector equality.
class CylinderSet {
public:
    CylinderSet() = default;

    static CylinderSet canonical(std::vector<Word> raw) {
        normalize(raw);
        return CylinderSet(std::move(raw), already_canonical_tag{});
    }
    static CylinderSet full() { return canonical({Word{}}); }

    const std::vector<Word>& words() const { return words_; }
    bool empty() const { return words_.empty(); }
    bool is_full() const { return words_.size() == 1 && words_[0].empty(); }
    std::size_t size() const { return words_.size(); }
    int max_len() const {
        int m = 0;
        for (const Word& w : words_) m = std::max(m, w.size());
        return m;
    }

    bool covers(const Word& w) const {
        // Canonical order puts any prefix of w immediately before the block
        // of words that extend it, so one binary search suffices.
        auto it = std::upper_bound(words_.begin(), words_.end(), w);
        return it != words_.begin() && std::prev(it)->is_prefix_of(w);
    }

    friend bool operator==(const CylinderSet&, const CylinderSet&) = default;

    // Sorts, absorbs words below other words, merges sibling pairs. Shared
    // by everything that builds sets, so it has to be a linear pass after
    // the sort: a stack fold handles cascading merges.
    static void normalize(std::vector<Word>& ws) {
        std::sort(ws.begin(), ws.end());
        std::vector<Word> out;
        out.reserve(ws.size());
        for (const Word& w : ws) {
            if (!out.empty() && out.back().is_prefix_of(w)) continue; // absorbed
            out.push_back(w);
            while (out.size() >= 2 && are_siblings(out[out.size() - 2], out.back())) {
                const Word p = out.back().parent();
                out.pop_back();
                out.back() = p;
            }
        }
        ws = std::move(out);
    }

private:
    struct already_canonical_tag {};
    CylinderSet(std::vector<Word> ws, already_canonical_tag) : words_(std::move(ws)) {}

    std::vector<Word> words_;
};

inline Rat kraft(const CylinderSet& a) {
    const int top = a.max_len();
    Int num = 0;
    for (const Word& w : a.words()) num += Int(1) << (top - w.size());
    return Rat(num, Int(1) << top);
}

// Exact mass under the product measure. Summation runs over a common
// denominator q^top with integer numerators; cpp_rational would otherwise
// reduce after every addition, which dominates on large sets.
inline Rat mu(std::span<const Word> words, const Lambda& lambda) {
    int top = 0;
    for (const Word& w : words) top = std::max(top, w.size());
    const Int p = numerator(lambda.value());
    const Int q = denominator(lambda.value());
    const Int r = q - p;
    std::vector<Int> pk(top + 1, 1), rk(top + 1, 1), qk(top + 1, 1);
    for (int i = 1; i <= top; ++i) {
        pk[i] = pk[i - 1] * p;
        rk[i] = rk[i - 1] * r;
        qk[i] = qk[i - 1] * q;
    }
    Int num = 0;
    for (const Word& w : words) num += pk[w.zeros()] * rk[w.ones()] * qk[top - w.size()];
    return Rat(num, qk[top]);
}

inline Rat mu(const CylinderSet& a, const Lambda& lambda) { return mu(std::span(a.words()), lambda); }

inline CylinderSet set_union(const CylinderSet& a, const CylinderSet& b) {
    std::vector<Word> ws = a.words();
    ws.insert(ws.end(), b.words().begin(), b.words().end());
    return CylinderSet::canonical(std::move(ws));
}

namespace detail {
// Emit the cylinders of [node] \ (union of `cover`), where every word of
// `cover` extends `node` and the span is sorted and prefix-free.
inline void complement_below(std::span<const Word> cover, const Word& node,
                             std::vector<Word>& out) {
    if (cover.empty()) {
        out.push_back(node);
        return;
    }
    if (cover.size() == 1 && cover[0] == node) return;
    const Word left = node.push(0);
    // Words extending node start with either node0 or node1; sorted order
    // keeps the two groups contiguous.
    const auto split = std::partition_point(
        cover.begin(), cover.end(), [&](const Word& w) { return left.is_prefix_of(w); });
    complement_below(cover.first(static_cast<std::size_t>(split - cover.begin())), left, out);
    complement_below(cover.subspan(static_cast<std::size_t>(split - cover.begin())),
                     node.push(1), out);
}
} // namespace detail

inline CylinderSet complement(const CylinderSet& a) {
    std::vector<Word> out;
    detail::complement_below(std::span(a.words()), Word{}, out);
    return CylinderSet::canonical(std::move(out));
}

inline CylinderSet intersect(const CylinderSet& a, const CylinderSet& b) {
    // In canonical form two cylinders meet only when one word extends the
    // other, and then the intersection is the deeper cylinder. Both lists
    // are sorted, so a single sweep finds every such pair.
    std::vector<Word> out;
    const auto& as = a.words();
    const auto& bs = b.words();
    std::size_t i = 0, j = 0;
    while (i < as.size() && j < bs.size()) {
        const Word& u = as[i];
        const Word& v = bs[j];
        if (u.is_prefix_of(v)) {
            out.push_back(v);
            ++j;
        } else if (v.is_prefix_of(u)) {
            out.push_back(u);
            ++i;
        } else if (u < v) {
            ++i;
        } else {
            ++j;
        }
    }
    return CylinderSet::canonical(std::move(out));
}

inline CylinderSet set_difference(const CylinderSet& a, const CylinderSet& b) {
    return intersect(a, complement(b));
}

inline bool disjoint(const CylinderSet& a, const CylinderSet& b) {
    return intersect(a, b).empty();
}

// All level-L words below A, in order. The result is deliberately not a
// CylinderSet: as a set it would just merge back to A.
inline std::vector<Word> refine_to_level(const CylinderSet& a, int level) {
    if (level > max_depth())
        throw DomainError("refinement level " + std::to_string(level) +
                          " exceeds configured depth bound " + std::to_string(max_depth()));
    if (level < a.max_len())
        throw DomainError("refinement level " + std::to_string(level) +
                          " is finer than the set, which reaches depth " +
                          std::to_string(a.max_len()));
    std::vector<Word> out;
    for (const Word& w : a.words()) {
        const int extra = level - w.size();
        const std::uint64_t n = 1ull << extra;
        for (std::uint64_t i = 0; i < n; ++i)
            out.push_back(Word{w.bits | (i << (64 - level)), static_cast<std::uint8_t>(level)});
    }
    return out;
}

} // namespace dyadic
