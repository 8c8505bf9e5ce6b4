#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dyadic/cylinder.hpp"
#include "dyadic/perm.hpp"
#include "dyadic/table_map.hpp"

// Brute-force reference implementations. Everything here works pointwise on
// an explicit level-D leaf enumeration, deliberately sharing no logic with
// the library's interval algebra, so agreement is meaningful.

namespace oracle {

using dyadic::Int;
using dyadic::Lambda;
using dyadic::LeafPerm;
using dyadic::Perm;
using dyadic::Rat;
using dyadic::TableMap;
using dyadic::Word;

inline Rat naive_mu(const Word& w, const Lambda& lambda) {
    Rat m = 1;
    for (int i = 0; i < w.size(); ++i)
        m *= w.bit(i) == 0 ? lambda.zero_mass() : lambda.one_mass();
    return m;
}

// Image of the level-depth leaf with the given index under a full table,
// computed row by row without the library's composition machinery.
inline std::uint64_t apply_leaf(const TableMap& f, std::uint64_t leaf, int depth) {
    const Word x = Word::from_index(leaf, depth);
    for (const auto& row : f.rows())
        if (row.src.is_prefix_of(x))
            return row.dst.concat(x.suffix_from(row.src.size())).index();
    throw dyadic::DomainError("oracle: leaf " + x.str() + " not covered");
}

inline Rat naive_du(const TableMap& f, const TableMap& g, const Lambda& lambda, int depth) {
    Rat total = 0;
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t(1) << depth); ++leaf)
        if (apply_leaf(f, leaf, depth) != apply_leaf(g, leaf, depth))
            total += naive_mu(Word::from_index(leaf, depth), lambda);
    return total;
}

// Orbit blocks of {0 .. 2^level - 1} under the leaf perms and their
// inverses, grown by plain closure, sorted by least member.
inline std::vector<std::vector<std::uint32_t>> naive_blocks(const std::vector<LeafPerm>& tuple) {
    const std::uint32_t m = static_cast<std::uint32_t>(tuple.front().img.size());
    std::vector<bool> seen(m, false);
    std::vector<std::vector<std::uint32_t>> blocks;
    for (std::uint32_t start = 0; start < m; ++start) {
        if (seen[start]) continue;
        std::vector<std::uint32_t> block{start};
        seen[start] = true;
        for (std::size_t at = 0; at < block.size(); ++at)
            for (const LeafPerm& p : tuple) {
                const std::uint32_t fwd = p.img[block[at]];
                if (!seen[fwd]) {
                    seen[fwd] = true;
                    block.push_back(fwd);
                }
                for (std::uint32_t x = 0; x < m; ++x)
                    if (p.img[x] == block[at] && !seen[x]) {
                        seen[x] = true;
                        block.push_back(x);
                    }
            }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

// Canonical key of the action on one block: the lexicographically least
// flattened image table over every relabeling of the block, found by trying
// all |block|! bijections. Feasible for blocks of up to about 7 leaves.
inline std::vector<std::uint32_t> naive_block_key(const std::vector<std::uint32_t>& block,
                                                  const std::vector<LeafPerm>& tuple) {
    const std::size_t q = block.size();
    std::vector<std::uint32_t> pos(tuple.front().img.size(), 0);
    for (std::size_t i = 0; i < q; ++i) pos[block[i]] = static_cast<std::uint32_t>(i);

    std::vector<std::uint32_t> label(q);
    std::iota(label.begin(), label.end(), 0u);
    std::vector<std::uint32_t> best;
    do {
        std::vector<std::uint32_t> flat;
        flat.reserve(q * tuple.size());
        std::vector<std::uint32_t> inv(q);
        for (std::size_t i = 0; i < q; ++i) inv[label[i]] = static_cast<std::uint32_t>(i);
        for (const LeafPerm& p : tuple)
            for (std::size_t i = 0; i < q; ++i)
                flat.push_back(label[pos[p.img[block[inv[i]]]]]);
        if (best.empty() || flat < best) best = std::move(flat);
    } while (std::next_permutation(label.begin(), label.end()));
    return best;
}

// The census as (canonical key, count, mass) triples keyed by the oracle's
// own canonical form, for comparison against the library's after re-keying.
struct NaiveCensusEntry {
    std::vector<std::uint32_t> key;
    long count = 0;
    Rat mass;
};

inline std::vector<NaiveCensusEntry> naive_census(const std::vector<LeafPerm>& tuple, int level,
                                                  const Lambda& lambda) {
    std::vector<NaiveCensusEntry> out;
    for (const auto& block : naive_blocks(tuple)) {
        Rat mass = 0;
        for (const std::uint32_t leaf : block) mass += naive_mu(Word::from_index(leaf, level), lambda);
        const auto key = naive_block_key(block, tuple);
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const NaiveCensusEntry& e) { return e.key == key; });
        if (it == out.end()) out.push_back({key, 1, mass});
        else {
            ++it->count;
            it->mass += mass;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const NaiveCensusEntry& a, const NaiveCensusEntry& b) { return a.key < b.key; });
    return out;
}

// Mass of the k mu-lightest level-L leaves inside the cylinder set, by
// explicit enumeration and sorting. Feasible up to about L = 16.
inline Rat naive_lightest_mass(const dyadic::CylinderSet& a, int level, std::uint64_t k,
                               const Lambda& lambda) {
    std::vector<Rat> masses;
    for (const Word& w : a.words())
        for (std::uint64_t s = 0; s < (std::uint64_t(1) << (level - w.size())); ++s)
            masses.push_back(naive_mu(w.concat(Word::from_index(s, level - w.size())), lambda));
    std::sort(masses.begin(), masses.end());
    Rat total = 0;
    for (std::uint64_t i = 0; i < k; ++i) total += masses[i];
    return total;
}

} // namespace oracle
