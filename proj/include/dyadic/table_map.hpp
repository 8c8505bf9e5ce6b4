#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/cylinder.hpp"
#include "dyadic/error.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/word.hpp"

namespace dyadic {

// One row of a table map: the cylinder [src] is carried onto [dst] by
// substituting the prefix and keeping the tail. Equal lengths are what keep
// these maps inside the tail relation, and they force every table to move
// kraft mass rigidly: kraft(sources) = kraft(targets) holds structurally.
struct TablePair {
    Word src, dst;
    friend bool operator==(const TablePair&, const TablePair&) = default;
};

// A partial injection of the space given by finitely many prefix
// substitutions. Canonical form: rows sorted by source, sources prefix-free,
// targets prefix-free, and no two rows that are the two halves of a coarser
// row (those merge). Canonical form makes equality of maps row-list equality.
class TableMap {
public:
    TableMap() = default;

    static TableMap from_pairs(std::vector<TablePair> rows) {
        canonicalize(rows);
        TableMap t;
        t.rows_ = std::move(rows);
        return t;
    }
    static TableMap from_pairs(std::initializer_list<TablePair> rows) {
        return from_pairs(std::vector<TablePair>(rows));
    }

    static TableMap identity() { return from_pairs({TablePair{Word{}, Word{}}}); }
    static TableMap identity_on(const CylinderSet& a) {
        std::vector<TablePair> rows;
        rows.reserve(a.size());
        for (const Word& w : a.words()) rows.push_back({w, w});
        return from_pairs(std::move(rows));
    }

    const std::vector<TablePair>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }
    int max_len() const {
        int m = 0;
        for (const TablePair& r : rows_) m = std::max(m, r.src.size());
        return m;
    }

    CylinderSet domain() const {
        std::vector<Word> ws;
        ws.reserve(rows_.size());
        for (const TablePair& r : rows_) ws.push_back(r.src);
        return CylinderSet::canonical(std::move(ws));
    }
    CylinderSet range() const {
        std::vector<Word> ws;
        ws.reserve(rows_.size());
        for (const TablePair& r : rows_) ws.push_back(r.dst);
        return CylinderSet::canonical(std::move(ws));
    }

    bool is_full() const { return kraft(domain()) == 1; }

    friend bool operator==(const TableMap&, const TableMap&) = default;

    // Validation plus merge, mirroring CylinderSet::normalize. Rows sorted
    // by source keep sibling rows adjacent, so one stack fold merges all
    // coarsenable pairs.
    static void canonicalize(std::vector<TablePair>& rows) {
        for (const TablePair& r : rows)
            if (r.src.size() != r.dst.size())
                throw DomainError("table row " + r.src.str() + " -> " + r.dst.str() +
                                  " changes word length");
        std::sort(rows.begin(), rows.end(),
                  [](const TablePair& a, const TablePair& b) { return a.src < b.src; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i - 1].src.is_prefix_of(rows[i].src))
                throw DomainError("overlapping sources " + rows[i - 1].src.str() + " and " +
                                  rows[i].src.str());
        {
            std::vector<Word> dsts;
            dsts.reserve(rows.size());
            for (const TablePair& r : rows) dsts.push_back(r.dst);
            std::sort(dsts.begin(), dsts.end());
            for (std::size_t i = 1; i < dsts.size(); ++i)
                if (dsts[i - 1].is_prefix_of(dsts[i]))
                    throw DomainError("overlapping targets " + dsts[i - 1].str() + " and " +
                                      dsts[i].str());
        }
        std::vector<TablePair> out;
        out.reserve(rows.size());
        for (const TablePair& r : rows) {
            out.push_back(r);
            while (out.size() >= 2) {
                const TablePair& a = out[out.size() - 2];
                const TablePair& b = out.back();
                if (!are_siblings(a.src, b.src) || !are_siblings(a.dst, b.dst) ||
                    a.dst.last_bit() != 0)
                    break;
                const TablePair merged{a.src.parent(), a.dst.parent()};
                out.pop_back();
                out.back() = merged;
            }
        }
        rows = std::move(out);
    }

private:
    std::vector<TablePair> rows_;
};

// Where f sends the cylinder [w]: the image word of the same length.
// Requires a row whose source is a prefix of w; a row source strictly below
// w means w is too coarse to have a single image.
inline Word apply_prefix(const TableMap& f, const Word& w) {
    const auto& rows = f.rows();
    const auto it = std::upper_bound(
        rows.begin(), rows.end(), w,
        [](const Word& x, const TablePair& r) { return x < r.src; });
    if (it != rows.begin() && std::prev(it)->src.is_prefix_of(w)) {
        const TablePair& r = *std::prev(it);
        return r.dst.concat(w.suffix_from(r.src.size()));
    }
    if (it != rows.end() && w.is_prefix_of(it->src))
        throw DomainError("word " + w.str() + " is coarser than table row source " +
                          it->src.str() + "; refine before applying");
    throw DomainError("word " + w.str() + " lies outside the domain of the table");
}

// Composition (f after g) on the largest domain where it is defined: the
// part of each g-row whose image meets a source of f. When rng(g) is inside
// dom(f) this is total composition; otherwise it is the honest partial one.
inline TableMap compose(const TableMap& f, const TableMap& g) {
    std::vector<TablePair> rows;
    for (const TablePair& gr : g.rows())
        for (const TablePair& fr : f.rows()) {
            if (fr.src.is_prefix_of(gr.dst)) {
                rows.push_back({gr.src, fr.dst.concat(gr.dst.suffix_from(fr.src.size()))});
            } else if (gr.dst.is_prefix_of(fr.src)) {
                const Word tail = fr.src.suffix_from(gr.dst.size());
                rows.push_back({gr.src.concat(tail), fr.dst});
            }
        }
    return TableMap::from_pairs(std::move(rows));
}

inline TableMap inverse(const TableMap& f) {
    std::vector<TablePair> rows;
    rows.reserve(f.rows().size());
    for (const TablePair& r : f.rows()) rows.push_back({r.dst, r.src});
    return TableMap::from_pairs(std::move(rows));
}

// Points moved by f. A canonical row with src != dst moves every point of
// its cylinder (equal-length distinct prefixes give disjoint cylinders), so
// the support is just the union of the moving sources.
inline CylinderSet support(const TableMap& f) {
    std::vector<Word> ws;
    for (const TablePair& r : f.rows())
        if (r.src != r.dst) ws.push_back(r.src);
    return CylinderSet::canonical(std::move(ws));
}

// The uniform distance mu{x : f(x) != g(x)} between two everywhere-defined
// tables. On the common source refinement the two images either agree on a
// whole piece or on none of it, so the distance is an exact finite sum.
inline Rat du(const TableMap& f, const TableMap& g, const Lambda& lambda) {
    if (!f.is_full() || !g.is_full())
        throw DomainError("uniform distance needs everywhere-defined maps");
    std::vector<Word> differing;
    for (const TablePair& fr : f.rows())
        for (const TablePair& gr : g.rows()) {
            if (fr.src.is_prefix_of(gr.src)) {
                if (fr.dst.concat(gr.src.suffix_from(fr.src.size())) != gr.dst)
                    differing.push_back(gr.src);
            } else if (gr.src.is_prefix_of(fr.src) && gr.src != fr.src) {
                if (gr.dst.concat(fr.src.suffix_from(gr.src.size())) != fr.dst)
                    differing.push_back(fr.src);
            }
        }
    return mu(std::span(differing), lambda);
}

// The Radon-Nikodym cocycle of f at lambda, one exact value per row:
// d(mu o f)/d(mu) on [src] equals mu([dst]) / mu([src]).
inline std::vector<std::pair<Word, Rat>> rn_cocycle(const TableMap& f, const Lambda& lambda) {
    std::vector<std::pair<Word, Rat>> vals;
    vals.reserve(f.rows().size());
    for (const TablePair& r : f.rows())
        vals.emplace_back(r.src, mu(r.dst, lambda) / mu(r.src, lambda));
    return vals;
}

// Union of partial maps with pairwise disjoint domains and ranges. Overlaps
// are an error (the offending words appear in the message, courtesy of the
// shared canonicalizer).
inline TableMap glue(const std::vector<TableMap>& parts) {
    std::vector<TablePair> rows;
    for (const TableMap& p : parts) rows.insert(rows.end(), p.rows().begin(), p.rows().end());
    return TableMap::from_pairs(std::move(rows));
}

// An everywhere-defined, surjective table: a group element rather than a
// partial isomorphism.
class FullMap {
public:
    explicit FullMap(TableMap t) : t_(std::move(t)) {
        if (!t_.is_full())
            throw DomainError("map is not everywhere defined: domain kraft " +
                              format_rat(kraft(t_.domain())));
    }
    const TableMap& table() const { return t_; }
    operator const TableMap&() const { return t_; }
    friend bool operator==(const FullMap&, const FullMap&) = default;

private:
    TableMap t_;
};

// A table together with the cylinders on which it stays undefined, for maps
// that only stabilize at infinite depth. The flagship example is the
// odometer: add one with carry, which has no finite table at the all-ones
// point.
struct TruncatedMap {
    TableMap table;
    CylinderSet defect_dom;
    CylinderSet defect_rng;
};

// Depth-d truncation of the binary odometer x -> x + 1: carries resolve as
// 1^k 0 tail -> 0^k 1 tail for k < d, and the all-ones cylinder of depth d
// is left as the defect.
inline TruncatedMap odometer(int d) {
    if (d < 1 || d > max_depth())
        throw DomainError("odometer depth must lie in [1, " + std::to_string(max_depth()) + "]");
    std::vector<TablePair> rows;
    Word ones, zeros; // 1^k and 0^k
    for (int k = 0; k < d; ++k) {
        rows.push_back({ones.push(0), zeros.push(1)});
        ones = ones.push(1);
        zeros = zeros.push(0);
    }
    TruncatedMap t;
    t.table = TableMap::from_pairs(std::move(rows));
    t.defect_dom = CylinderSet::canonical({ones});
    t.defect_rng = CylinderSet::canonical({zeros});
    return t;
}

// A permutation of the 2^level cylinders at one fixed depth, the homogeneous
// normal form every full table reaches after refinement.
struct LeafPerm {
    int level = 0;
    std::vector<std::uint32_t> img;

    static LeafPerm from_images(int level, std::vector<std::uint32_t> img) {
        const std::uint64_t n = 1ull << level;
        if (level < 0 || level > max_depth() || img.size() != n)
            throw DomainError("leaf permutation needs 2^level images");
        std::vector<bool> seen(n, false);
        for (const std::uint32_t v : img) {
            if (v >= n || seen[v]) throw DomainError("leaf images are not a permutation");
            seen[v] = true;
        }
        LeafPerm p;
        p.level = level;
        p.img = std::move(img);
        return p;
    }
    static LeafPerm identity(int level) {
        std::vector<std::uint32_t> img(1ull << level);
        for (std::uint32_t i = 0; i < img.size(); ++i) img[i] = i;
        return from_images(level, std::move(img));
    }

    std::size_t size() const { return img.size(); }
    friend bool operator==(const LeafPerm&, const LeafPerm&) = default;
};

inline FullMap from_leaf_perm(const LeafPerm& p) {
    std::vector<TablePair> rows;
    rows.reserve(p.img.size());
    for (std::uint64_t i = 0; i < p.img.size(); ++i)
        rows.push_back({Word::from_index(i, p.level), Word::from_index(p.img[i], p.level)});
    return FullMap(TableMap::from_pairs(std::move(rows)));
}

inline LeafPerm to_leaf_perm(const TableMap& f, int level) {
    if (!f.is_full()) throw DomainError("only everywhere-defined maps flatten to leaf form");
    if (level < f.max_len())
        throw DomainError("level " + std::to_string(level) + " is coarser than the table depth " +
                          std::to_string(f.max_len()));
    std::vector<std::uint32_t> img(1ull << level);
    for (std::uint64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<std::uint32_t>(apply_prefix(f, Word::from_index(i, level)).index());
    return LeafPerm::from_images(level, std::move(img));
}

inline LeafPerm compose(const LeafPerm& f, const LeafPerm& g) {
    if (f.level != g.level) throw DomainError("leaf permutations live at different levels");
    std::vector<std::uint32_t> img(f.img.size());
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = f.img[g.img[i]];
    return LeafPerm::from_images(f.level, std::move(img));
}

} // namespace dyadic
