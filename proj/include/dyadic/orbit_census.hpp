#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/cylinder.hpp"
#include "dyadic/equidecompose.hpp"
#include "dyadic/error.hpp"
#include "dyadic/perm.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/table_map.hpp"
#include "dyadic/word.hpp"

namespace dyadic {

inline LeafPerm refine_leaf_perm(const LeafPerm& p, int level) {
    if (level < p.level) throw DomainError("cannot refine a leaf permutation to a coarser level");
    if (level > max_depth()) throw DomainError("refinement level exceeds the depth bound");
    const int d = level - p.level;
    std::vector<std::uint32_t> img(std::size_t(1) << level);
    const std::uint32_t low_mask = (1u << d) - 1;
    for (std::uint32_t i = 0; i < img.size(); ++i)
        img[i] = (p.img[i >> d] << d) | (i & low_mask);
    return LeafPerm::from_images(level, std::move(img));
}

inline int common_level(const std::vector<LeafPerm>& tuple) {
    if (tuple.empty()) throw DomainError("empty tuple");
    for (const LeafPerm& p : tuple)
        if (p.level != tuple.front().level)
            throw DomainError("tuple members live at different levels; refine first");
    return tuple.front().level;
}

// Connected components of the union of the generators' functional graphs on
// the 2^L leaves: the finite orbits. Blocks are sorted internally and listed
// by least leaf.
inline std::vector<std::vector<std::uint32_t>> orbit_partition(const std::vector<LeafPerm>& tuple) {
    const int level = common_level(tuple);
    const std::uint32_t m = 1u << level;
    std::vector<std::uint32_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0u);
    const auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const LeafPerm& g : tuple)
        for (std::uint32_t i = 0; i < m; ++i) {
            const std::uint32_t a = find(i), b = find(g.img[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<std::vector<std::uint32_t>> blocks;
    std::vector<std::int64_t> slot(m, -1);
    for (std::uint32_t i = 0; i < m; ++i) {
        const std::uint32_t root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::int64_t>(blocks.size());
            blocks.emplace_back();
        }
        blocks[static_cast<std::size_t>(slot[root])].push_back(i);
    }
    return blocks;
}

// The simultaneous-conjugacy class of a transitive generator tuple, in a
// canonical form: the lexicographically least relabeling among those induced
// by breadth-first traversal from each base point, generators visited in
// order. Two tuples get the same canonical form exactly when some relabeling
// carries one to the other.
struct TransitiveTupleType {
    int n = 0;
    int q = 0;
    std::vector<Perm> gens;

    std::string encode() const {
        std::string s = std::to_string(q) + ":";
        for (std::size_t j = 0; j < gens.size(); ++j) {
            if (j) s += '|';
            for (int i = 0; i < q; ++i) {
                if (i) s += ',';
                s += std::to_string(gens[j](static_cast<std::uint32_t>(i)));
            }
        }
        return s;
    }

    friend bool operator==(const TransitiveTupleType&, const TransitiveTupleType&) = default;
    friend std::strong_ordering operator<=>(const TransitiveTupleType& a,
                                            const TransitiveTupleType& b) {
        return a.encode() <=> b.encode();
    }
};

namespace detail {

// BFS labeling from one base; returns false when the forward orbit of the
// base misses part of the set (the tuple is not transitive).
inline bool bfs_labels(const std::vector<Perm>& gens, int q, std::uint32_t base,
                       std::vector<std::uint32_t>& label, std::vector<std::uint32_t>& order) {
    label.assign(static_cast<std::size_t>(q), UINT32_MAX);
    order.clear();
    label[base] = 0;
    order.push_back(base);
    for (std::size_t head = 0; head < order.size(); ++head)
        for (const Perm& g : gens) {
            const std::uint32_t y = g(order[head]);
            if (label[y] == UINT32_MAX) {
                label[y] = static_cast<std::uint32_t>(order.size());
                order.push_back(y);
            }
        }
    return order.size() == static_cast<std::size_t>(q);
}

inline std::vector<std::uint32_t> relabel_flat(const std::vector<Perm>& gens,
                                               const std::vector<std::uint32_t>& label,
                                               const std::vector<std::uint32_t>& order) {
    std::vector<std::uint32_t> flat;
    flat.reserve(gens.size() * order.size());
    for (const Perm& g : gens)
        for (const std::uint32_t x : order) flat.push_back(label[g(x)]);
    return flat;
}

} // namespace detail

inline TransitiveTupleType canonical_type(const std::vector<Perm>& gens) {
    if (gens.empty()) throw DomainError("empty generator tuple");
    const int q = gens.front().degree();
    for (const Perm& g : gens)
        if (g.degree() != q) throw DomainError("generator degrees differ");
    std::vector<std::uint32_t> label, order, best;
    for (std::uint32_t base = 0; base < static_cast<std::uint32_t>(q); ++base) {
        if (!detail::bfs_labels(gens, q, base, label, order))
            throw DomainError("generator tuple is not transitive");
        auto flat = detail::relabel_flat(gens, label, order);
        if (best.empty() || flat < best) best = std::move(flat);
    }
    TransitiveTupleType t;
    t.n = static_cast<int>(gens.size());
    t.q = q;
    for (std::size_t j = 0; j < gens.size(); ++j)
        t.gens.push_back(Perm::from_images(std::vector<std::uint32_t>(
            best.begin() + static_cast<std::ptrdiff_t>(j * static_cast<std::size_t>(q)),
            best.begin() + static_cast<std::ptrdiff_t>((j + 1) * static_cast<std::size_t>(q)))));
    return t;
}

struct CensusEntry {
    TransitiveTupleType type;
    int count = 0;
    Rat mass;
    std::vector<std::vector<std::uint32_t>> blocks;
};

struct OrbitCensus {
    int level = 0;
    Rat lambda_value;
    std::vector<CensusEntry> entries;
};

namespace detail {

inline Rat mass_of_leaves(const std::vector<std::uint32_t>& leaves, int level,
                          const Lambda& lambda) {
    const Int p = numerator(lambda.value());
    const Int q = denominator(lambda.value());
    const Int r = q - p;
    std::vector<Int> pk(static_cast<std::size_t>(level) + 1), rk(pk.size());
    pk[0] = rk[0] = 1;
    for (std::size_t i = 1; i < pk.size(); ++i) {
        pk[i] = pk[i - 1] * p;
        rk[i] = rk[i - 1] * r;
    }
    Int num = 0;
    for (const std::uint32_t leaf : leaves) {
        const int ones = std::popcount(leaf);
        num += pk[static_cast<std::size_t>(level - ones)] * rk[static_cast<std::size_t>(ones)];
    }
    Int den = 1;
    for (int i = 0; i < level; ++i) den *= q;
    return Rat(num, den);
}

inline std::vector<Perm> restrict_tuple(const std::vector<LeafPerm>& tuple,
                                        const std::vector<std::uint32_t>& block) {
    std::vector<std::uint32_t> pos(std::size_t(1) << tuple.front().level, UINT32_MAX);
    for (std::uint32_t i = 0; i < block.size(); ++i) pos[block[i]] = i;
    std::vector<Perm> local;
    local.reserve(tuple.size());
    for (const LeafPerm& g : tuple) {
        std::vector<std::uint32_t> img(block.size());
        for (std::uint32_t i = 0; i < block.size(); ++i) img[i] = pos[g.img[block[i]]];
        local.push_back(Perm::from_images(std::move(img)));
    }
    return local;
}

} // namespace detail

// The complete leaf-level conjugacy bookkeeping of a tuple: its orbit blocks
// grouped by canonical type, with exact masses.
inline OrbitCensus census(const std::vector<LeafPerm>& tuple, const Lambda& lambda) {
    const int level = common_level(tuple);
    OrbitCensus out;
    out.level = level;
    out.lambda_value = lambda.value();
    std::vector<std::pair<TransitiveTupleType, std::vector<std::uint32_t>>> typed;
    for (auto& block : orbit_partition(tuple))
        typed.emplace_back(canonical_type(detail::restrict_tuple(tuple, block)), std::move(block));
    std::sort(typed.begin(), typed.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.front() < b.second.front();
    });
    for (auto& [type, block] : typed) {
        if (out.entries.empty() || !(out.entries.back().type == type)) {
            CensusEntry e;
            e.type = type;
            e.mass = 0;
            out.entries.push_back(std::move(e));
        }
        CensusEntry& e = out.entries.back();
        e.count += 1;
        e.mass += detail::mass_of_leaves(block, level, lambda);
        e.blocks.push_back(std::move(block));
    }
    return out;
}

// Every canonical transitive n-tuple type on at most s points, by exhaustive
// enumeration over S_q^n. The workload is factorial, so it is capped.
inline std::vector<TransitiveTupleType> enumerate_transitive_types(int n, int s) {
    if (n < 1 || s < 1) throw DomainError("need n >= 1 generators and size bound s >= 1");
    if (s > kMaxSymmetricDegree)
        throw DomainError("type size bound capped at " + std::to_string(kMaxSymmetricDegree));
    constexpr double kWorkBound = 1 << 22;
    double work = 0;
    for (int q = 1; q <= s; ++q) {
        double fact = 1;
        for (int i = 2; i <= q; ++i) fact *= i;
        double tuples = 1;
        for (int j = 0; j < n; ++j) tuples *= fact;
        work += tuples;
    }
    if (work > kWorkBound)
        throw DomainError("type enumeration over S_" + std::to_string(s) + "^" +
                          std::to_string(n) + " exceeds the configured work bound");

    std::set<TransitiveTupleType> types;
    std::vector<std::uint32_t> label, order;
    for (int q = 1; q <= s; ++q) {
        const std::vector<Perm> sq = all_perms(q);
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<Perm> gens;
            gens.reserve(static_cast<std::size_t>(n));
            for (const std::size_t i : idx) gens.push_back(sq[i]);
            if (detail::bfs_labels(gens, q, 0, label, order)) types.insert(canonical_type(gens));
            int j = n - 1;
            for (; j >= 0; --j) {
                if (++idx[static_cast<std::size_t>(j)] < sq.size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
            if (j < 0) break;
        }
    }
    return {types.begin(), types.end()};
}

// Does every transitive type of size <= s appear with at least N orbit
// blocks? The report lists each type that falls short, with its found count.
struct EnCheckResult {
    bool ok = false;
    std::vector<std::pair<TransitiveTupleType, int>> missing;
};

inline EnCheckResult en_surrogate_check(const std::vector<LeafPerm>& tuple, const Lambda& lambda,
                                        int s, int multiplicity) {
    if (multiplicity < 1) throw DomainError("multiplicity must be at least 1");
    const OrbitCensus c = census(tuple, lambda);
    EnCheckResult r;
    for (const TransitiveTupleType& t : enumerate_transitive_types(
             static_cast<int>(tuple.size()), s)) {
        int found = 0;
        for (const CensusEntry& e : c.entries)
            if (e.type == t) {
                found = e.count;
                break;
            }
        if (found < multiplicity) r.missing.emplace_back(t, found);
    }
    r.ok = r.missing.empty();
    return r;
}

// The leaf realization of a permutation of m = 2^l symbols: sigma acting on
// the level-l leaves by index. A homomorphic embedding of S_m.
inline LeafPerm psi_embed(const Perm& sigma) {
    const int m = sigma.degree();
    if (m < 1 || (m & (m - 1)) != 0) throw DomainError("degree must be a power of two");
    const int level = std::countr_zero(static_cast<unsigned>(m));
    if (level > max_depth()) throw DomainError("degree exceeds the depth bound");
    return LeafPerm::from_images(level, sigma.images());
}

namespace detail {

// The lexicographically least label-respecting isomorphism between two
// blocks of the same type, emitted as table rows word(P[i])s -> word(Q[m i])s'.
// An isomorphism is pinned by the image of one point, so scanning all q
// candidate images finds every one of them.
inline std::vector<TablePair> block_iso_rows(const std::vector<std::uint32_t>& pb,
                                             const std::vector<std::uint32_t>& qb, int level,
                                             const std::vector<LeafPerm>& s_tuple,
                                             const std::vector<LeafPerm>& t_tuple, const Word& s,
                                             const Word& s2) {
    const std::size_t q = pb.size();
    if (q != qb.size()) throw DomainError("internal: matched blocks differ in size");
    const std::vector<Perm> gp = restrict_tuple(s_tuple, pb);
    const std::vector<Perm> gq = restrict_tuple(t_tuple, qb);
    std::vector<std::uint32_t> best;
    std::vector<std::uint32_t> m(q), queue;
    for (std::uint32_t t0 = 0; t0 < q; ++t0) {
        std::fill(m.begin(), m.end(), UINT32_MAX);
        queue.clear();
        m[0] = t0;
        queue.push_back(0);
        bool ok = true;
        for (std::size_t head = 0; head < queue.size() && ok; ++head) {
            const std::uint32_t x = queue[head];
            for (std::size_t j = 0; j < gp.size(); ++j) {
                const std::uint32_t y = gp[j](x);
                const std::uint32_t ym = gq[j](m[x]);
                if (m[y] == UINT32_MAX) {
                    m[y] = ym;
                    queue.push_back(y);
                } else if (m[y] != ym) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok || queue.size() != q) continue;
        if (best.empty() || m < best) best = m;
    }
    if (best.empty()) throw DomainError("internal: equal-type blocks admit no isomorphism");
    std::vector<TablePair> rows;
    rows.reserve(q);
    for (std::uint32_t i = 0; i < q; ++i)
        rows.push_back({Word::from_index(pb[i], level).concat(s),
                        Word::from_index(qb[best[i]], level).concat(s2)});
    return rows;
}

inline Word level_prefix(const Word& w, int level) {
    return Word{w.bits & Word::mask(level), static_cast<std::uint8_t>(level)};
}

} // namespace detail

// Conjugate one tuple to another inside the full group. With matching censuses
// and equal per-type block counts the result is exact and everywhere defined;
// with unequal counts (possible only off lambda = 1/2) the per-type transversals
// are bridged approximately and the conjugation identity holds off a set whose
// mass is reported and bounded by eps.
struct ConjugacyResult {
    TableMap map;
    bool exact = false;
    CylinderSet uncovered_dom, uncovered_rng;
    std::vector<Rat> residuals; // audited defect of the conjugation identity, per generator
};

inline ConjugacyResult conjugate_tuples(const std::vector<LeafPerm>& s_tuple,
                                        const std::vector<LeafPerm>& t_tuple,
                                        const Lambda& lambda, const Rat& eps) {
    if (s_tuple.size() != t_tuple.size()) throw DomainError("tuple lengths differ");
    const int level = common_level(s_tuple);
    if (common_level(t_tuple) != level)
        throw DomainError("tuples live at different levels; refine first");

    const OrbitCensus cs = census(s_tuple, lambda);
    const OrbitCensus ct = census(t_tuple, lambda);
    if (cs.entries.size() != ct.entries.size())
        throw DomainError("census type sets differ between the two tuples");
    int unequal = 0;
    for (std::size_t k = 0; k < cs.entries.size(); ++k) {
        if (!(cs.entries[k].type == ct.entries[k].type))
            throw DomainError("census type " + cs.entries[k].type.encode() +
                              " is present on one side only");
        if (cs.entries[k].count != ct.entries[k].count) {
            if (lambda.is_half())
                throw DomainError("invariant-measure obstruction: type " +
                                  cs.entries[k].type.encode() + " has " +
                                  std::to_string(cs.entries[k].count) + " blocks against " +
                                  std::to_string(ct.entries[k].count));
            ++unequal;
        }
    }

    std::vector<TablePair> rows;
    for (std::size_t k = 0; k < cs.entries.size(); ++k) {
        const CensusEntry& se = cs.entries[k];
        const CensusEntry& te = ct.entries[k];
        if (se.count == te.count) {
            for (int r = 0; r < se.count; ++r) {
                auto block_rows = detail::block_iso_rows(se.blocks[static_cast<std::size_t>(r)],
                                                         te.blocks[static_cast<std::size_t>(r)],
                                                         level, s_tuple, t_tuple, Word{}, Word{});
                rows.insert(rows.end(), block_rows.begin(), block_rows.end());
            }
            continue;
        }
        // Bridge the transversals (one least leaf per block) approximately.
        // The budget shrinks by the worst block-to-leaf mass ratio, so that
        // saturating the bridged pieces over whole blocks stays within eps.
        std::vector<Word> sa, tb;
        Rat ratio = 1;
        const auto collect = [&](const CensusEntry& e, std::vector<Word>& out) {
            for (const auto& block : e.blocks) {
                const Word least = Word::from_index(block.front(), level);
                ratio = std::max(ratio,
                                 detail::mass_of_leaves(block, level, lambda) / mu(least, lambda));
                out.push_back(least);
            }
        };
        collect(se, sa);
        collect(te, tb);
        const Rat budget = eps / (Rat(unequal) * ratio);
        const auto bridge = equidecompose_onto(CylinderSet::canonical(std::move(sa)),
                                               CylinderSet::canonical(std::move(tb)), lambda,
                                               budget);
        for (const TablePair& row : bridge.map.rows()) {
            // A merged bridge row can span several transversal leaves; carve
            // it back to level-L pieces so each lands in one block.
            std::vector<std::pair<Word, Word>> pieces;
            if (row.src.size() >= level) {
                pieces.emplace_back(row.src, row.dst);
            } else {
                for (const Word& leaf : refine_to_level(
                         CylinderSet::canonical({row.src}), level)) {
                    pieces.emplace_back(leaf, row.dst.concat(leaf.suffix_from(row.src.size())));
                }
            }
            for (const auto& [src, dst] : pieces) {
                const std::uint32_t sleaf =
                    static_cast<std::uint32_t>(detail::level_prefix(src, level).index());
                const std::uint32_t tleaf =
                    static_cast<std::uint32_t>(detail::level_prefix(dst, level).index());
                const auto find_block = [&](const CensusEntry& e, std::uint32_t leaf)
                    -> const std::vector<std::uint32_t>& {
                    for (const auto& block : e.blocks)
                        if (block.front() == leaf) return block;
                    throw DomainError("internal: bridge row escapes the transversal");
                };
                auto block_rows = detail::block_iso_rows(
                    find_block(se, sleaf), find_block(te, tleaf), level, s_tuple, t_tuple,
                    src.suffix_from(level), dst.suffix_from(level));
                rows.insert(rows.end(), block_rows.begin(), block_rows.end());
            }
        }
    }

    ConjugacyResult out;
    out.map = TableMap::from_pairs(std::move(rows));
    out.exact = unequal == 0;
    out.uncovered_dom = complement(out.map.domain());
    out.uncovered_rng = complement(out.map.range());
    for (std::size_t i = 0; i < s_tuple.size(); ++i) {
        const TableMap composed = compose(compose(out.map, from_leaf_perm(s_tuple[i]).table()),
                                          inverse(out.map));
        out.residuals.push_back(defect_du(composed, from_leaf_perm(t_tuple[i]).table(), lambda));
    }
    return out;
}

// Push a tuple within eps of one realizing every type of size <= s at least
// N times: find an invariant union of light orbit blocks, clear it, and
// implant N fresh copies of each type, leftovers becoming fixed points.
struct DensifyResult {
    std::vector<LeafPerm> tuple;
    int level = 0;
    CylinderSet region;
    Rat region_mass;
};

inline DensifyResult densify(const std::vector<LeafPerm>& input, const Lambda& lambda,
                             const Rat& eps, int s, int multiplicity) {
    if (eps <= 0) throw DomainError("approximation budget must be positive");
    if (multiplicity < 1) throw DomainError("multiplicity must be at least 1");
    const int level0 = common_level(input);
    const int n = static_cast<int>(input.size());
    const auto types = enumerate_transitive_types(n, s);
    std::size_t needed = 0;
    for (const auto& t : types) needed += static_cast<std::size_t>(t.q) * multiplicity;

    // Every candidate region has at least `needed` leaves, and a leaf at the
    // deepest reachable level still weighs min(lambda, 1-lambda)^depth. When
    // even that floor meets the budget no level can succeed, so the scan
    // below would only exhaust the depth bound; report that outcome now.
    if (needed > 0) {
        const Rat thin = std::min(lambda.zero_mass(), lambda.one_mass());
        Rat floor_mass = Rat(static_cast<long>(needed));
        for (int i = 0; i < max_depth(); ++i) floor_mass *= thin;
        if (!(floor_mass < eps))
            throw DomainError("no invariant block union below mass " + format_rat(eps) +
                              " with enough leaves exists within depth " +
                              std::to_string(max_depth()));
    }

    constexpr std::uint64_t kLeafBudget = std::uint64_t(1) << 24;
    for (int level = level0; level <= max_depth(); ++level) {
        if ((std::uint64_t(1) << level) * static_cast<std::uint64_t>(n) > kLeafBudget)
            throw DomainError("no invariant block union below mass " + format_rat(eps) +
                              " found within the materialization budget of 2^24 leaf slots"
                              " (stopped before depth " + std::to_string(level) + ")");
        std::vector<LeafPerm> refined;
        refined.reserve(input.size());
        for (const LeafPerm& p : input) refined.push_back(refine_leaf_perm(p, level));
        auto blocks = orbit_partition(refined);
        std::vector<Rat> bmass(blocks.size());
        std::vector<std::size_t> order(blocks.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < blocks.size(); ++i)
            bmass[i] = detail::mass_of_leaves(blocks[i], level, lambda);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (bmass[a] != bmass[b]) return bmass[a] < bmass[b];
            return blocks[a].front() < blocks[b].front();
        });

        Rat total = 0;
        std::vector<std::uint32_t> region_leaves;
        for (const std::size_t i : order) {
            if (region_leaves.size() >= needed) break;
            if (!(total + bmass[i] < eps)) break;
            total += bmass[i];
            region_leaves.insert(region_leaves.end(), blocks[i].begin(), blocks[i].end());
        }
        if (region_leaves.size() < needed) continue;
        std::sort(region_leaves.begin(), region_leaves.end());

        DensifyResult out;
        out.level = level;
        out.region_mass = total;
        std::vector<std::vector<std::uint32_t>> img(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) img[static_cast<std::size_t>(j)] = refined[static_cast<std::size_t>(j)].img;
        for (const std::uint32_t leaf : region_leaves)
            for (int j = 0; j < n; ++j) img[static_cast<std::size_t>(j)][leaf] = leaf;
        std::size_t at = 0;
        for (const auto& t : types)
            for (int rep = 0; rep < multiplicity; ++rep) {
                for (int i = 0; i < t.q; ++i)
                    for (int j = 0; j < n; ++j)
                        img[static_cast<std::size_t>(j)][region_leaves[at + static_cast<std::size_t>(i)]] =
                            region_leaves[at + t.gens[static_cast<std::size_t>(j)](static_cast<std::uint32_t>(i))];
                at += static_cast<std::size_t>(t.q);
            }
        for (int j = 0; j < n; ++j)
            out.tuple.push_back(LeafPerm::from_images(level, std::move(img[static_cast<std::size_t>(j)])));
        std::vector<Word> region_words;
        region_words.reserve(region_leaves.size());
        for (const std::uint32_t leaf : region_leaves)
            region_words.push_back(Word::from_index(leaf, level));
        out.region = CylinderSet::canonical(std::move(region_words));
        return out;
    }
    throw DomainError("no invariant block union below mass " + format_rat(eps) +
                      " with enough leaves exists within depth " + std::to_string(max_depth()));
}

} // namespace dyadic
