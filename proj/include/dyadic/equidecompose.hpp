#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/cylinder.hpp"
#include "dyadic/error.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/table_map.hpp"
#include "dyadic/word.hpp"

namespace dyadic {

inline const Int& binom(int n, int k) {
    static const std::vector<std::vector<Int>> table = [] {
        std::vector<std::vector<Int>> t(kDepthCeiling + 1);
        for (int i = 0; i <= kDepthCeiling; ++i) {
            t[i].resize(i + 1);
            t[i][0] = t[i][i] = 1;
            for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
        return t;
    }();
    if (n < 0 || k < 0 || k > n) {
        static const Int zero = 0;
        return zero;
    }
    return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

namespace detail {

// Order-preserving kraft transport between two canonical word lists: walk
// both in lexicographic order, repeatedly matching equal-kraft chunks and
// splitting whichever side currently holds the coarser word. The result is
// the canonical (merged) form of matching the level-L refinements leaf by
// leaf in lexicographic order, without materializing the refinements.
inline std::vector<TablePair> transport_rows(std::span<const Word> a, std::span<const Word> b,
                                             bool allow_b_surplus = false) {
    std::vector<TablePair> rows;
    rows.reserve(a.size() + b.size());
    std::vector<Word> sa, sb;
    std::size_t ia = 0, ib = 0;
    const auto pull = [](std::span<const Word> list, std::size_t& i, std::vector<Word>& stack,
                         Word& slot) {
        if (!stack.empty()) {
            slot = stack.back();
            stack.pop_back();
            return true;
        }
        if (i < list.size()) {
            slot = list[i++];
            return true;
        }
        return false;
    };
    Word u, v;
    bool have_u = false, have_v = false;
    while (true) {
        if (!have_u && !pull(a, ia, sa, u)) break;
        have_u = true;
        if (!have_v && !pull(b, ib, sb, v)) break;
        have_v = true;
        if (u.size() == v.size()) {
            rows.push_back({u, v});
            have_u = have_v = false;
        } else if (u.size() > v.size()) {
            sb.push_back(v.push(1));
            v = v.push(0);
        } else {
            sa.push_back(u.push(1));
            u = u.push(0);
        }
    }
    if (have_u || !sa.empty() || ia < a.size())
        throw DomainError("transport imbalance: source side has surplus kraft");
    if (!allow_b_surplus && (have_v || !sb.empty() || ib < b.size()))
        throw DomainError("transport imbalance: target side has surplus kraft");
    return rows;
}

// The mu_lambda-lightest `want` level-`level` leaves under a canonical word
// list. A leaf's mass depends only on its total zero count, so the plan is a
// walk over zero-count classes from the light end, with at most one class
// taken partially (ties inside it resolve to the lexicographically least
// leaves at materialization time).
struct SurplusPlan {
    int level = 0;
    Rat mass;
    int full_lo = 0, full_hi = -1; // zero-count range of fully taken classes
    int partial_class = -1;        // -1: none
    Int partial_count = 0;
};

inline SurplusPlan plan_surplus(std::span<const Word> heavy, int level, const Int& want,
                                const Lambda& lambda) {
    SurplusPlan plan;
    plan.level = level;
    const Int p = numerator(lambda.value());
    const Int q = denominator(lambda.value());
    const Int r = q - p;
    const bool zeros_heavier = lambda.value() > Rat(1, 2);

    std::vector<Int> count(static_cast<std::size_t>(level) + 1);
    for (const Word& w : heavy)
        for (int z = w.zeros(); z <= level - w.size() + w.zeros(); ++z)
            count[static_cast<std::size_t>(z)] += binom(level - w.size(), z - w.zeros());

    Int remaining = want;
    Int numerator_sum = 0;
    plan.full_lo = zeros_heavier ? 0 : level + 1;
    plan.full_hi = zeros_heavier ? -1 : level;
    for (int step = 0; step <= level && remaining > 0; ++step) {
        const int z = zeros_heavier ? step : level - step;
        if (count[static_cast<std::size_t>(z)] == 0) continue;
        const Int take = std::min(remaining, count[static_cast<std::size_t>(z)]);
        Int class_mass = take;
        for (int i = 0; i < z; ++i) class_mass *= p;
        for (int i = 0; i < level - z; ++i) class_mass *= r;
        numerator_sum += class_mass;
        if (take == count[static_cast<std::size_t>(z)]) {
            plan.full_hi = zeros_heavier ? z : plan.full_hi;
            plan.full_lo = zeros_heavier ? plan.full_lo : z;
        } else {
            plan.partial_class = z;
            plan.partial_count = take;
        }
        remaining -= take;
    }
    if (remaining > 0) throw DomainError("surplus plan exceeds available leaves");
    Int denom = 1;
    for (int i = 0; i < level; ++i) denom *= q;
    plan.mass = Rat(numerator_sum, denom);
    return plan;
}

inline constexpr std::size_t kMaterializeCap = std::size_t(1) << 25;

inline void check_cap(std::size_t n, int level) {
    if (n > kMaterializeCap)
        throw DomainError("surplus materialization at level " + std::to_string(level) +
                          " exceeds the word budget of " + std::to_string(kMaterializeCap));
}

// Minimal cylinder cover of {suffixes of length rem with total zero count <= c}
// (or >= c with ge = true), emitted in lexicographic order.
inline void threshold_cover(const Word& prefix, int rem, int zeros, int c, bool ge,
                            std::vector<Word>& out, int level) {
    const bool all_in = ge ? (zeros >= c) : (zeros + rem <= c);
    if (all_in) {
        check_cap(out.size() + 1, level);
        out.push_back(prefix);
        return;
    }
    const bool none_in = ge ? (zeros + rem < c) : (zeros > c);
    if (none_in) return;
    threshold_cover(prefix.push(0), rem - 1, zeros + 1, c, ge, out, level);
    threshold_cover(prefix.push(1), rem - 1, zeros, c, ge, out, level);
}

// The lexicographically least `take` leaves among suffixes of length rem
// with exactly `zeros` zeros, appended below `prefix` as full-length words.
inline void least_in_class(const Word& prefix, int rem, int zeros, Int take,
                           std::vector<Word>& out, int level) {
    if (take == 0) return;
    if (rem == 0) {
        check_cap(out.size() + 1, level);
        out.push_back(prefix);
        return;
    }
    const Int with0 = zeros >= 1 ? binom(rem - 1, zeros - 1) : Int(0);
    if (take <= with0) {
        least_in_class(prefix.push(0), rem - 1, zeros - 1, take, out, level);
    } else {
        if (with0 > 0) least_in_class(prefix.push(0), rem - 1, zeros - 1, with0, out, level);
        least_in_class(prefix.push(1), rem - 1, zeros, take - with0, out, level);
    }
}

inline std::vector<Word> materialize_surplus(std::span<const Word> heavy, const SurplusPlan& plan,
                                             const Lambda& lambda) {
    const bool zeros_heavier = lambda.value() > Rat(1, 2);
    std::vector<Word> out;
    for (const Word& w : heavy) {
        const int rem = plan.level - w.size();
        if (plan.full_hi >= plan.full_lo) {
            // Contiguous zero-count classes become one threshold condition on
            // the suffix zero count.
            if (zeros_heavier)
                threshold_cover(w, rem, 0, plan.full_hi - w.zeros(), false, out, plan.level);
            else
                threshold_cover(w, rem, 0, plan.full_lo - w.zeros(), true, out, plan.level);
        }
    }
    if (plan.partial_class >= 0 && plan.partial_count > 0) {
        Int left = plan.partial_count;
        for (const Word& w : heavy) {
            if (left == 0) break;
            const int rem = plan.level - w.size();
            const int z = plan.partial_class - w.zeros();
            if (z < 0 || z > rem) continue;
            const Int here = std::min(left, binom(rem, z));
            least_in_class(w, rem, z, here, out, plan.level);
            left -= here;
        }
    }
    return out;
}

} // namespace detail

// Is there a map with domain exactly A and range inside B? Exists precisely
// when kraft(A) <= kraft(B); the returned map is the canonical form of
// matching both refinements lexicographically at the common level.
struct PrecResult {
    bool possible = false;
    TableMap map;
    Rat kraft_a, kraft_b;
};

inline PrecResult prec(const CylinderSet& a, const CylinderSet& b) {
    if (a.empty() || b.empty()) throw DomainError("prec needs nonempty cylinder sets");
    PrecResult r;
    r.kraft_a = kraft(a);
    r.kraft_b = kraft(b);
    if (r.kraft_a > r.kraft_b) return r;
    r.possible = true;
    r.map = TableMap::from_pairs(detail::transport_rows(a.words(), b.words(), true));
    return r;
}

// A map carrying A onto B up to leftovers of mass at most eps. Exact (no
// leftovers) precisely when kraft(A) = kraft(B); otherwise the heavier side
// sheds its lightest level-L leaves for the least L that brings their mass
// under eps, which exists for lambda != 1/2 because light-leaf mass decays
// with depth. For lambda = 1/2 unequal krafts are a hard obstruction: every
// equal-length table preserves kraft.
struct EquidecompResult {
    TableMap map;
    CylinderSet uncovered_dom, uncovered_rng;
    int rounds = 0;
    std::vector<Rat> masses;
};

inline EquidecompResult equidecompose_onto(const CylinderSet& a, const CylinderSet& b,
                                           const Lambda& lambda, const Rat& eps) {
    if (a.empty() || mu(a, lambda) <= 0) throw DomainError("domain set has no mass");
    if (b.empty() || mu(b, lambda) <= 0) throw DomainError("range set has no mass");
    if (eps <= 0) throw DomainError("approximation budget must be positive");

    EquidecompResult res;
    const Rat ka = kraft(a), kb = kraft(b);
    if (ka == kb) {
        res.map = TableMap::from_pairs(detail::transport_rows(a.words(), b.words()));
        return res;
    }
    if (lambda.is_half())
        throw DomainError("invariant-measure obstruction: kraft(A) = " + format_rat(ka) +
                          " differs from kraft(B) = " + format_rat(kb) +
                          " and lambda = 1/2 admits no approximation");

    const bool a_heavy = ka > kb;
    const CylinderSet& heavy = a_heavy ? a : b;
    const CylinderSet& light = a_heavy ? b : a;
    const Rat delta = a_heavy ? ka - kb : kb - ka;

    int k2 = 0;
    if (!is_dyadic(delta, k2)) throw DomainError("internal: kraft surplus is not dyadic");
    const int level_min = std::max(heavy.max_len(), k2);

    detail::SurplusPlan chosen;
    bool found = false;
    for (int level = level_min; level <= max_depth(); ++level) {
        const Int want = numerator(delta) * (Int(1) << level) / denominator(delta);
        const auto plan = detail::plan_surplus(heavy.words(), level, want, lambda);
        res.masses.push_back(plan.mass);
        if (plan.mass <= eps) {
            chosen = plan;
            found = true;
            break;
        }
    }
    res.rounds = static_cast<int>(res.masses.size());
    if (!found)
        throw DomainError(
            "cannot reach leftover <= " + format_rat(eps) + " within depth " +
            std::to_string(max_depth()) + ": the lightest admissible leftover there is " +
            format_rat(res.masses.back()) + " exactly");

    // Count the canonical surplus words before emitting any: a full-class
    // threshold over a length-rem suffix covers with exactly binom(rem, c)
    // words, and the partial class contributes one word per leaf.
    Int planned = chosen.partial_count;
    if (chosen.full_hi >= chosen.full_lo) {
        const bool zeros_heavier = lambda.value() > Rat(1, 2);
        for (const Word& w : heavy.words()) {
            const int rem = chosen.level - w.size();
            const int c = (zeros_heavier ? chosen.full_hi : chosen.full_lo) - w.zeros();
            if (zeros_heavier ? c >= rem : c <= 0) planned += 1;
            else planned += binom(rem, c);
        }
    }
    if (planned > Int(detail::kMaterializeCap))
        throw DomainError("surplus materialization at level " + std::to_string(chosen.level) +
                          " needs " + planned.str() + " canonical words, over the budget of " +
                          std::to_string(detail::kMaterializeCap));

    const CylinderSet surplus = CylinderSet::canonical(
        detail::materialize_surplus(heavy.words(), chosen, lambda));
    const CylinderSet covered = set_difference(heavy, surplus);
    if (a_heavy) {
        res.map = TableMap::from_pairs(detail::transport_rows(covered.words(), light.words()));
        res.uncovered_dom = surplus;
    } else {
        res.map = TableMap::from_pairs(detail::transport_rows(light.words(), covered.words()));
        res.uncovered_rng = surplus;
    }
    return res;
}

// Distance from a partial map to an everywhere-defined one: the mass where f
// is undefined plus the mass where both are defined but disagree.
inline Rat defect_du(const TableMap& f, const TableMap& g, const Lambda& lambda) {
    if (!g.is_full()) throw DomainError("defect distance needs an everywhere-defined comparison map");
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
    return mu(complement(f.domain()), lambda) + mu(std::span(differing), lambda);
}

// The canonical two-step ladder: phi moves [00] to [01], psi moves [01] to
// [10]. Domains and ranges are pairwise disjoint, their union misses [11],
// and both statements hold for every lambda.
inline std::pair<TableMap, TableMap> pre_three_cycle(const Lambda& /*lambda*/) {
    const Word w00 = parse_word("00"), w01 = parse_word("01"), w10 = parse_word("10");
    return {TableMap::from_pairs({TablePair{w00, w01}}),
            TableMap::from_pairs({TablePair{w01, w10}})};
}

// Close a ladder into a genuine 3-cycle: phi, then psi, then back along
// (psi o phi)^{-1}, identity elsewhere. The result is everywhere defined,
// has order three, and its support is exactly dom phi u rng phi u rng psi.
inline FullMap three_cycle(const TableMap& phi, const TableMap& psi) {
    const CylinderSet dphi = phi.domain(), rphi = phi.range();
    const CylinderSet dpsi = psi.domain(), rpsi = psi.range();
    if (!disjoint(dphi, rphi)) throw DomainError("ladder start: rng phi meets dom phi");
    if (!(dpsi == rphi)) throw DomainError("ladder joint: dom psi differs from rng phi");
    const CylinderSet first_two = set_union(dphi, rphi);
    if (kraft(first_two) >= 1) throw DomainError("ladder start: dom phi u rng phi covers everything");
    if (!disjoint(rpsi, first_two)) throw DomainError("ladder end: rng psi meets dom phi u rng phi");
    const CylinderSet moved = set_union(first_two, rpsi);
    return FullMap(glue({phi, psi, inverse(compose(psi, phi)), TableMap::identity_on(complement(moved))}));
}

} // namespace dyadic
