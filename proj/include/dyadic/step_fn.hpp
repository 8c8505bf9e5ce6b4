#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dyadic/cylinder.hpp"
#include "dyadic/error.hpp"
#include "dyadic/perm.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/table_map.hpp"
#include "dyadic/word.hpp"

namespace dyadic {

// A measurable map X -> V that is constant on finitely many cylinders. The
// pieces form a canonical partition of X: sorted, prefix-free, kraft sum 1,
// and sibling pieces carrying the same value are merged, so equal functions
// have equal piece lists.
template <class V>
class StepFn {
public:
    using Piece = std::pair<Word, V>;

    static StepFn constant(V v) {
        StepFn f;
        f.pieces_.emplace_back(Word{}, std::move(v));
        return f;
    }

    static StepFn from_pieces(std::vector<Piece> pieces) {
        std::sort(pieces.begin(), pieces.end(),
                  [](const Piece& a, const Piece& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < pieces.size(); ++i)
            if (pieces[i - 1].first.is_prefix_of(pieces[i].first))
                throw DomainError("overlapping pieces " + pieces[i - 1].first.str() + " and " +
                                  pieces[i].first.str());
        {
            std::vector<Word> ws;
            ws.reserve(pieces.size());
            for (const Piece& p : pieces) ws.push_back(p.first);
            if (kraft(CylinderSet::canonical(std::move(ws))) != 1)
                throw DomainError("pieces do not cover the whole space");
        }
        std::vector<Piece> out;
        out.reserve(pieces.size());
        for (Piece& p : pieces) {
            out.push_back(std::move(p));
            while (out.size() >= 2) {
                const Piece& a = out[out.size() - 2];
                const Piece& b = out.back();
                if (!are_siblings(a.first, b.first) || !(a.second == b.second)) break;
                const Word parent = a.first.parent();
                V value = std::move(out.back().second);
                out.pop_back();
                out.back() = {parent, std::move(value)};
            }
        }
        StepFn f;
        f.pieces_ = std::move(out);
        return f;
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }

    // The value on [w]; w must be at least as deep as the piece containing it.
    const V& value_at(const Word& w) const {
        const auto it = std::upper_bound(
            pieces_.begin(), pieces_.end(), w,
            [](const Word& x, const Piece& p) { return x < p.first; });
        if (it != pieces_.begin() && std::prev(it)->first.is_prefix_of(w))
            return std::prev(it)->second;
        throw DomainError("word " + w.str() + " is coarser than the pieces of the step function");
    }

    friend bool operator==(const StepFn&, const StepFn&) = default;

private:
    std::vector<Piece> pieces_;
};

// Common refinement of two step functions: the pieces of the coarsest
// partition refining both, each with the pair of values. Both partitions
// tile X in lexicographic order, so one sweep suffices.
template <class A, class B>
std::vector<std::tuple<Word, A, B>> common_refinement(const StepFn<A>& f, const StepFn<B>& g) {
    std::vector<std::tuple<Word, A, B>> out;
    const auto& fp = f.pieces();
    const auto& gp = g.pieces();
    std::size_t i = 0, j = 0;
    while (i < fp.size() && j < gp.size()) {
        const auto& [u, a] = fp[i];
        const auto& [v, b] = gp[j];
        if (u.is_prefix_of(v)) {
            out.emplace_back(v, a, b);
            ++j;
        } else if (v.is_prefix_of(u)) {
            out.emplace_back(u, a, b);
            ++i;
        } else if (u < v) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

template <class A, class B, class F>
auto zip_with(const StepFn<A>& f, const StepFn<B>& g, F&& combine)
    -> StepFn<decltype(combine(std::declval<const A&>(), std::declval<const B&>()))> {
    using R = decltype(combine(std::declval<const A&>(), std::declval<const B&>()));
    std::vector<std::pair<Word, R>> pieces;
    for (const auto& [w, a, b] : common_refinement(f, g)) pieces.emplace_back(w, combine(a, b));
    return StepFn<R>::from_pieces(std::move(pieces));
}

inline void check_same_group(const StepFn<Perm>& f, const StepFn<Perm>& g) {
    if (f.pieces().front().second.degree() != g.pieces().front().second.degree())
        throw DomainError("step functions take values in different groups");
}

inline StepFn<Perm> l0_product(const StepFn<Perm>& f, const StepFn<Perm>& g) {
    check_same_group(f, g);
    return zip_with(f, g, [](const Perm& a, const Perm& b) { return a * b; });
}

inline StepFn<Perm> l0_inverse(const StepFn<Perm>& f) {
    std::vector<std::pair<Word, Perm>> pieces;
    pieces.reserve(f.size());
    for (const auto& [w, v] : f.pieces()) pieces.emplace_back(w, v.inverse());
    return StepFn<Perm>::from_pieces(std::move(pieces));
}

// Convergence-in-measure gauge for the discrete metric on the value set:
// mu{x : f(x) != g(x)}, an exact rational.
template <class V>
Rat gauge(const StepFn<V>& f, const StepFn<V>& g, const Lambda& lambda) {
    std::vector<Word> differing;
    for (const auto& [w, a, b] : common_refinement(f, g))
        if (!(a == b)) differing.push_back(w);
    return mu(std::span(differing), lambda);
}

// The gauge that only watches where a chosen point of {0..m-1} is sent:
// mu{x : f(x)(point) != g(x)(point)}. This is the neighborhood structure the
// leaf-shift embedding below responds to.
inline Rat gauge_at_point(const StepFn<Perm>& f, const StepFn<Perm>& g, std::uint32_t point,
                          const Lambda& lambda) {
    check_same_group(f, g);
    if (point >= static_cast<std::uint32_t>(f.pieces().front().second.degree()))
        throw DomainError("point " + std::to_string(point) + " is outside the permuted set");
    std::vector<Word> differing;
    for (const auto& [w, a, b] : common_refinement(f, g))
        if (a(point) != b(point)) differing.push_back(w);
    return mu(std::span(differing), lambda);
}

namespace detail {

// f restricted to [w], as pieces covering exactly [w].
template <class V>
void restrict_onto(const StepFn<V>& f, const Word& w, std::vector<std::pair<Word, V>>& out) {
    for (const auto& [u, v] : f.pieces()) {
        if (u.is_prefix_of(w)) {
            out.emplace_back(w, v);
            return;
        }
        if (w.is_prefix_of(u)) out.emplace_back(u, v);
    }
}

} // namespace detail

// The straight-line path from the constant y0 (t = 0) to f (t = 1), sliding
// the split point through the dyadic encoding of [0,1]: keep f on [0, t),
// take y0 from t on. The boundary point t itself has no finite cylinder of
// its own, so it sits with the constant side; only t = 0 and t = 1 are exact
// endpoints, which is all the contract asks.
template <class V>
StepFn<V> contraction(const StepFn<V>& f, const Rat& t, const V& y0) {
    if (t < 0 || t > 1) throw DomainError("contraction parameter must lie in [0, 1]");
    if (t == 0) return StepFn<V>::constant(y0);
    if (t == 1) return f;
    int k = 0;
    if (!is_dyadic(t, k) || k > max_depth())
        throw DomainError("contraction parameter " + format_rat(t) +
                          " is not dyadic of depth <= " + std::to_string(max_depth()));
    const Int num = numerator(t) * (Int(1) << k) / denominator(t);
    std::vector<std::pair<Word, V>> pieces;
    Word prefix;
    for (int j = k - 1; j >= 0; --j) {
        const int bit = static_cast<int>((num >> j) & 1);
        if (bit == 1) detail::restrict_onto(f, prefix.push(0), pieces);
        else pieces.emplace_back(prefix.push(1), y0);
        prefix = prefix.push(bit);
    }
    pieces.emplace_back(prefix, y0);
    return StepFn<V>::from_pieces(std::move(pieces));
}

// A finite metric space on points {0..size-1} with exact rational distances.
class FiniteMetric {
public:
    static FiniteMetric from_matrix(std::vector<std::vector<Rat>> d) {
        const std::size_t q = d.size();
        for (const auto& row : d)
            if (row.size() != q) throw DomainError("distance matrix is not square");
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                if (d[i][j] != d[j][i]) throw DomainError("distance matrix is not symmetric");
                if ((i == j) != (d[i][j] == 0))
                    throw DomainError("distances must vanish exactly on the diagonal");
                if (d[i][j] < 0) throw DomainError("negative distance");
                for (std::size_t l = 0; l < q; ++l)
                    if (d[i][j] > d[i][l] + d[l][j])
                        throw DomainError("triangle inequality fails");
            }
        FiniteMetric m;
        m.d_ = std::move(d);
        return m;
    }

    static FiniteMetric discrete(int size) {
        std::vector<std::vector<Rat>> d(static_cast<std::size_t>(size),
                                        std::vector<Rat>(static_cast<std::size_t>(size), 1));
        for (auto i = 0u; i < d.size(); ++i) d[i][i] = 0;
        return from_matrix(std::move(d));
    }

    int size() const { return static_cast<int>(d_.size()); }
    const Rat& d(int i, int j) const {
        return d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

private:
    std::vector<std::vector<Rat>> d_;
};

// Replace every value of f by the least-index element of the net that is
// strictly within eps of it. The output stays within eps of f uniformly;
// a value with no eps-close net point is reported, not rounded.
inline StepFn<int> quantize(const StepFn<int>& f, const FiniteMetric& metric,
                            const std::vector<int>& net, const Rat& eps) {
    for (const int b : net)
        if (b < 0 || b >= metric.size()) throw DomainError("net point outside the metric space");
    std::vector<std::pair<Word, int>> pieces;
    pieces.reserve(f.size());
    for (const auto& [w, v] : f.pieces()) {
        if (v < 0 || v >= metric.size()) throw DomainError("value outside the metric space");
        bool found = false;
        for (const int b : net)
            if (metric.d(v, b) < eps) {
                pieces.emplace_back(w, b);
                found = true;
                break;
            }
        if (!found)
            throw DomainError("net is not " + format_rat(eps) + "-dense at value " +
                              std::to_string(v) + " (piece " + w.str() + ")");
    }
    return StepFn<int>::from_pieces(std::move(pieces));
}

// Is f(x) in the G-orbit of y0 almost everywhere? When yes, the witness phi
// satisfies phi(x)(y0) = f(x) on every piece, with the least group element
// chosen each time; when no, the first offending piece is returned.
struct OrbitMemberResult {
    bool member = false;
    std::optional<StepFn<Perm>> witness;
    std::optional<std::pair<Word, int>> offending;
};

inline OrbitMemberResult orbit_member(const StepFn<int>& f, const FiniteGroup& group, int y0) {
    if (y0 < 0 || y0 >= group.degree()) throw DomainError("base point outside the acted-on set");
    std::vector<std::pair<Word, Perm>> pieces;
    pieces.reserve(f.size());
    for (const auto& [w, v] : f.pieces()) {
        if (v < 0 || v >= group.degree()) throw DomainError("value outside the acted-on set");
        const Perm* hit = nullptr;
        for (const Perm& g : group.elements())
            if (static_cast<int>(g(static_cast<std::uint32_t>(y0))) == v) {
                hit = &g;
                break;
            }
        if (hit == nullptr) {
            OrbitMemberResult r;
            r.member = false;
            r.offending = {w, v};
            return r;
        }
        pieces.emplace_back(w, *hit);
    }
    OrbitMemberResult r;
    r.member = true;
    r.witness = StepFn<Perm>::from_pieces(std::move(pieces));
    return r;
}

namespace detail {

inline bool conjugates_tuple(const Perm& g, const std::vector<Perm>& from,
                             const std::vector<Perm>& to) {
    const Perm gi = g.inverse();
    for (std::size_t i = 0; i < from.size(); ++i)
        if (!(g * from[i] * gi == to[i])) return false;
    return true;
}

} // namespace detail

// Pointwise simultaneous conjugation: on each piece of the common
// refinement, the least g with g * t_i * g^{-1} = s_i for all i. Both value
// tuples must be simultaneously conjugate to the reference tuple tau on
// every piece; brute force over S_p is the oracle, hence the degree cap.
inline StepFn<Perm> cyclic_block_conjugate(const std::vector<StepFn<Perm>>& s_tuple,
                                           const std::vector<StepFn<Perm>>& t_tuple,
                                           const std::vector<Perm>& tau) {
    const std::size_t n = tau.size();
    if (n == 0 || s_tuple.size() != n || t_tuple.size() != n)
        throw DomainError("tuple lengths differ");
    const int p = tau.front().degree();
    if (p > kMaxSymmetricDegree)
        throw DomainError("conjugator search is capped at degree " +
                          std::to_string(kMaxSymmetricDegree));
    for (const Perm& t : tau)
        if (t.degree() != p) throw DomainError("reference tuple degrees differ");

    using Tuple = std::vector<Perm>;
    StepFn<Tuple> acc = StepFn<Tuple>::constant(Tuple{});
    auto append = [](const Tuple& xs, const Perm& x) {
        Tuple out = xs;
        out.push_back(x);
        return out;
    };
    for (const auto& f : s_tuple) {
        check_same_group(f, StepFn<Perm>::constant(tau.front()));
        acc = zip_with(acc, f, append);
    }
    for (const auto& f : t_tuple) {
        check_same_group(f, StepFn<Perm>::constant(tau.front()));
        acc = zip_with(acc, f, append);
    }

    const std::vector<Perm> sp = all_perms(p);
    std::vector<std::pair<Word, Perm>> pieces;
    pieces.reserve(acc.size());
    for (const auto& [w, vals] : acc.pieces()) {
        const Tuple s(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(n));
        const Tuple t(vals.begin() + static_cast<std::ptrdiff_t>(n), vals.end());
        for (const char* side : {"left", "right"}) {
            const Tuple& tup = (side[0] == 'l') ? s : t;
            const bool ok = std::any_of(sp.begin(), sp.end(), [&](const Perm& a) {
                return detail::conjugates_tuple(a, tau, tup);
            });
            if (!ok)
                throw DomainError(std::string("piece ") + w.str() + ": " + side +
                                  " tuple is not conjugate to the reference tuple");
        }
        const Perm* least = nullptr;
        for (const Perm& g : sp)
            if (detail::conjugates_tuple(g, t, s)) {
                least = &g;
                break;
            }
        pieces.emplace_back(w, *least);
    }
    return StepFn<Perm>::from_pieces(std::move(pieces));
}

// The shift-coordinate embedding of a level-L leaf permutation into step
// functions with values in S_{2^L}. Writing pi for the leaf map and m = 2^L,
// the piece over leaf p carries i -> (pi((p+i) mod m) - p) mod m. This is a
// group homomorphism, sends only the identity to the constant identity, and
// mu(supp T) equals the point-0 gauge distance from Phi(T) to the identity:
// the value over leaf p fixes 0 exactly when pi fixes p.
inline StepFn<Perm> phi_embed(const LeafPerm& t) {
    constexpr int kMaxPhiLevel = 10;
    if (t.level > kMaxPhiLevel)
        throw DomainError("shift embedding is quadratic in 2^level; capped at level " +
                          std::to_string(kMaxPhiLevel));
    const std::uint32_t m = 1u << t.level;
    std::vector<std::pair<Word, Perm>> pieces;
    pieces.reserve(m);
    for (std::uint32_t p = 0; p < m; ++p) {
        std::vector<std::uint32_t> img(m);
        for (std::uint32_t i = 0; i < m; ++i)
            img[i] = (t.img[(p + i) % m] + m - p) % m;
        pieces.emplace_back(Word::from_index(p, t.level), Perm::from_images(std::move(img)));
    }
    return StepFn<Perm>::from_pieces(std::move(pieces));
}

} // namespace dyadic
