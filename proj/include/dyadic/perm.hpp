#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dyadic/error.hpp"

namespace dyadic {

// A permutation of {0, ..., degree-1}, stored as its image array. Ordering
// is lexicographic on images; the identity is therefore the least element of
// every symmetric group, which the deterministic "least witness" selections
// rely on throughout.
class Perm {
public:
    Perm() = default;

    static Perm identity(int degree) {
        std::vector<std::uint32_t> img(static_cast<std::size_t>(degree));
        std::iota(img.begin(), img.end(), 0u);
        Perm p;
        p.img_ = std::move(img);
        return p;
    }

    static Perm from_images(std::vector<std::uint32_t> img) {
        std::vector<bool> seen(img.size(), false);
        for (const std::uint32_t v : img) {
            if (v >= img.size() || seen[v])
                throw DomainError("image array is not a permutation");
            seen[v] = true;
        }
        Perm p;
        p.img_ = std::move(img);
        return p;
    }

    int degree() const { return static_cast<int>(img_.size()); }
    std::uint32_t operator()(std::uint32_t i) const { return img_[i]; }
    const std::vector<std::uint32_t>& images() const { return img_; }

    bool is_identity() const {
        for (std::uint32_t i = 0; i < img_.size(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    Perm inverse() const {
        std::vector<std::uint32_t> inv(img_.size());
        for (std::uint32_t i = 0; i < img_.size(); ++i) inv[img_[i]] = i;
        Perm p;
        p.img_ = std::move(inv);
        return p;
    }

    // (a * b)(i) = a(b(i)): composition in function order.
    friend Perm operator*(const Perm& a, const Perm& b) {
        if (a.degree() != b.degree()) throw DomainError("permutation degrees differ");
        std::vector<std::uint32_t> img(a.img_.size());
        for (std::uint32_t i = 0; i < img.size(); ++i) img[i] = a.img_[b.img_[i]];
        Perm p;
        p.img_ = std::move(img);
        return p;
    }

    friend bool operator==(const Perm&, const Perm&) = default;
    friend auto operator<=>(const Perm& a, const Perm& b) {
        return std::lexicographical_compare_three_way(a.img_.begin(), a.img_.end(),
                                                      b.img_.begin(), b.img_.end());
    }

    std::string str() const {
        std::string s = "[";
        for (std::uint32_t i = 0; i < img_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(img_[i]);
        }
        return s + "]";
    }

private:
    std::vector<std::uint32_t> img_;
};

// Exhaustive searches over S_p are the designated oracle for conjugator
// hunting, so the degree is capped where factorials stay desk-sized.
inline constexpr int kMaxSymmetricDegree = 8;

// All of S_degree in lexicographic order (identity first).
inline std::vector<Perm> all_perms(int degree) {
    if (degree < 0 || degree > kMaxSymmetricDegree)
        throw DomainError("symmetric group degree must lie in [0, " +
                          std::to_string(kMaxSymmetricDegree) + "]");
    std::vector<std::uint32_t> img(static_cast<std::size_t>(degree));
    std::iota(img.begin(), img.end(), 0u);
    std::vector<Perm> out;
    do {
        out.push_back(Perm::from_images(img));
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

// A concrete finite permutation group: the full element list, sorted, closed
// under product and inverse. Element order (lexicographic) is the tiebreak
// order for every deterministic witness choice.
class FiniteGroup {
public:
    static FiniteGroup symmetric(int degree) {
        FiniteGroup g;
        g.degree_ = degree;
        g.elements_ = all_perms(degree);
        if (degree >= 2) {
            std::vector<std::uint32_t> t(static_cast<std::size_t>(degree));
            std::iota(t.begin(), t.end(), 0u);
            std::swap(t[0], t[1]);
            g.gens_ = {Perm::from_images(t)};
            if (degree >= 3) {
                std::vector<std::uint32_t> c(static_cast<std::size_t>(degree));
                for (int i = 0; i < degree; ++i) c[static_cast<std::size_t>(i)] =
                    static_cast<std::uint32_t>((i + 1) % degree);
                g.gens_.push_back(Perm::from_images(c));
            }
        }
        return g;
    }

    static FiniteGroup cyclic(int degree) {
        if (degree < 1 || degree > kMaxSymmetricDegree)
            throw DomainError("cyclic group degree must lie in [1, " +
                              std::to_string(kMaxSymmetricDegree) + "]");
        std::vector<std::uint32_t> c(static_cast<std::size_t>(degree));
        for (int i = 0; i < degree; ++i)
            c[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>((i + 1) % degree);
        return from_generators(degree, {Perm::from_images(c)});
    }

    static FiniteGroup from_generators(int degree, std::vector<Perm> gens) {
        if (degree < 1 || degree > kMaxSymmetricDegree)
            throw DomainError("finite group degree must lie in [1, " +
                              std::to_string(kMaxSymmetricDegree) + "]");
        for (const Perm& g : gens)
            if (g.degree() != degree) throw DomainError("generator degree mismatch");
        std::set<Perm> closed{Perm::identity(degree)};
        std::vector<Perm> frontier(closed.begin(), closed.end());
        while (!frontier.empty()) {
            std::vector<Perm> next;
            for (const Perm& x : frontier)
                for (const Perm& g : gens) {
                    for (const Perm& y : {g * x, g.inverse() * x})
                        if (closed.insert(y).second) next.push_back(y);
                }
            frontier = std::move(next);
        }
        FiniteGroup out;
        out.degree_ = degree;
        out.elements_.assign(closed.begin(), closed.end());
        out.gens_ = std::move(gens);
        return out;
    }

    int degree() const { return degree_; }
    std::size_t order() const { return elements_.size(); }
    const std::vector<Perm>& elements() const { return elements_; }
    const std::vector<Perm>& generators() const { return gens_; }
    const Perm& identity() const { return elements_.front(); }

    bool contains(const Perm& p) const {
        return std::binary_search(elements_.begin(), elements_.end(), p);
    }

private:
    int degree_ = 1;
    std::vector<Perm> elements_{Perm::identity(1)};
    std::vector<Perm> gens_;
};

} // namespace dyadic
